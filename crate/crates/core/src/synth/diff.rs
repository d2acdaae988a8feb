//! SolveDiff: aligning counterexamples against the other side and turning the edits into
//! restrictions.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;

use super::{Assumption, Restriction};
use crate::automata::{compile, included, Counterexamples, Direction, GuardedAutomaton};
use crate::editdist::{distance, to_repairs, RepairAction, ScoreConfig, Transformation};
use crate::error::{Error, Result};
use crate::kat::{
    kat_of_cex, rewrite_under_hypotheses, BoolExpr, CexElem, CexString, Hypothesis, HypothesisSet, KatExpr, Literal,
    TestId,
};
use crate::lang::Program;
use crate::translate::{Abstraction, CondAtom};

/// One SolveDiff choice: a single restriction (hypotheses only) or a case split whose two
/// restrictions cover the left side.
pub type Alternative = Vec<Restriction>;

/// Everything SolveDiff needs to locate tests in the programs.
pub struct DiffContext<'a> {
    pub left: &'a Program,
    pub right: &'a Program,
    pub alpha: &'a Abstraction,
    pub direction: Direction,
    pub scores: &'a ScoreConfig,
    pub protected: &'a BTreeSet<crate::kat::ActionId>,
    /// Tests already split on along the current path.
    pub split_tests: &'a BTreeSet<TestId>,
    pub max_targets: usize,
    pub max_paths: usize,
}

/// Literal blocks between actions: `blocks.len() == actions.len() + 1`.
fn blocks(s: &CexString) -> (Vec<Vec<Literal>>, Vec<crate::kat::ActionId>) {
    let mut blocks = vec![Vec::new()];
    let mut actions = Vec::new();
    for e in &s.0 {
        match *e {
            CexElem::Lit(l) => blocks.last_mut().unwrap().push(l),
            CexElem::Act(a) => {
                actions.push(a);
                blocks.push(Vec::new());
            }
        }
    }
    (blocks, actions)
}

/// Literals over the guard's tests satisfying `guard` and agreeing with `hint` wherever
/// possible. `None` when the guard is unsatisfiable. Tests the guard leaves free stay out, so
/// a cex literal with no counterpart surfaces as a removal and hence a split.
fn literals_for(guard: &BoolExpr, hint: &[Literal]) -> Option<Vec<Literal>> {
    let tests: Vec<TestId> = guard.tests().into_iter().collect();
    let want: BTreeMap<TestId, bool> = hint.iter().map(|l| (l.test, l.positive)).collect();
    let mut best: Option<(usize, u64)> = None;
    if tests.len() > 16 {
        return None;
    }
    for bits in 0..(1u64 << tests.len()) {
        // bit set means false, so the all-positive assignment is tried first
        let value = |i: usize| bits >> i & 1 == 0;
        let holds = guard.eval(&|t| tests.iter().position(|&x| x == t).map(value).unwrap_or(false));
        if !holds {
            continue;
        }
        let cost = tests.iter().enumerate().filter(|(i, t)| want.get(t).is_some_and(|&w| w != value(*i))).count();
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, bits));
        }
    }
    let (_, bits) = best?;
    Some(tests.iter().enumerate().map(|(i, &test)| Literal { test, positive: bits >> i & 1 == 0 }).collect())
}

/// Strings of the automaton's language, one per path of at most `max_actions` actions,
/// with literal blocks chosen to resemble `cex`.
fn candidate_targets(ga: &GuardedAutomaton, cex: &CexString, max_actions: usize, max_paths: usize) -> Vec<CexString> {
    let (cex_blocks, _) = blocks(cex);
    let hint = |j: usize| &cex_blocks[j.min(cex_blocks.len() - 1)];
    let mut out = Vec::new();
    let mut visited = 0usize;
    // depth-first over (state, prefix)
    let mut stack: Vec<(usize, Vec<CexElem>, usize)> = vec![(ga.initial, Vec::new(), 0)];
    while let Some((q, prefix, depth)) = stack.pop() {
        visited += 1;
        if visited > max_paths * 8 || out.len() >= max_paths {
            break;
        }
        if let Some(lits) = literals_for(&ga.accept[q], hint(depth)) {
            let mut s = prefix.clone();
            s.extend(lits.into_iter().map(CexElem::Lit));
            out.push(CexString(s));
        }
        if depth == max_actions {
            continue;
        }
        for (g, a, next) in ga.transitions[q].iter().rev() {
            if let Some(lits) = literals_for(g, hint(depth)) {
                let mut s = prefix.clone();
                s.extend(lits.into_iter().map(CexElem::Lit));
                s.push(CexElem::Act(*a));
                stack.push((*next, s, depth + 1));
            }
        }
    }
    out
}

/// The strings of `target` closest to `cex` under the edit distance, best first.
pub fn nearest_targets(
    cex: &CexString,
    target: &KatExpr,
    scores: &ScoreConfig,
    k: usize,
    max_paths: usize,
) -> Vec<(CexString, Vec<Transformation>, Rational64)> {
    let ga = compile(target);
    let mut scored: Vec<(Rational64, usize, CexString, Vec<Transformation>)> =
        candidate_targets(&ga, cex, cex.action_count() + 2, max_paths)
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let (tr, score) = distance(cex, &t, scores);
                (score, i, t, tr)
            })
            .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<(CexString, Vec<Transformation>, Rational64)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (score, _, t, tr) in scored {
        let repairs = to_repairs(&tr);
        if seen.insert(repairs) {
            out.push((t, tr, score));
        }
        if out.len() >= k {
            break;
        }
    }
    out
}

fn mirror(tr: &[Transformation]) -> Vec<Transformation> {
    use crate::editdist::StrSide;
    tr.iter()
        .map(|t| match t.clone() {
            Transformation::Remove { side, pos, elem } => Transformation::Remove {
                side: if side == StrSide::Left { StrSide::Right } else { StrSide::Left },
                pos,
                elem,
            },
            Transformation::Replace { left, right, from, to } => {
                Transformation::Replace { left: right, right: left, from: to, to: from }
            }
            Transformation::Match { left, right, elem } => Transformation::Match { left: right, right: left, elem },
        })
        .collect()
}

/// Whether `cex` stops being a difference between `from` and `to` under `hyps`.
fn excluded(cex: &CexString, to: &KatExpr, hyps: &HypothesisSet) -> bool {
    match (rewrite_under_hypotheses(&kat_of_cex(cex), hyps), rewrite_under_hypotheses(to, hyps)) {
        (Ok(c), Ok(t)) => included(&c, &t),
        _ => false,
    }
}

fn mentions_protected(h: &Hypothesis, protected: &BTreeSet<crate::kat::ActionId>) -> bool {
    h.actions().iter().any(|a| protected.contains(a))
}

impl DiffContext<'_> {
    /// Assumptions pinning `lit` at every original occurrence of its test in `p`.
    fn pin(&self, p: &Program, lit: Literal) -> Vec<Assumption> {
        let Some(cond) = self.alpha.literal_cond(lit) else { return Vec::new() };
        self.alpha
            .test_locations(p, lit.test)
            .into_iter()
            .map(|loc| Assumption { loc, literal: lit, cond: cond.clone() })
            .collect()
    }

    /// The two complementary restrictions for a split on `t`, or `None` when no program
    /// that matters for coverage mentions it.
    fn split(&self, t: TestId) -> Option<Alternative> {
        if self.split_tests.contains(&t) || matches!(self.alpha.atom_of(t), Some(CondAtom::Opaque(_)) | None) {
            return None;
        }
        let mut out = Vec::new();
        for positive in [true, false] {
            let lit = Literal { test: t, positive };
            let left = self.pin(self.left, lit);
            let right = if self.direction == Direction::Equivalence { self.pin(self.right, lit) } else { Vec::new() };
            if left.is_empty() && right.is_empty() {
                return None;
            }
            if self.direction == Direction::Inclusion && left.is_empty() {
                return None;
            }
            out.push(Restriction { left, right, hyps: HypothesisSet::new(), split: Some(lit) });
        }
        Some(out)
    }

    /// Restrictions suggested by one transformation list, in search order: case splits,
    /// then every hypothesis together, then single hypotheses that already exclude `cex`.
    fn alternatives_from(
        &self,
        tr: &[Transformation],
        cexs: &[(&CexString, &KatExpr)],
        hyps: &HypothesisSet,
        out: &mut Vec<Alternative>,
    ) {
        let repairs = to_repairs(tr);
        let mut split_tests = BTreeSet::new();
        let mut new_hyps = Vec::new();
        for r in &repairs {
            match r {
                RepairAction::CaseSplit { literal, .. } => {
                    split_tests.insert(literal.test);
                }
                RepairAction::Hypothesis(h) => {
                    if !mentions_protected(h, self.protected) && !hyps.contains(h) {
                        new_hyps.push(*h);
                    }
                }
            }
        }
        let push = |alt: Alternative, out: &mut Vec<Alternative>| {
            if !out.contains(&alt) {
                out.push(alt);
            }
        };
        for t in split_tests {
            if let Some(alt) = self.split(t) {
                push(alt, out);
            }
        }
        let all_excluded = |h: &HypothesisSet| cexs.iter().all(|(c, to)| excluded(c, to, h));
        if !new_hyps.is_empty() {
            if let Ok(all) = new_hyps.iter().try_fold(hyps.clone(), |acc, h| acc.with(*h)) {
                if all_excluded(&all) {
                    let added: HypothesisSet = new_hyps.iter().copied().collect();
                    push(vec![Restriction { left: vec![], right: vec![], hyps: added, split: None }], out);
                }
            }
        }
        if new_hyps.len() > 1 {
            for h in &new_hyps {
                if let Ok(one) = hyps.with(*h) {
                    if all_excluded(&one) {
                        let added: HypothesisSet = [*h].into_iter().collect();
                        push(vec![Restriction { left: vec![], right: vec![], hyps: added, split: None }], out);
                    }
                }
            }
        }
    }

    /// Restriction alternatives for the counterexamples of `left ≤ right` (or `≡`), best first.
    pub fn solve_diff(
        &self,
        left: &KatExpr,
        right: &KatExpr,
        hyps: &HypothesisSet,
        cexs: &Counterexamples,
    ) -> Result<Vec<Alternative>> {
        let rl = rewrite_under_hypotheses(left, hyps)?;
        let rr = rewrite_under_hypotheses(right, hyps)?;
        let mut lists: Vec<(Rational64, Vec<Transformation>)> = Vec::new();
        let mut refuted: Vec<(&CexString, &KatExpr)> = Vec::new();
        if let (Some(a), Some(b)) = (&cexs.left_not_right, &cexs.right_not_left) {
            let (tr, score) = distance(a, b, self.scores);
            lists.push((score, tr));
        }
        if let Some(c) = &cexs.left_not_right {
            refuted.push((c, &rr));
            for (_, tr, score) in nearest_targets(c, &rr, self.scores, self.max_targets, self.max_paths) {
                lists.push((score, tr));
            }
        }
        if let Some(c) = &cexs.right_not_left {
            refuted.push((c, &rl));
            for (_, tr, score) in nearest_targets(c, &rl, self.scores, self.max_targets, self.max_paths) {
                lists.push((score, mirror(&tr)));
            }
        }
        if refuted.is_empty() {
            return Err(Error::Invalid("solve_diff needs a counterexample".into()));
        }
        // stable: ties keep the pair alignment first
        lists.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = Vec::new();
        for (_, tr) in &lists {
            self.alternatives_from(tr, &refuted, hyps, &mut out);
        }
        // aligning against the empty string removes every literal: a split on each test the
        // counterexample mentions, after the splits the nearer targets suggest
        let empty = CexString(Vec::new());
        for (c, side) in [(&cexs.left_not_right, false), (&cexs.right_not_left, true)] {
            if let Some(c) = c {
                let (tr, _) = distance(c, &empty, self.scores);
                let tr = if side { mirror(&tr) } else { tr };
                for r in to_repairs(&tr) {
                    if let RepairAction::CaseSplit { literal, .. } = r {
                        if let Some(alt) = self.split(literal.test) {
                            if !out.contains(&alt) {
                                out.push(alt);
                            }
                        }
                    }
                }
            }
        }
        // case splits before hypothesis-only repairs, each group in score order
        out.sort_by_key(|alt| alt.len() < 2);
        if out.is_empty() {
            return Err(Error::NoRepairFound);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kat::{parse_kat, SymbolTable};

    #[test]
    fn nearest_target_prefers_the_matching_branch() {
        let mut t = SymbolTable::new();
        let target = parse_kat("a·M·(b·F + !b·G·H)", &mut t).unwrap();
        let cex = CexString::from_kat(&parse_kat("a·M·b·G", &mut t).unwrap()).unwrap();
        let best = nearest_targets(&cex, &target, &ScoreConfig::default(), 1, 100);
        assert_eq!(best[0].0.render(&t), "a·M·b·F");
    }

    #[test]
    fn guard_literals_follow_the_hint() {
        let b = TestId(1);
        let guard = BoolExpr::or(BoolExpr::test(TestId(0)), BoolExpr::test(b));
        let got = literals_for(&guard, &[Literal::neg(TestId(0))]).unwrap();
        assert_eq!(got, vec![Literal::neg(TestId(0)), Literal::pos(b)]);
        assert!(literals_for(&BoolExpr::Zero, &[]).is_none());
    }
}
