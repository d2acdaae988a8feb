use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{compile, eval3, GuardedAutomaton};
use crate::error::Result;
use crate::kat::{rewrite_under_hypotheses, ActionId, BoolExpr, CexElem, CexString, HypothesisSet, KatExpr, Literal, TestId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "le")]
    Inclusion,
    #[serde(rename = "eq")]
    Equivalence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexamples {
    pub direction: Direction,
    pub left_not_right: Option<CexString>,
    pub right_not_left: Option<CexString>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Ok,
    Fail(Counterexamples),
}

impl CheckResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, CheckResult::Ok)
    }
}

type DState = Vec<Vec<u32>>;

struct Node {
    parent: usize,
    atom: Vec<Literal>,
    action: Option<ActionId>,
}

/// Splits the atom space into the coarsest partial assignments deciding every guard,
/// positive branch first, always splitting on the smallest undecided test.
fn partition(guards: &[&BoolExpr]) -> Vec<Vec<Literal>> {
    fn go(guards: &[&BoolExpr], assign: &mut BTreeMap<TestId, bool>, out: &mut Vec<Vec<Literal>>) {
        let look = |t: TestId| assign.get(&t).copied();
        let mut pick: Option<TestId> = None;
        for g in guards {
            if eval3(g, &look).is_none() {
                for t in g.tests() {
                    if !assign.contains_key(&t) {
                        pick = Some(match pick {
                            Some(p) if p < t => p,
                            _ => t,
                        });
                    }
                }
            }
        }
        match pick {
            None => out.push(assign.iter().map(|(&test, &positive)| Literal { test, positive }).collect()),
            Some(t) => {
                for v in [true, false] {
                    assign.insert(t, v);
                    go(guards, assign, out);
                }
                assign.remove(&t);
            }
        }
    }
    let mut out = Vec::new();
    go(guards, &mut BTreeMap::new(), &mut out);
    out
}

/// Shortest string in the intersection of the `left` languages that is missing from the
/// intersection of the `right` languages, by breadth-first search over the subset product.
pub fn find_difference(left: &[&GuardedAutomaton], right: &[&GuardedAutomaton]) -> Option<CexString> {
    let autos: Vec<&GuardedAutomaton> = left.iter().chain(right.iter()).copied().collect();
    let nl = left.len();
    let start: DState = autos.iter().map(|a| vec![a.initial as u32]).collect();
    let mut seen: HashMap<DState, ()> = HashMap::new();
    seen.insert(start.clone(), ());
    let mut nodes = vec![Node { parent: usize::MAX, atom: vec![], action: None }];
    let mut layer = vec![(start, 0usize)];
    while !layer.is_empty() {
        let mut next = Vec::new();
        for (ds, node) in layer {
            let mut guards: Vec<&BoolExpr> = Vec::new();
            for (k, set) in ds.iter().enumerate() {
                for &q in set {
                    let q = q as usize;
                    guards.push(&autos[k].accept[q]);
                    guards.extend(autos[k].transitions[q].iter().map(|(g, _, _)| g));
                }
            }
            for atom in partition(&guards) {
                let look = |t: TestId| atom.iter().find(|l| l.test == t).map(|l| l.positive);
                let holds = |g: &BoolExpr| eval3(g, &look).unwrap_or(false);
                let accepts =
                    |k: usize| ds[k].iter().any(|&q| holds(&autos[k].accept[q as usize]));
                let left_acc = (0..nl).all(accepts);
                let right_acc = (nl..autos.len()).all(accepts);
                if left_acc && !right_acc {
                    let mut elems: Vec<CexElem> = atom.iter().map(|&l| CexElem::Lit(l)).collect();
                    let mut cur = node;
                    while cur != 0 {
                        let n = &nodes[cur];
                        let mut block: Vec<CexElem> = n.atom.iter().map(|&l| CexElem::Lit(l)).collect();
                        block.push(CexElem::Act(n.action.unwrap()));
                        block.extend(elems);
                        elems = block;
                        cur = n.parent;
                    }
                    return Some(CexString(elems));
                }
                let mut succ: BTreeMap<ActionId, Vec<BTreeSet<u32>>> = BTreeMap::new();
                for (k, set) in ds.iter().enumerate() {
                    for &q in set {
                        for (g, a, t) in &autos[k].transitions[q as usize] {
                            if holds(g) {
                                succ.entry(*a).or_insert_with(|| vec![BTreeSet::new(); autos.len()])[k]
                                    .insert(*t as u32);
                            }
                        }
                    }
                }
                for (a, sets) in succ {
                    if sets[..nl].iter().any(|s| s.is_empty()) {
                        continue;
                    }
                    let nds: DState = sets.into_iter().map(|s| s.into_iter().collect()).collect();
                    if seen.contains_key(&nds) {
                        continue;
                    }
                    seen.insert(nds.clone(), ());
                    nodes.push(Node { parent: node, atom: atom.clone(), action: Some(a) });
                    next.push((nds, nodes.len() - 1));
                }
            }
        }
        layer = next;
    }
    None
}

/// `None` when L(ga1) ⊆ L(ga2), otherwise a shortest witness.
pub fn extract_cex(ga1: &GuardedAutomaton, ga2: &GuardedAutomaton) -> Option<CexString> {
    find_difference(&[ga1], &[ga2])
}

pub fn included(e1: &KatExpr, e2: &KatExpr) -> bool {
    if e1 == e2 || *e1 == KatExpr::Zero {
        return true;
    }
    extract_cex(&compile(e1), &compile(e2)).is_none()
}

pub fn equivalent(e1: &KatExpr, e2: &KatExpr) -> bool {
    included(e1, e2) && included(e2, e1)
}

pub fn is_empty(e: &KatExpr) -> bool {
    included(e, &KatExpr::Zero)
}

/// Decides `e1 ≤_A e2` (or `≡_A`) by rewriting away the hypotheses first.
pub fn check(e1: &KatExpr, e2: &KatExpr, hyps: &HypothesisSet, dir: Direction) -> Result<CheckResult> {
    let r1 = rewrite_under_hypotheses(e1, hyps)?;
    let r2 = rewrite_under_hypotheses(e2, hyps)?;
    if r1 == r2 {
        return Ok(CheckResult::Ok);
    }
    let (g1, g2) = (compile(&r1), compile(&r2));
    let left_not_right = extract_cex(&g1, &g2);
    let right_not_left = match dir {
        Direction::Inclusion => None,
        Direction::Equivalence => extract_cex(&g2, &g1),
    };
    if left_not_right.is_none() && right_not_left.is_none() {
        Ok(CheckResult::Ok)
    } else {
        Ok(CheckResult::Fail(Counterexamples { direction: dir, left_not_right, right_not_left }))
    }
}
