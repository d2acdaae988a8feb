//! Bounded guarded-string languages, computed directly from the term and from its automaton.

use std::collections::{BTreeSet, HashMap};

use super::GuardedAutomaton;
use crate::error::{Error, Result};
use crate::kat::{ActionId, BoolExpr, KatExpr, TestId};

/// Atoms are bitmasks over a fixed, sorted test list (bit i = i-th test true).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardedString {
    pub atoms: Vec<u32>,
    pub actions: Vec<ActionId>,
}

const MAX_TESTS: usize = 6;

fn holds(b: &BoolExpr, tests: &[TestId], atom: u32) -> bool {
    b.eval(&|t| match tests.iter().position(|&x| x == t) {
        Some(i) => atom >> i & 1 == 1,
        None => false,
    })
}

fn fuse(xs: &BTreeSet<GuardedString>, ys: &BTreeSet<GuardedString>, max: usize) -> BTreeSet<GuardedString> {
    let mut by_first: HashMap<u32, Vec<&GuardedString>> = HashMap::new();
    for y in ys {
        by_first.entry(y.atoms[0]).or_default().push(y);
    }
    let mut out = BTreeSet::new();
    for x in xs {
        let last = *x.atoms.last().unwrap();
        for y in by_first.get(&last).into_iter().flatten() {
            if x.actions.len() + y.actions.len() > max {
                continue;
            }
            let mut atoms = x.atoms.clone();
            atoms.extend_from_slice(&y.atoms[1..]);
            let mut actions = x.actions.clone();
            actions.extend_from_slice(&y.actions);
            out.insert(GuardedString { atoms, actions });
        }
    }
    out
}

fn lang(e: &KatExpr, tests: &[TestId], max: usize) -> BTreeSet<GuardedString> {
    let all = 0..(1u32 << tests.len());
    let atoms_where = |b: &BoolExpr| -> BTreeSet<GuardedString> {
        all.clone()
            .filter(|&a| holds(b, tests, a))
            .map(|a| GuardedString { atoms: vec![a], actions: vec![] })
            .collect()
    };
    match e {
        KatExpr::Zero => BTreeSet::new(),
        KatExpr::One => atoms_where(&BoolExpr::One),
        KatExpr::Test(b) => atoms_where(b),
        KatExpr::Action(p) => {
            if max == 0 {
                return BTreeSet::new();
            }
            let mut out = BTreeSet::new();
            for a in all.clone() {
                for b in all.clone() {
                    out.insert(GuardedString { atoms: vec![a, b], actions: vec![*p] });
                }
            }
            out
        }
        KatExpr::Sum(xs) => xs.iter().flat_map(|x| lang(x, tests, max)).collect(),
        KatExpr::Seq(xs) => {
            let mut acc = atoms_where(&BoolExpr::One);
            for x in xs {
                acc = fuse(&acc, &lang(x, tests, max), max);
            }
            acc
        }
        KatExpr::Star(x) => {
            let body = lang(x, tests, max);
            let mut acc = atoms_where(&BoolExpr::One);
            loop {
                let more = fuse(&acc, &body, max);
                let before = acc.len();
                acc.extend(more);
                if acc.len() == before {
                    return acc;
                }
            }
        }
    }
}

/// Every guarded string of `e` with at most `max_actions` actions, atoms over `tests`.
pub fn enumerate_language(e: &KatExpr, tests: &[TestId], max_actions: usize) -> Result<BTreeSet<GuardedString>> {
    if tests.len() > MAX_TESTS {
        return Err(Error::AlphabetTooLarge(tests.len()));
    }
    Ok(lang(e, tests, max_actions))
}

/// The same bounded language read off an automaton.
pub fn automaton_language(
    ga: &GuardedAutomaton,
    tests: &[TestId],
    max_actions: usize,
) -> Result<BTreeSet<GuardedString>> {
    if tests.len() > MAX_TESTS {
        return Err(Error::AlphabetTooLarge(tests.len()));
    }
    let mut out = BTreeSet::new();
    let mut stack: Vec<(BTreeSet<usize>, GuardedString)> =
        vec![(BTreeSet::from([ga.initial]), GuardedString { atoms: vec![], actions: vec![] })];
    while let Some((set, prefix)) = stack.pop() {
        for atom in 0..(1u32 << tests.len()) {
            let mut cur = prefix.clone();
            cur.atoms.push(atom);
            if set.iter().any(|&q| holds(&ga.accept[q], tests, atom)) {
                out.insert(cur.clone());
            }
            if cur.actions.len() == max_actions {
                continue;
            }
            let mut succ: std::collections::BTreeMap<ActionId, BTreeSet<usize>> = Default::default();
            for &q in &set {
                for (g, a, t) in &ga.transitions[q] {
                    if holds(g, tests, atom) {
                        succ.entry(*a).or_default().insert(*t);
                    }
                }
            }
            for (a, next) in succ {
                let mut s = cur.clone();
                s.actions.push(a);
                stack.push((next, s));
            }
        }
    }
    Ok(out)
}
