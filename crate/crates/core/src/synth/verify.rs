//! The independent soundness check for synthesized relations.

use std::collections::BTreeSet;

use super::Leaf;
use crate::algebra::{RefTuple, TraceRefinementRelation};
use crate::automata::{check, included, intersect, CheckResult, Direction};
use crate::error::{Error, Result};
use crate::kat::{ActionId, CexString, Hypothesis, HypothesisSet, KatExpr, SymbolTable};
use crate::translate::{combine, Abstraction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Obligation {
    /// `l₁∩k₁ ≤_A l₂∩k₂` (or `≡_A`) for the tuple at this index.
    Tuple(usize),
    /// First projections cover `k₁`.
    LeftCoverage,
    /// Second projections cover `k₂` (equivalence only).
    RightCoverage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violation { obligation: Obligation, cex: Option<CexString> },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

/// Combines the leaf abstractions and collects the leaf tuples, dropping duplicates.
pub fn ref_relation(leaves: &[&Leaf], direction: Direction) -> Result<(TraceRefinementRelation, Abstraction)> {
    let first = leaves.first().ok_or_else(|| Error::Invalid("a relation needs at least one tuple".into()))?;
    let mut alpha = (*first.alpha).clone();
    for l in &leaves[1..] {
        alpha = combine(&alpha, &l.alpha)?;
    }
    let rel = TraceRefinementRelation::from_tuples(
        direction,
        leaves.iter().map(|l| RefTuple::new(l.left.clone(), l.right.clone(), l.hyps.clone())),
    );
    Ok((rel, alpha))
}

/// `l ∩ k`, skipping the product construction when `l ≤ k`.
fn restrict_to(l: &KatExpr, k: &KatExpr) -> KatExpr {
    if included(l, k) {
        l.clone()
    } else {
        intersect(l, k)
    }
}

fn first_cex(r: CheckResult) -> Option<Option<CexString>> {
    match r {
        CheckResult::Ok => None,
        CheckResult::Fail(c) => Some(c.left_not_right.or(c.right_not_left)),
    }
}

/// The coverage obligations alone.
pub fn check_coverage(t: &TraceRefinementRelation, k1: &KatExpr, k2: &KatExpr) -> Result<Verdict> {
    let none = HypothesisSet::new();
    let lefts = KatExpr::sum_all(t.tuples.iter().map(|x| x.left.clone()));
    if let Some(cex) = first_cex(check(k1, &lefts, &none, Direction::Inclusion)?) {
        return Ok(Verdict::Violation { obligation: Obligation::LeftCoverage, cex });
    }
    if t.direction == Direction::Equivalence {
        let rights = KatExpr::sum_all(t.tuples.iter().map(|x| x.right.clone()));
        if let Some(cex) = first_cex(check(k2, &rights, &none, Direction::Inclusion)?) {
            return Ok(Verdict::Violation { obligation: Obligation::RightCoverage, cex });
        }
    }
    Ok(Verdict::Ok)
}

/// Checks every tuple, then coverage, and reports the first failed obligation.
pub fn verify_solution(t: &TraceRefinementRelation, k1: &KatExpr, k2: &KatExpr) -> Result<Verdict> {
    for (i, x) in t.tuples.iter().enumerate() {
        let a = restrict_to(&x.left, k1);
        let b = restrict_to(&x.right, k2);
        if let Some(cex) = first_cex(check(&a, &b, &x.hyps, t.direction)?) {
            return Ok(Verdict::Violation { obligation: Obligation::Tuple(i), cex });
        }
    }
    check_coverage(t, k1, k2)
}

/// `(k₁, k₂, A)` with every unprotected action equated to 1 and every test to 0.
pub fn trivial_tuple(k1: &KatExpr, k2: &KatExpr, table: &SymbolTable, protected: &BTreeSet<ActionId>) -> RefTuple {
    let mut hyps = HypothesisSet::new();
    for a in table.action_ids().filter(|a| !protected.contains(a)) {
        let _ = hyps.insert(Hypothesis::ActionIsSkip(a));
    }
    for t in table.test_ids() {
        let _ = hyps.insert(Hypothesis::TestConst(t, false));
    }
    RefTuple::new(k1.clone(), k2.clone(), hyps)
}
