//! Hypotheses and their elimination by substitution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::{BoolExpr, KatExpr, Literal};
use super::symbols::{ActionId, SymbolTable, TestId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hypothesis {
    ActionIsSkip(ActionId),
    TestConst(TestId, bool),
    /// Smaller id first.
    ActionEq(ActionId, ActionId),
    /// Smaller test first, first literal positive.
    TestLitEq(Literal, Literal),
}

impl Hypothesis {
    pub fn action_eq(a: ActionId, b: ActionId) -> Result<Self> {
        if a == b {
            return Err(Error::Invalid("an action equation needs two distinct actions".into()));
        }
        Ok(Hypothesis::ActionEq(a.min(b), a.max(b)))
    }

    pub fn lit_eq(l1: Literal, l2: Literal) -> Result<Self> {
        if l1.test == l2.test {
            return Err(Error::Invalid("a test equation needs two distinct tests".into()));
        }
        let (a, b) = if l1.test < l2.test { (l1, l2) } else { (l2, l1) };
        let (a, b) = if a.positive { (a, b) } else { (a.negate(), b.negate()) };
        Ok(Hypothesis::TestLitEq(a, b))
    }

    pub fn actions(&self) -> Vec<ActionId> {
        match *self {
            Hypothesis::ActionIsSkip(a) => vec![a],
            Hypothesis::ActionEq(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        match *self {
            Hypothesis::ActionIsSkip(a) => format!("{}=1", table.action_name(a)),
            Hypothesis::TestConst(t, v) => format!("{}={}", table.test_name(t), v as u8),
            Hypothesis::ActionEq(a, b) => format!("{}={}", table.action_name(a), table.action_name(b)),
            Hypothesis::TestLitEq(a, b) => format!("{}={}", a.render(table), b.render(table)),
        }
    }
}

/// A plain ordered set of hypotheses; only contradictory constants are rejected on insertion.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypothesisSet(BTreeSet<Hypothesis>);

impl HypothesisSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, h: Hypothesis) -> Result<()> {
        if let Hypothesis::TestConst(t, v) = h {
            if self.0.contains(&Hypothesis::TestConst(t, !v)) {
                return Err(Error::InconsistentHypotheses(format!("test {} is both 0 and 1", t.0)));
            }
        }
        self.0.insert(h);
        Ok(())
    }

    pub fn with(&self, h: Hypothesis) -> Result<Self> {
        let mut s = self.clone();
        s.insert(h)?;
        Ok(s)
    }

    pub fn union(&self, other: &HypothesisSet) -> Result<Self> {
        let mut s = self.clone();
        for h in other.iter() {
            s.insert(*h)?;
        }
        Ok(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Hypothesis> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.0.contains(h)
    }

    pub fn is_subset(&self, other: &HypothesisSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        let parts: Vec<String> = self.0.iter().map(|h| h.render(table)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl FromIterator<Hypothesis> for HypothesisSet {
    fn from_iter<I: IntoIterator<Item = Hypothesis>>(iter: I) -> Self {
        HypothesisSet(iter.into_iter().collect())
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The symbol substitution induced by a hypothesis set.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    actions: BTreeMap<ActionId, Option<ActionId>>,
    tests: BTreeMap<TestId, BoolExpr>,
}

struct ParityUf {
    parent: BTreeMap<TestId, (TestId, bool)>,
}

impl ParityUf {
    /// Root and parity of `t` relative to the root.
    fn find(&mut self, t: TestId) -> (TestId, bool) {
        let (p, par) = *self.parent.get(&t).unwrap_or(&(t, false));
        if p == t {
            return (t, false);
        }
        let (r, rp) = self.find(p);
        self.parent.insert(t, (r, par ^ rp));
        (r, par ^ rp)
    }

    /// Records `a = b xor parity`; false on contradiction.
    fn union(&mut self, a: TestId, b: TestId, parity: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == parity;
        }
        let (small, large) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(large, (small, pa ^ pb ^ parity));
        true
    }
}

impl Substitution {
    pub fn from_hypotheses(hyps: &HypothesisSet) -> Result<Self> {
        let mut act_parent: BTreeMap<ActionId, ActionId> = BTreeMap::new();
        fn find(p: &mut BTreeMap<ActionId, ActionId>, a: ActionId) -> ActionId {
            let mut r = a;
            while let Some(&n) = p.get(&r) {
                if n == r {
                    break;
                }
                r = n;
            }
            p.insert(a, r);
            r
        }
        let mut uf = ParityUf { parent: BTreeMap::new() };
        let mut skipped = Vec::new();
        let mut consts = Vec::new();
        let mut actions = BTreeSet::new();
        let mut tests = BTreeSet::new();
        for h in hyps.iter() {
            match *h {
                Hypothesis::ActionIsSkip(a) => {
                    skipped.push(a);
                    actions.insert(a);
                }
                Hypothesis::ActionEq(a, b) => {
                    let (ra, rb) = (find(&mut act_parent, a), find(&mut act_parent, b));
                    let (s, l) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    act_parent.insert(l, s);
                    actions.insert(a);
                    actions.insert(b);
                }
                Hypothesis::TestConst(t, v) => {
                    consts.push((t, v));
                    tests.insert(t);
                }
                Hypothesis::TestLitEq(l1, l2) => {
                    if !uf.union(l1.test, l2.test, l1.positive != l2.positive) {
                        return Err(Error::InconsistentHypotheses(format!(
                            "tests {} and {} equated with both polarities",
                            l1.test.0, l2.test.0
                        )));
                    }
                    tests.insert(l1.test);
                    tests.insert(l2.test);
                }
            }
        }
        let skipped_roots: BTreeSet<ActionId> = skipped.iter().map(|&a| find(&mut act_parent, a)).collect();
        let mut sub = Substitution::default();
        for a in actions {
            let r = find(&mut act_parent, a);
            sub.actions.insert(a, if skipped_roots.contains(&r) { None } else { Some(r) });
        }
        let mut root_const: BTreeMap<TestId, bool> = BTreeMap::new();
        for (t, v) in consts {
            let (r, p) = uf.find(t);
            let rv = v ^ p;
            if let Some(&old) = root_const.get(&r) {
                if old != rv {
                    return Err(Error::InconsistentHypotheses(format!("test {} forced to both 0 and 1", t.0)));
                }
            }
            root_const.insert(r, rv);
        }
        for t in tests {
            let (r, p) = uf.find(t);
            let e = match root_const.get(&r) {
                Some(&v) => BoolExpr::constant(v ^ p),
                None => BoolExpr::lit(Literal { test: r, positive: !p }),
            };
            sub.tests.insert(t, e);
        }
        Ok(sub)
    }

    pub fn action(&self, a: ActionId) -> Option<ActionId> {
        self.actions.get(&a).copied().unwrap_or(Some(a))
    }

    pub fn test(&self, t: TestId) -> BoolExpr {
        self.tests.get(&t).cloned().unwrap_or(BoolExpr::Test(t))
    }

    pub fn apply(&self, e: &KatExpr) -> KatExpr {
        if self.actions.is_empty() && self.tests.is_empty() {
            return e.clone();
        }
        e.substitute(&|a| self.action(a), &|t| self.test(t))
    }
}

/// Eliminates the hypotheses by substituting each equated class with its smallest member.
pub fn rewrite_under_hypotheses(e: &KatExpr, hyps: &HypothesisSet) -> Result<KatExpr> {
    Ok(Substitution::from_hypotheses(hyps)?.apply(e))
}
