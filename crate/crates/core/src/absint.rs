//! Forward interval analysis over the mini language.

use std::collections::BTreeMap;
use std::fmt;

use crate::lang::{Cond, IntExpr, Location, Program, RelOp, Stmt, StmtKind};

/// An extended integer; variant order gives `NegInf < Fin(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ext {
    NegInf,
    Fin(i64),
    PosInf,
}

impl Ext {
    fn from_i128(v: i128) -> Ext {
        if v > i64::MAX as i128 {
            Ext::PosInf
        } else if v < i64::MIN as i128 {
            Ext::NegInf
        } else {
            Ext::Fin(v as i64)
        }
    }

    fn add(self, o: Ext) -> Ext {
        match (self, o) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::from_i128(a as i128 + b as i128),
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => unreachable!("undefined sum"),
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            _ => Ext::PosInf,
        }
    }

    fn neg(self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Fin(a) => Ext::from_i128(-(a as i128)),
        }
    }

    fn scale(self, c: i64) -> Ext {
        match (self, c.signum()) {
            (_, 0) => Ext::Fin(0),
            (Ext::Fin(a), _) => Ext::from_i128(a as i128 * c as i128),
            (x, 1) => x,
            (x, _) => x.neg(),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::PosInf => write!(f, "+inf"),
            Ext::Fin(v) => write!(f, "{v}"),
        }
    }
}

/// A nonempty interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Ext,
    pub hi: Ext,
}

impl Interval {
    pub const TOP: Interval = Interval { lo: Ext::NegInf, hi: Ext::PosInf };

    pub fn point(v: i64) -> Interval {
        Interval { lo: Ext::Fin(v), hi: Ext::Fin(v) }
    }

    pub fn new(lo: Ext, hi: Ext) -> Option<Interval> {
        (lo <= hi && lo != Ext::PosInf && hi != Ext::NegInf).then_some(Interval { lo, hi })
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= Ext::Fin(v) && Ext::Fin(v) <= self.hi
    }

    fn join(self, o: Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    fn meet(self, o: Interval) -> Option<Interval> {
        Interval::new(self.lo.max(o.lo), self.hi.min(o.hi))
    }

    fn leq(self, o: Interval) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }

    fn widen(self, next: Interval) -> Interval {
        Interval {
            lo: if next.lo < self.lo { Ext::NegInf } else { self.lo },
            hi: if next.hi > self.hi { Ext::PosInf } else { self.hi },
        }
    }

    fn narrow(self, next: Interval) -> Interval {
        Interval {
            lo: if self.lo == Ext::NegInf { next.lo } else { self.lo },
            hi: if self.hi == Ext::PosInf { next.hi } else { self.hi },
        }
    }

    fn add(self, o: Interval) -> Interval {
        Interval { lo: self.lo.add(o.lo), hi: self.hi.add(o.hi) }
    }

    fn scale(self, c: i64) -> Interval {
        let (a, b) = (self.lo.scale(c), self.hi.scale(c));
        Interval { lo: a.min(b), hi: a.max(b) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Per-variable intervals; `None` is the unreachable state. Missing variables are top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsState(pub Option<BTreeMap<String, Interval>>);

impl AbsState {
    pub fn top() -> AbsState {
        AbsState(Some(BTreeMap::new()))
    }

    pub fn bottom() -> AbsState {
        AbsState(None)
    }

    pub fn is_bottom(&self) -> bool {
        self.0.is_none()
    }

    pub fn get(&self, v: &str) -> Interval {
        self.0.as_ref().and_then(|m| m.get(v).copied()).unwrap_or(Interval::TOP)
    }

    fn set(&mut self, v: &str, i: Interval) {
        if let Some(m) = &mut self.0 {
            if i == Interval::TOP {
                m.remove(v);
            } else {
                m.insert(v.to_string(), i);
            }
        }
    }

    pub fn join(&self, o: &AbsState) -> AbsState {
        match (&self.0, &o.0) {
            (None, _) => o.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => AbsState(Some(
                a.iter().filter_map(|(k, x)| b.get(k).map(|y| (k.clone(), x.join(*y)))).collect(),
            )),
        }
    }

    pub fn leq(&self, o: &AbsState) -> bool {
        match (&self.0, &o.0) {
            (None, _) => true,
            (_, None) => false,
            (Some(a), Some(b)) => b.iter().all(|(k, y)| a.get(k).is_some_and(|x| x.leq(*y))),
        }
    }

    fn widen(&self, next: &AbsState) -> AbsState {
        match (&self.0, &next.0) {
            (None, _) => next.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => AbsState(Some(
                a.iter().filter_map(|(k, x)| b.get(k).map(|y| (k.clone(), x.widen(*y)))).collect(),
            )),
        }
    }

    fn narrow(&self, next: &AbsState) -> AbsState {
        match (&self.0, &next.0) {
            (None, _) | (_, None) => next.clone(),
            (Some(a), Some(b)) => {
                let mut out = a.clone();
                for (k, y) in b {
                    let x = a.get(k).copied().unwrap_or(Interval::TOP);
                    out.insert(k.clone(), x.narrow(*y));
                }
                AbsState(Some(out))
            }
        }
    }
}

impl fmt::Display for AbsState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => write!(f, "bottom"),
            Some(m) if m.is_empty() => write!(f, "top"),
            Some(m) => {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k} in {v}")).collect();
                write!(f, "{}", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
    /// The state is unreachable, so any verdict holds vacuously.
    Unreachable,
}

pub fn eval_int(s: &AbsState, e: &IntExpr) -> Interval {
    match e {
        IntExpr::Var(v) => s.get(v),
        IntExpr::Lit(n) => Interval::point(*n),
        IntExpr::Nondet => Interval::TOP,
        IntExpr::Add(a, b) => eval_int(s, a).add(eval_int(s, b)),
        IntExpr::Sub(a, b) => eval_int(s, a).add(eval_int(s, b).scale(-1)),
    }
}

/// `Σ coeff·var + constant`, or `None` when a `nondet()` occurs.
pub fn linearize(e: &IntExpr) -> Option<(BTreeMap<String, i64>, i64)> {
    fn go(e: &IntExpr, sign: i64, terms: &mut BTreeMap<String, i64>, k: &mut i64) -> Option<()> {
        match e {
            IntExpr::Var(v) => *terms.entry(v.clone()).or_insert(0) += sign,
            IntExpr::Lit(n) => *k += sign * n,
            IntExpr::Nondet => return None,
            IntExpr::Add(a, b) => {
                go(a, sign, terms, k)?;
                go(b, sign, terms, k)?;
            }
            IntExpr::Sub(a, b) => {
                go(a, sign, terms, k)?;
                go(b, -sign, terms, k)?;
            }
        }
        Some(())
    }
    let mut terms = BTreeMap::new();
    let mut k = 0;
    go(e, 1, &mut terms, &mut k)?;
    terms.retain(|_, c| *c != 0);
    Some((terms, k))
}

fn rel_truth(op: RelOp, d: Interval) -> Truth {
    // d = lhs - rhs
    let (lo, hi) = (d.lo, d.hi);
    let zero = Ext::Fin(0);
    let (always, never) = match op {
        RelOp::Lt => (hi < zero, lo >= zero),
        RelOp::Le => (hi <= zero, lo > zero),
        RelOp::Gt => (lo > zero, hi <= zero),
        RelOp::Ge => (lo >= zero, hi < zero),
        RelOp::Eq => (lo == zero && hi == zero, lo > zero || hi < zero),
        RelOp::Ne => (lo > zero || hi < zero, lo == zero && hi == zero),
    };
    if always {
        Truth::True
    } else if never {
        Truth::False
    } else {
        Truth::Unknown
    }
}

pub fn eval_cond(s: &AbsState, c: &Cond) -> Truth {
    if s.is_bottom() {
        return Truth::Unreachable;
    }
    match c {
        Cond::True => Truth::True,
        Cond::False => Truth::False,
        Cond::Rel(op, a, b) => {
            let d = eval_int(s, &IntExpr::Sub(Box::new(a.clone()), Box::new(b.clone())));
            // nondet on both sides is independent, so only the interval verdict is sound
            rel_truth(*op, d)
        }
        Cond::Not(x) => match eval_cond(s, x) {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            t => t,
        },
        Cond::And(a, b) => match (eval_cond(s, a), eval_cond(s, b)) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => match filter(s, c).is_bottom() {
                true => Truth::False,
                false => Truth::Unknown,
            },
        },
        Cond::Or(a, b) => match (eval_cond(s, a), eval_cond(s, b)) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => match filter(s, &negate(c)).is_bottom() {
                true => Truth::True,
                false => Truth::Unknown,
            },
        },
    }
}

/// Negation pushed down to the relations.
pub fn negate(c: &Cond) -> Cond {
    match c {
        Cond::True => Cond::False,
        Cond::False => Cond::True,
        Cond::Rel(op, a, b) => Cond::Rel(op.negate(), a.clone(), b.clone()),
        Cond::Not(x) => (**x).clone(),
        Cond::And(a, b) => Cond::Or(Box::new(negate(a)), Box::new(negate(b))),
        Cond::Or(a, b) => Cond::And(Box::new(negate(a)), Box::new(negate(b))),
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

/// Refines `s` with `Σ c·v + k <= 0`.
fn restrict_le(s: &mut AbsState, terms: &BTreeMap<String, i64>, k: i64) {
    if s.is_bottom() {
        return;
    }
    let total = terms.iter().fold(Interval::point(k), |acc, (v, c)| acc.add(s.get(v).scale(*c)));
    if total.lo > Ext::Fin(0) {
        *s = AbsState::bottom();
        return;
    }
    for (v, c) in terms {
        let rest = terms
            .iter()
            .filter(|(w, _)| *w != v)
            .fold(Interval::point(k), |acc, (w, d)| acc.add(s.get(w).scale(*d)));
        // c·v <= -rest.lo
        let bound = match rest.lo.neg() {
            Ext::Fin(u) => u,
            _ => continue,
        };
        let cur = s.get(v);
        let refined = if *c > 0 {
            cur.meet(Interval { lo: Ext::NegInf, hi: Ext::Fin(floor_div(bound, *c)) })
        } else {
            cur.meet(Interval { lo: Ext::Fin(ceil_div(bound, *c)), hi: Ext::PosInf })
        };
        match refined {
            Some(i) => s.set(v, i),
            None => {
                *s = AbsState::bottom();
                return;
            }
        }
    }
}

/// The part of `s` on which `c` may hold.
pub fn filter(s: &AbsState, c: &Cond) -> AbsState {
    if s.is_bottom() {
        return s.clone();
    }
    match c {
        Cond::True => s.clone(),
        Cond::False => AbsState::bottom(),
        Cond::Not(x) => filter(s, &negate(x)),
        Cond::And(a, b) => filter(&filter(s, a), b),
        Cond::Or(a, b) => filter(s, a).join(&filter(s, b)),
        Cond::Rel(op, a, b) => {
            if eval_cond(s, c) == Truth::False {
                return AbsState::bottom();
            }
            let diff = IntExpr::Sub(Box::new(a.clone()), Box::new(b.clone()));
            let Some((terms, k)) = linearize(&diff) else { return s.clone() };
            let neg: BTreeMap<String, i64> = terms.iter().map(|(v, c)| (v.clone(), -c)).collect();
            let mut out = s.clone();
            match op {
                RelOp::Le => restrict_le(&mut out, &terms, k),
                RelOp::Lt => restrict_le(&mut out, &terms, k + 1),
                RelOp::Ge => restrict_le(&mut out, &neg, -k),
                RelOp::Gt => restrict_le(&mut out, &neg, -k + 1),
                RelOp::Eq => {
                    restrict_le(&mut out, &terms, k);
                    restrict_le(&mut out, &neg, -k);
                }
                RelOp::Ne => {
                    // only a single unit-coefficient variable can lose an endpoint
                    if terms.len() == 1 {
                        let (v, c) = terms.iter().next().unwrap();
                        if c.abs() == 1 {
                            let val = -k * c;
                            let cur = out.get(v);
                            let shaved = if cur.lo == Ext::Fin(val) {
                                Interval::new(Ext::Fin(val.saturating_add(1)), cur.hi)
                            } else if cur.hi == Ext::Fin(val) {
                                Interval::new(cur.lo, Ext::Fin(val.saturating_sub(1)))
                            } else {
                                Some(cur)
                            };
                            match shaved {
                                Some(i) => out.set(v, i),
                                None => out = AbsState::bottom(),
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

/// Entry state of every statement, plus the state at program exit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantMap {
    pub at: BTreeMap<Location, AbsState>,
    pub exit: Option<AbsState>,
}

impl InvariantMap {
    /// Unanalyzed locations are treated as reachable with no information.
    pub fn get(&self, loc: &Location) -> AbsState {
        self.at.get(loc).cloned().unwrap_or_else(AbsState::top)
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (loc, s) in &self.at {
            out.push_str(&format!("{loc}@{}: {s}\n", loc.col));
        }
        if let Some(e) = &self.exit {
            out.push_str(&format!("exit: {e}\n"));
        }
        out
    }
}

const WIDEN_DELAY: usize = 3;

struct Analyzer {
    map: BTreeMap<Location, AbsState>,
}

impl Analyzer {
    fn record(&mut self, loc: Location, s: &AbsState, on: bool) {
        if on {
            let v = match self.map.get(&loc) {
                Some(old) => old.join(s),
                None => s.clone(),
            };
            self.map.insert(loc, v);
        }
    }

    fn exec(&mut self, st: &Stmt, pre: &AbsState, rec: bool) -> AbsState {
        self.record(st.loc, pre, rec);
        if pre.is_bottom() {
            // still visit children so every location gets an entry
            if rec {
                st.walk(&mut |x| {
                    self.map.entry(x.loc).or_insert_with(AbsState::bottom);
                });
            }
            return AbsState::bottom();
        }
        match &st.kind {
            StmtKind::Skip => pre.clone(),
            StmtKind::Assign { var, expr } => {
                let mut s = pre.clone();
                let v = eval_int(pre, expr);
                s.set(var, v);
                s
            }
            StmtKind::Event { result, .. } => {
                let mut s = pre.clone();
                if let Some(r) = result {
                    s.set(r, Interval::TOP);
                }
                s
            }
            StmtKind::Assume(c) => filter(pre, c),
            StmtKind::Fail => AbsState::bottom(),
            StmtKind::Seq(items) => {
                let mut s = pre.clone();
                for x in items {
                    s = self.exec(x, &s, rec);
                }
                s
            }
            StmtKind::If(c, a, b) => {
                let sa = self.exec(a, &filter(pre, c), rec);
                let sb = self.exec(b, &filter(pre, &negate(c)), rec);
                sa.join(&sb)
            }
            StmtKind::While(c, body) => {
                let mut head = pre.clone();
                let mut i = 0;
                loop {
                    let out = self.exec(body, &filter(&head, c), false);
                    let mut next = pre.join(&out);
                    if i >= WIDEN_DELAY {
                        next = head.widen(&next);
                    }
                    if next.leq(&head) {
                        break;
                    }
                    head = next;
                    i += 1;
                }
                let out = self.exec(body, &filter(&head, c), false);
                head = head.narrow(&pre.join(&out));
                if rec {
                    self.map.insert(st.loc, head.clone());
                }
                self.exec(body, &filter(&head, c), rec);
                filter(&head, &negate(c))
            }
        }
    }
}

/// Interval invariants on entry to every statement of `p`, from an unconstrained start.
pub fn analyze(p: &Program) -> InvariantMap {
    analyze_from(p, &AbsState::top())
}

pub fn analyze_from(p: &Program, init: &AbsState) -> InvariantMap {
    let mut a = Analyzer { map: BTreeMap::new() };
    let exit = a.exec(&p.body, init, true);
    InvariantMap { at: a.map, exit: Some(exit) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_program, Side};

    fn find<'a>(p: &'a Program, pred: impl Fn(&Stmt) -> bool) -> Location {
        let mut out = None;
        p.body.walk(&mut |s| {
            if out.is_none() && pred(s) {
                out = Some(s.loc);
            }
        });
        out.expect("statement present")
    }

    #[test]
    fn assume_then_copy_fixes_the_branch() {
        let p = parse_program("assume(d == 0); c = d; if (c == 0) execB(); else execD();", Side::C1).unwrap();
        let inv = analyze(&p);
        let at_if = inv.get(&find(&p, |s| matches!(s.kind, StmtKind::If(..))));
        assert_eq!(at_if.get("c"), Interval::point(0));
        let cond = Cond::Rel(RelOp::Eq, IntExpr::Var("c".into()), IntExpr::Lit(0));
        assert_eq!(eval_cond(&at_if, &cond), Truth::True);
    }

    #[test]
    fn nondet_is_top() {
        let p = parse_program("x = nondet(); mark();", Side::C1).unwrap();
        let inv = analyze(&p);
        let loc = find(&p, |s| matches!(s.kind, StmtKind::Event { .. }));
        assert_eq!(inv.get(&loc).get("x"), Interval::TOP);
    }

    #[test]
    fn infinite_loop_exit_is_unreachable() {
        let p = parse_program("i = 0; while (true) i = i + 1;", Side::C1).unwrap();
        assert!(analyze(&p).exit.unwrap().is_bottom());
    }

    #[test]
    fn counting_loop_bounds() {
        let p = parse_program("i = 0; while (i < 10) i = i + 1; mark();", Side::C1).unwrap();
        let inv = analyze(&p);
        let after = inv.get(&find(&p, |s| matches!(s.kind, StmtKind::Event { .. })));
        assert_eq!(after.get("i"), Interval::point(10));
    }

    #[test]
    fn containment_verdict() {
        let mut s = AbsState::top();
        s.set("x", Interval { lo: Ext::Fin(1), hi: Ext::Fin(5) });
        let c = Cond::Rel(RelOp::Gt, IntExpr::Var("x".into()), IntExpr::Lit(0));
        assert_eq!(eval_cond(&s, &c), Truth::True);
        assert_eq!(eval_cond(&AbsState::bottom(), &c), Truth::Unreachable);
    }
}
