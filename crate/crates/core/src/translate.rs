//! Abstraction of program pairs into a shared KAT alphabet, and the program-to-KAT
//! translation pruned by interval invariants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::absint::{analyze, eval_cond, InvariantMap, Truth};
use crate::absint::linearize;
use crate::error::{Error, Result};
use crate::kat::{ActionId, BoolExpr, KatExpr, Literal, Origin, SymbolTable, TestId};
use crate::lang::{print, Cond, IntExpr, Location, Program, RelOp, Side, Stmt, StmtKind};

/// A primitive condition in canonical form. `Lin` reads `Σ coeff·var > k` or `Σ coeff·var != k`,
/// with coprime coefficients and the first coefficient positive. Negations of conditions map
/// to the complementary literal of the same atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CondAtom {
    Gt { terms: Vec<(String, i64)>, k: i64 },
    Ne { terms: Vec<(String, i64)>, k: i64 },
    /// Conditions over `nondet()`; keyed by text with the operator folded to `<`, `<=` or `==`.
    Opaque(String),
}

/// Result of canonicalizing one relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Canon {
    Const(bool),
    Atom(CondAtom, bool),
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn canonical(op: RelOp, a: &IntExpr, b: &IntExpr) -> Canon {
    let diff = IntExpr::Sub(Box::new(a.clone()), Box::new(b.clone()));
    let Some((terms, k0)) = linearize(&diff) else {
        let (op, positive) = match op {
            RelOp::Lt | RelOp::Le | RelOp::Eq => (op, true),
            other => (other.negate(), false),
        };
        let text = format!("{} {} {}", print::int_expr(a), op.symbol(), print::int_expr(b));
        return Canon::Atom(CondAtom::Opaque(text), positive);
    };
    // Σ terms + k0 op 0, i.e. Σ terms op k with k = -k0
    let k = -k0;
    if terms.is_empty() {
        return Canon::Const(op.holds(0, k));
    }
    // fold every operator into `> k'` or `!= k'`
    let (is_gt, k, positive) = match op {
        RelOp::Gt => (true, k, true),
        RelOp::Ge => (true, k - 1, true),
        RelOp::Le => (true, k, false),
        RelOp::Lt => (true, k - 1, false),
        RelOp::Ne => (false, k, true),
        RelOp::Eq => (false, k, false),
    };
    let g = terms.values().fold(0, |acc, c| gcd(acc, *c));
    let mut terms: Vec<(String, i64)> = terms.into_iter().map(|(v, c)| (v, c / g)).collect();
    let flip = terms[0].1 < 0;
    if flip {
        terms.iter_mut().for_each(|t| t.1 = -t.1);
    }
    if is_gt {
        // g·Σ > k  iff  Σ > floor(k / g)
        let k = k.div_euclid(g);
        if flip {
            // -Σ > k  iff  Σ < -k  iff  !(Σ > -k - 1)
            Canon::Atom(CondAtom::Gt { terms, k: -k - 1 }, !positive)
        } else {
            Canon::Atom(CondAtom::Gt { terms, k }, positive)
        }
    } else {
        if k % g != 0 {
            return Canon::Const(!positive);
        }
        let k = if flip { -k / g } else { k / g };
        Canon::Atom(CondAtom::Ne { terms, k }, positive)
    }
}

fn terms_expr(terms: &[(String, i64)]) -> IntExpr {
    let mut acc: Option<IntExpr> = None;
    for (v, c) in terms {
        for _ in 0..c.abs() {
            let var = IntExpr::Var(v.clone());
            acc = Some(match (acc, *c > 0) {
                (None, true) => var,
                (None, false) => IntExpr::Sub(Box::new(IntExpr::Lit(0)), Box::new(var)),
                (Some(e), true) => IntExpr::Add(Box::new(e), Box::new(var)),
                (Some(e), false) => IntExpr::Sub(Box::new(e), Box::new(var)),
            });
        }
    }
    acc.unwrap_or(IntExpr::Lit(0))
}

impl CondAtom {
    /// A source condition equivalent to the positive literal of this atom.
    pub fn to_cond(&self) -> Cond {
        match self {
            CondAtom::Gt { terms, k } => Cond::Rel(RelOp::Gt, terms_expr(terms), IntExpr::Lit(*k)),
            CondAtom::Ne { terms, k } => Cond::Rel(RelOp::Ne, terms_expr(terms), IntExpr::Lit(*k)),
            CondAtom::Opaque(text) => {
                let src = format!("assume({text});");
                match crate::lang::parse_program(&src, Side::C1).map(|p| p.body.kind) {
                    Ok(StmtKind::Seq(v)) => match &v[0].kind {
                        StmtKind::Assume(c) => c.clone(),
                        _ => Cond::True,
                    },
                    _ => Cond::True,
                }
            }
        }
    }

    pub fn literal_cond(&self, positive: bool) -> Cond {
        let c = self.to_cond();
        if positive {
            c
        } else {
            crate::absint::negate(&c)
        }
    }
}

impl fmt::Display for CondAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print::cond(&self.to_cond()))
    }
}

/// Every atom mentioned by `c`.
pub fn atoms_of(c: &Cond, out: &mut Vec<CondAtom>) {
    match c {
        Cond::True | Cond::False => {}
        Cond::Rel(op, a, b) => {
            if let Canon::Atom(atom, _) = canonical(*op, a, b) {
                if !out.contains(&atom) {
                    out.push(atom);
                }
            }
        }
        Cond::Not(x) => atoms_of(x, out),
        Cond::And(a, b) | Cond::Or(a, b) => {
            atoms_of(a, out);
            atoms_of(b, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TestKey {
    pub side: Option<Side>,
    pub atom: CondAtom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKey {
    Event { side: Option<Side>, callee: String, arity: usize },
    Assign { side: Option<Side>, text: String },
}

/// The alphabet both programs are abstracted into, with the bindings from canonical
/// statements and conditions to symbols. Refinement only ever adds bindings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abstraction {
    pub table: SymbolTable,
    tests: BTreeMap<TestKey, TestId>,
    actions: BTreeMap<ActionKey, ActionId>,
    pub share: bool,
    shared_events: BTreeSet<(String, usize)>,
    shared_assigns: BTreeSet<String>,
    /// Keep the guard of a branch whose condition the invariants decide.
    pub keep_decided_guards: bool,
    pub provenance: Vec<String>,
}

fn event_texts(p: &Program) -> BTreeMap<(String, usize), BTreeSet<String>> {
    let mut out: BTreeMap<(String, usize), BTreeSet<String>> = BTreeMap::new();
    p.body.walk(&mut |s| {
        if let StmtKind::Event { callee, args, .. } = &s.kind {
            out.entry((callee.clone(), args.len())).or_default().insert(print::stmt_head(s));
        }
    });
    out
}

fn assign_texts(p: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    p.body.walk(&mut |s| {
        if let StmtKind::Assign { .. } = &s.kind {
            out.insert(print::stmt_head(s));
        }
    });
    out
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => "E".into(),
    }
}

fn test_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

impl Abstraction {
    /// Binds every statement and condition of both programs, C1 first, in source order.
    /// With `share`, an event is shared when both programs use the same set of statement
    /// texts for it, assignments are shared when textually identical, and conditions are
    /// shared by canonical form.
    pub fn new(c1: &Program, c2: &Program, share: bool) -> Abstraction {
        let (e1, e2) = (event_texts(c1), event_texts(c2));
        let shared_events = if share {
            e1.iter().filter(|(k, v)| e2.get(*k) == Some(*v)).map(|(k, _)| k.clone()).collect()
        } else {
            BTreeSet::new()
        };
        let shared_assigns =
            if share { assign_texts(c1).intersection(&assign_texts(c2)).cloned().collect() } else { BTreeSet::new() };
        let mut alpha = Abstraction {
            table: SymbolTable::new(),
            tests: BTreeMap::new(),
            actions: BTreeMap::new(),
            share,
            shared_events,
            shared_assigns,
            keep_decided_guards: false,
            provenance: vec!["initial".into()],
        };
        let both_callees: BTreeSet<(String, usize)> = e1.keys().filter(|k| e2.contains_key(*k)).cloned().collect();
        for p in [c1, c2] {
            alpha.bind_program(p, &both_callees);
        }
        alpha
    }

    fn bind_program(&mut self, p: &Program, both: &BTreeSet<(String, usize)>) {
        let side = p.side;
        let mut stmts = Vec::new();
        p.body.walk(&mut |s| stmts.push(s.clone()));
        for s in &stmts {
            match &s.kind {
                StmtKind::Event { callee, args, .. } => {
                    let key = self.event_key(side, callee, args.len());
                    if !self.actions.contains_key(&key) {
                        let shared = matches!(key, ActionKey::Event { side: None, .. });
                        let base = capitalize(callee);
                        let name = if !shared && both.contains(&(callee.clone(), args.len())) {
                            format!("{base}_{side}")
                        } else {
                            base
                        };
                        let mut texts: BTreeSet<String> = BTreeSet::new();
                        p.body.walk(&mut |x| {
                            if let StmtKind::Event { callee: c, args: a, .. } = &x.kind {
                                if c == callee && a.len() == args.len() {
                                    texts.insert(print::stmt_head(x));
                                }
                            }
                        });
                        let origin = Origin::Event {
                            side: if shared { None } else { Some(side) },
                            callee: callee.clone(),
                            arity: args.len(),
                            texts: texts.into_iter().collect(),
                        };
                        let id = self.table.add_action(&name, origin);
                        self.actions.insert(key, id);
                    }
                }
                StmtKind::Assign { var, .. } => {
                    let text = print::stmt_head(s);
                    let key = self.assign_key(side, &text);
                    if !self.actions.contains_key(&key) {
                        let shared = matches!(key, ActionKey::Assign { side: None, .. });
                        let origin = Origin::Assign { side: if shared { None } else { Some(side) }, text };
                        let id = self.table.add_action(&format!("Set_{var}"), origin);
                        self.actions.insert(key, id);
                    }
                }
                StmtKind::Assume(c) | StmtKind::If(c, _, _) | StmtKind::While(c, _) => {
                    self.bind_cond(side, c);
                }
                _ => {}
            }
        }
    }

    fn event_key(&self, side: Side, callee: &str, arity: usize) -> ActionKey {
        let shared = self.shared_events.contains(&(callee.to_string(), arity));
        ActionKey::Event { side: if shared { None } else { Some(side) }, callee: callee.to_string(), arity }
    }

    fn assign_key(&self, side: Side, text: &str) -> ActionKey {
        let shared = self.shared_assigns.contains(text);
        ActionKey::Assign { side: if shared { None } else { Some(side) }, text: text.to_string() }
    }

    fn test_key(&self, side: Side, atom: &CondAtom) -> TestKey {
        TestKey { side: if self.share { None } else { Some(side) }, atom: atom.clone() }
    }

    /// Binds the atoms of `c`; returns whether anything new was bound.
    fn bind_cond(&mut self, side: Side, c: &Cond) -> bool {
        let mut atoms = Vec::new();
        atoms_of(c, &mut atoms);
        let mut fresh = false;
        for atom in atoms {
            let key = self.test_key(side, &atom);
            if !self.tests.contains_key(&key) {
                let origin = Origin::Cond { side: key.side, text: atom.to_string() };
                let id = self.table.add_test(&test_name(self.table.num_tests()), origin);
                self.tests.insert(key, id);
                fresh = true;
            }
        }
        fresh
    }

    pub fn test_of(&self, side: Side, atom: &CondAtom) -> Option<TestId> {
        self.tests.get(&self.test_key(side, atom)).copied()
    }

    pub fn atom_of(&self, t: TestId) -> Option<&CondAtom> {
        self.tests.iter().find(|(_, id)| **id == t).map(|(k, _)| &k.atom)
    }

    pub fn action_of(&self, side: Side, s: &Stmt) -> Option<ActionId> {
        let key = match &s.kind {
            StmtKind::Event { callee, args, .. } => self.event_key(side, callee, args.len()),
            StmtKind::Assign { .. } => self.assign_key(side, &print::stmt_head(s)),
            _ => return None,
        };
        self.actions.get(&key).copied()
    }

    /// Source-level condition for a literal, for instrumentation.
    pub fn literal_cond(&self, l: Literal) -> Option<Cond> {
        self.atom_of(l.test).map(|a| a.literal_cond(l.positive))
    }

    /// The boolean term for a condition. Unbound atoms become unconstrained fresh tests only
    /// through [`refine`]; here they are an error.
    pub fn cond_expr(&self, side: Side, c: &Cond) -> Result<BoolExpr> {
        Ok(match c {
            Cond::True => BoolExpr::One,
            Cond::False => BoolExpr::Zero,
            Cond::Rel(op, a, b) => match canonical(*op, a, b) {
                Canon::Const(v) => BoolExpr::constant(v),
                Canon::Atom(atom, positive) => {
                    let t = self
                        .test_of(side, &atom)
                        .ok_or_else(|| Error::UnknownSymbol(format!("condition `{atom}` on {side}")))?;
                    BoolExpr::lit(Literal { test: t, positive })
                }
            },
            Cond::Not(x) => BoolExpr::not(self.cond_expr(side, x)?),
            Cond::And(a, b) => BoolExpr::and(self.cond_expr(side, a)?, self.cond_expr(side, b)?),
            Cond::Or(a, b) => BoolExpr::or(self.cond_expr(side, a)?, self.cond_expr(side, b)?),
        })
    }

    /// Locations of the original branch, loop and assume statements of `p` whose condition
    /// mentions test `t`.
    pub fn test_locations(&self, p: &Program, t: TestId) -> Vec<Location> {
        let mut out = Vec::new();
        p.body.walk(&mut |s| {
            if s.loc.sub > 0 {
                return;
            }
            if let StmtKind::Assume(c) | StmtKind::If(c, _, _) | StmtKind::While(c, _) = &s.kind {
                let mut atoms = Vec::new();
                atoms_of(c, &mut atoms);
                if atoms.iter().any(|a| self.test_of(p.side, a) == Some(t)) {
                    out.push(s.loc);
                }
            }
        });
        out
    }

    pub fn symbol_dump(&self) -> String {
        self.table.dump()
    }
}

/// Adds test symbols for unseen conditions. Refining with known conditions is the identity.
pub fn refine(alpha: &Abstraction, new_conds: &[(Side, Cond)]) -> Abstraction {
    let mut out = alpha.clone();
    let mut added = Vec::new();
    for (side, c) in new_conds {
        if out.bind_cond(*side, c) {
            added.push(format!("{side}: {}", print::cond(c)));
        }
    }
    if !added.is_empty() {
        out.provenance.push(format!("refine {}", added.join("; ")));
    }
    out
}

/// Least abstraction refining both. Bindings present in both must agree.
pub fn combine(a1: &Abstraction, a2: &Abstraction) -> Result<Abstraction> {
    if a1 == a2 {
        return Ok(a1.clone());
    }
    if a1.share != a2.share || a1.shared_events != a2.shared_events || a1.shared_assigns != a2.shared_assigns {
        return Err(Error::IncompatibleAbstractions("different sharing policies".into()));
    }
    let mut out = a1.clone();
    let n_common = a1.table.num_tests().min(a2.table.num_tests());
    for (key, &id) in &a2.tests {
        match a1.tests.get(key) {
            Some(&mine) if mine == id => {}
            Some(&mine) => {
                return Err(Error::IncompatibleAbstractions(format!(
                    "`{}` bound to {} and {}",
                    key.atom,
                    a1.table.test_name(mine),
                    a2.table.test_name(id)
                )))
            }
            None => {
                if (id.0 as usize) < n_common && a1.atom_of(id).is_some() {
                    return Err(Error::IncompatibleAbstractions(format!(
                        "test {} bound to different conditions",
                        a2.table.test_name(id)
                    )));
                }
                let info = a2.table.test(id);
                let new_id = out.table.add_test(&info.name, info.origin.clone());
                if new_id != id {
                    return Err(Error::IncompatibleAbstractions(format!(
                        "test {} allocated out of order",
                        info.name
                    )));
                }
                out.tests.insert(key.clone(), new_id);
            }
        }
    }
    for (key, &id) in &a2.actions {
        if a1.actions.get(key).is_some_and(|&mine| mine != id) {
            return Err(Error::IncompatibleAbstractions("action bindings differ".into()));
        }
    }
    for p in &a2.provenance {
        if !out.provenance.contains(p) {
            out.provenance.push(p.clone());
        }
    }
    Ok(out)
}

/// Program-to-KAT translation result.
#[derive(Clone, Debug)]
pub struct TranslationResult {
    pub expr: KatExpr,
    pub alpha: Abstraction,
    pub invariants: InvariantMap,
}

struct Tr<'a> {
    alpha: &'a Abstraction,
    inv: &'a InvariantMap,
    side: Side,
}

impl Tr<'_> {
    fn guard(&self, c: &Cond) -> Result<KatExpr> {
        Ok(KatExpr::test(self.alpha.cond_expr(self.side, c)?))
    }

    fn stmt(&self, s: &Stmt) -> Result<KatExpr> {
        let pre = self.inv.get(&s.loc);
        if pre.is_bottom() {
            return Ok(KatExpr::Zero);
        }
        let keep = self.alpha.keep_decided_guards;
        Ok(match &s.kind {
            StmtKind::Skip => KatExpr::One,
            StmtKind::Assign { .. } | StmtKind::Event { .. } => {
                let a = self
                    .alpha
                    .action_of(self.side, s)
                    .ok_or_else(|| Error::UnknownSymbol(print::stmt_head(s)))?;
                KatExpr::action(a)
            }
            StmtKind::Fail => KatExpr::Zero,
            StmtKind::Assume(c) => match eval_cond(&pre, c) {
                Truth::True if !keep => KatExpr::One,
                Truth::False | Truth::Unreachable => KatExpr::Zero,
                _ => self.guard(c)?,
            },
            StmtKind::Seq(items) => {
                let mut parts = Vec::with_capacity(items.len());
                for x in items {
                    let e = self.stmt(x)?;
                    if e == KatExpr::Zero {
                        return Ok(KatExpr::Zero);
                    }
                    parts.push(e);
                }
                KatExpr::seq_all(parts)
            }
            StmtKind::If(c, a, b) => {
                let not_c = crate::absint::negate(c);
                match eval_cond(&pre, c) {
                    Truth::True if keep => KatExpr::seq(self.guard(c)?, self.stmt(a)?),
                    Truth::True => self.stmt(a)?,
                    Truth::False if keep => KatExpr::seq(self.guard(&not_c)?, self.stmt(b)?),
                    Truth::False => self.stmt(b)?,
                    Truth::Unreachable => KatExpr::Zero,
                    Truth::Unknown => KatExpr::sum(
                        KatExpr::seq(self.guard(c)?, self.stmt(a)?),
                        KatExpr::seq(self.guard(&not_c)?, self.stmt(b)?),
                    ),
                }
            }
            StmtKind::While(c, body) => {
                // pre is the loop-head invariant
                let not_c = crate::absint::negate(c);
                match eval_cond(&pre, c) {
                    Truth::False if keep => self.guard(&not_c)?,
                    Truth::False => KatExpr::One,
                    // never exits
                    Truth::True | Truth::Unreachable => KatExpr::Zero,
                    Truth::Unknown => KatExpr::seq(
                        KatExpr::star(KatExpr::seq(self.guard(c)?, self.stmt(body)?)),
                        self.guard(&not_c)?,
                    ),
                }
            }
        })
    }
}

/// Translates `p` under `alpha`, binding any conditions introduced by instrumentation.
pub fn translate(p: &Program, alpha: &Abstraction) -> Result<TranslationResult> {
    let mut conds = Vec::new();
    p.body.walk(&mut |s| {
        if let StmtKind::Assume(c) | StmtKind::If(c, _, _) | StmtKind::While(c, _) = &s.kind {
            conds.push((p.side, c.clone()));
        }
    });
    let alpha = refine(alpha, &conds);
    let invariants = analyze(p);
    let expr = Tr { alpha: &alpha, inv: &invariants, side: p.side }.stmt(&p.body)?;
    Ok(TranslationResult { expr, alpha, invariants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;

    fn rel(op: RelOp, a: IntExpr, b: i64) -> Canon {
        canonical(op, &a, &IntExpr::Lit(b))
    }

    fn var(v: &str) -> IntExpr {
        IntExpr::Var(v.into())
    }

    #[test]
    fn negations_share_an_atom() {
        let gt = rel(RelOp::Gt, var("x"), 0);
        let le = rel(RelOp::Le, var("x"), 0);
        let ge = rel(RelOp::Ge, var("x"), 1);
        match (&gt, &le, &ge) {
            (Canon::Atom(a, true), Canon::Atom(b, false), Canon::Atom(c, true)) => {
                assert_eq!(a, b);
                assert_eq!(a, c);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(rel(RelOp::Eq, var("l"), 0), Canon::Atom(CondAtom::Ne { terms: vec![("l".into(), 1)], k: 0 }, false));
    }

    #[test]
    fn sign_and_gcd_normalized() {
        let e = IntExpr::Sub(Box::new(IntExpr::Lit(0)), Box::new(IntExpr::Add(Box::new(var("x")), Box::new(var("x")))));
        // -2x > 3 iff x < -1.5 iff x <= -2 iff !(x > -2)
        assert_eq!(rel(RelOp::Gt, e, 3), Canon::Atom(CondAtom::Gt { terms: vec![("x".into(), 1)], k: -2 }, false));
        assert_eq!(rel(RelOp::Gt, IntExpr::Lit(1), 0), Canon::Const(true));
    }

    #[test]
    fn assume_prunes_the_else_branch() {
        let p = parse_program("assume(d == 0); c = d; if (c == 0) execB(); else execD();", Side::C1).unwrap();
        let q = parse_program("skip;", Side::C2).unwrap();
        let alpha = Abstraction::new(&p, &q, true);
        let r = translate(&p, &alpha).unwrap();
        assert_eq!(r.expr.display(&r.alpha.table).to_string(), "!a·Set_c·ExecB");
    }
}
