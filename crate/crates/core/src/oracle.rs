//! Concrete semantics used as ground truth: a fuel-bounded big-step interpreter, concrete
//! program refinement, a strongly valid translation for boolean programs, and concrete KAT
//! refinement decided atom by atom.
//!
//! A configuration goes wrong when it has no normal outcome: every execution faults, blocks
//! on an assumption or runs out of fuel. This is the reading under which a configuration goes
//! wrong exactly when `α(σ)·k ≡ 0` for a strongly valid translation `k`.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::is_empty;
use crate::error::{Error, Result};
use crate::kat::{BoolExpr, CexElem, CexString, KatExpr, Literal, SymbolTable, TestId};
use crate::lang::{Cond, IntExpr, Location, Program, Side, Stmt, StmtKind};
use crate::translate::{Abstraction, CondAtom};

pub type Store = BTreeMap<String, i64>;

/// Largest store space `concrete_refines` enumerates.
pub const MAX_STORES: usize = 1 << 16;
/// Largest number of tests whose atoms are enumerated.
pub const MAX_TESTS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecConfig {
    /// Values `nondet()` may return.
    pub nondet: Vec<i64>,
    /// Iterations allowed per loop entry.
    pub fuel: usize,
    /// Values an event call may return, by callee; `nondet` otherwise.
    pub events: BTreeMap<String, Vec<i64>>,
    /// Record the action steps of each run.
    pub traces: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig { nondet: vec![0, 1], fuel: 32, events: BTreeMap::new(), traces: true }
    }
}

/// An executed assignment or event and the store it started from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Step {
    pub loc: Location,
    pub before: Store,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Normal { store: Store, steps: Vec<Step> },
    Fault,
    OutOfFuel,
}

impl Outcome {
    pub fn store(&self) -> Option<&Store> {
        match self {
            Outcome::Normal { store, .. } => Some(store),
            _ => None,
        }
    }
}

/// Unbound variables read as 0.
fn eval_int(e: &IntExpr, s: &Store, cfg: &ExecConfig) -> Vec<i64> {
    let mut out: Vec<i64> = match e {
        IntExpr::Var(v) => vec![s.get(v).copied().unwrap_or(0)],
        IntExpr::Lit(n) => vec![*n],
        IntExpr::Nondet => cfg.nondet.clone(),
        IntExpr::Add(a, b) | IntExpr::Sub(a, b) => {
            let (xs, ys) = (eval_int(a, s, cfg), eval_int(b, s, cfg));
            let add = matches!(e, IntExpr::Add(..));
            xs.iter().flat_map(|x| ys.iter().map(move |y| if add { x + y } else { x - y })).collect()
        }
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// Which truth values `c` can take in `s`.
fn eval_cond(c: &Cond, s: &Store, cfg: &ExecConfig) -> (bool, bool) {
    match c {
        Cond::True => (true, false),
        Cond::False => (false, true),
        Cond::Rel(op, a, b) => {
            let (xs, ys) = (eval_int(a, s, cfg), eval_int(b, s, cfg));
            let mut t = false;
            let mut f = false;
            for x in &xs {
                for y in &ys {
                    if op.holds(*x, *y) {
                        t = true;
                    } else {
                        f = true;
                    }
                }
            }
            (t, f)
        }
        Cond::Not(x) => {
            let (t, f) = eval_cond(x, s, cfg);
            (f, t)
        }
        Cond::And(a, b) => {
            let (at, af) = eval_cond(a, s, cfg);
            let (bt, bf) = eval_cond(b, s, cfg);
            (at && bt, af || bf)
        }
        Cond::Or(a, b) => {
            let (at, af) = eval_cond(a, s, cfg);
            let (bt, bf) = eval_cond(b, s, cfg);
            (at || bt, af && bf)
        }
    }
}

type Run = (Store, Vec<Step>);

#[derive(Default)]
struct Flags {
    fault: bool,
    out_of_fuel: bool,
}

fn exec(s: &Stmt, runs: BTreeSet<Run>, cfg: &ExecConfig, flags: &mut Flags) -> BTreeSet<Run> {
    if runs.is_empty() {
        return runs;
    }
    let step = |run: &Run| -> Vec<Step> {
        let mut steps = run.1.clone();
        if cfg.traces {
            steps.push(Step { loc: s.loc, before: run.0.clone() });
        }
        steps
    };
    match &s.kind {
        StmtKind::Skip => runs,
        StmtKind::Assign { var, expr } => runs
            .iter()
            .flat_map(|run| {
                let steps = step(run);
                eval_int(expr, &run.0, cfg).into_iter().map(move |v| {
                    let mut st = run.0.clone();
                    st.insert(var.clone(), v);
                    (st, steps.clone())
                })
            })
            .collect(),
        StmtKind::Event { result, callee, .. } => runs
            .iter()
            .flat_map(|run| {
                let steps = step(run);
                match result {
                    None => vec![(run.0.clone(), steps)],
                    Some(var) => cfg
                        .events
                        .get(callee)
                        .unwrap_or(&cfg.nondet)
                        .iter()
                        .map(|v| {
                            let mut st = run.0.clone();
                            st.insert(var.clone(), *v);
                            (st, steps.clone())
                        })
                        .collect(),
                }
            })
            .collect(),
        StmtKind::Assume(c) => runs.into_iter().filter(|r| eval_cond(c, &r.0, cfg).0).collect(),
        StmtKind::Fail => {
            flags.fault = true;
            BTreeSet::new()
        }
        StmtKind::Seq(items) => items.iter().fold(runs, |acc, x| exec(x, acc, cfg, flags)),
        StmtKind::If(c, a, b) => {
            let mut then_runs = BTreeSet::new();
            let mut else_runs = BTreeSet::new();
            for r in runs {
                let (t, f) = eval_cond(c, &r.0, cfg);
                if t {
                    then_runs.insert(r.clone());
                }
                if f {
                    else_runs.insert(r);
                }
            }
            let mut out = exec(a, then_runs, cfg, flags);
            out.extend(exec(b, else_runs, cfg, flags));
            out
        }
        StmtKind::While(c, body) => {
            let mut out = BTreeSet::new();
            let mut frontier = runs;
            let mut seen: BTreeSet<BTreeSet<Run>> = BTreeSet::new();
            let mut iterations = 0;
            while !frontier.is_empty() {
                let mut stay = BTreeSet::new();
                for r in frontier {
                    let (t, f) = eval_cond(c, &r.0, cfg);
                    if f {
                        out.insert(r.clone());
                    }
                    if t {
                        stay.insert(r);
                    }
                }
                if stay.is_empty() {
                    break;
                }
                // a repeated frontier never drains, so the fuel would run out
                if iterations == cfg.fuel || !seen.insert(stay.clone()) {
                    flags.out_of_fuel = true;
                    break;
                }
                iterations += 1;
                frontier = exec(body, stay, cfg, flags);
            }
            out
        }
    }
}

/// Every outcome of running `p` from `sigma`. A blocked assumption contributes nothing.
pub fn bigstep(p: &Program, sigma: &Store, cfg: &ExecConfig) -> BTreeSet<Outcome> {
    let mut flags = Flags::default();
    let runs = exec(&p.body, [(sigma.clone(), Vec::new())].into_iter().collect(), cfg, &mut flags);
    let mut out: BTreeSet<Outcome> = runs.into_iter().map(|(store, steps)| Outcome::Normal { store, steps }).collect();
    if flags.fault {
        out.insert(Outcome::Fault);
    }
    if flags.out_of_fuel {
        out.insert(Outcome::OutOfFuel);
    }
    out
}

/// Finite store space: every variable ranges over `values`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub vars: Vec<String>,
    pub values: Vec<i64>,
}

impl Domain {
    pub fn size(&self) -> usize {
        let mut n: usize = 1;
        for _ in &self.vars {
            n = n.saturating_mul(self.values.len());
        }
        n
    }

    pub fn stores(&self) -> Result<Vec<Store>> {
        let n = self.size();
        if n > MAX_STORES {
            return Err(Error::DomainTooLarge(n));
        }
        let mut out = vec![Store::new()];
        for v in &self.vars {
            out = out
                .into_iter()
                .flat_map(|s| {
                    self.values.iter().map(move |x| {
                        let mut t = s.clone();
                        t.insert(v.clone(), *x);
                        t
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConcreteVerdict {
    Refines,
    /// `rho` is `None` when `c1` goes wrong from `sigma` and `c2` does not.
    Violated { sigma: Store, rho: Option<Store> },
}

fn normal_stores(out: &BTreeSet<Outcome>) -> BTreeSet<Store> {
    out.iter().filter_map(|o| o.store().cloned()).collect()
}

/// Whether `c1` concretely refines `c2` over every store of `domain`.
pub fn concrete_refines(c1: &Program, c2: &Program, domain: &Domain, cfg: &ExecConfig) -> Result<ConcreteVerdict> {
    let cfg = ExecConfig { traces: false, ..cfg.clone() };
    for sigma in domain.stores()? {
        let r1 = normal_stores(&bigstep(c1, &sigma, &cfg));
        let r2 = normal_stores(&bigstep(c2, &sigma, &cfg));
        if r2.is_empty() {
            continue;
        }
        if r1.is_empty() {
            return Ok(ConcreteVerdict::Violated { sigma, rho: None });
        }
        if let Some(rho) = r1.difference(&r2).next() {
            return Ok(ConcreteVerdict::Violated { sigma, rho: Some(rho.clone()) });
        }
    }
    Ok(ConcreteVerdict::Refines)
}

/// Variables of a boolean program: one test each, named after the variable.
fn atom_expr(vars: &[(String, TestId)], s: &Store) -> BoolExpr {
    BoolExpr::and_all(vars.iter().map(|(v, t)| BoolExpr::lit(Literal { test: *t, positive: s.get(v).copied().unwrap_or(0) != 0 })))
}

struct Strong<'a> {
    vars: Vec<(String, TestId)>,
    states: Vec<Store>,
    table: &'a mut SymbolTable,
    cfg: &'a ExecConfig,
}

impl Strong<'_> {
    fn check_bool(&self, v: i64) -> Result<()> {
        if v == 0 || v == 1 {
            Ok(())
        } else {
            Err(Error::Invalid(format!("value {v} leaves the boolean domain")))
        }
    }

    /// `Σ_σ α(σ)·A·α(σ')` over every transition `σ → σ'` of `update`.
    fn transitions(&mut self, name: &str, update: &dyn Fn(&Store) -> Vec<Store>) -> Result<KatExpr> {
        let a = self.table.intern_action(name);
        let mut parts = Vec::new();
        for s in &self.states {
            for t in update(s) {
                for (v, _) in &self.vars {
                    self.check_bool(t.get(v).copied().unwrap_or(0))?;
                }
                parts.push(KatExpr::seq_all([
                    KatExpr::test(atom_expr(&self.vars, s)),
                    KatExpr::action(a),
                    KatExpr::test(atom_expr(&self.vars, &t)),
                ]));
            }
        }
        Ok(KatExpr::sum_all(parts))
    }

    /// States where `c` can hold (`want = true`) or fail.
    fn guard(&self, c: &Cond, want: bool) -> KatExpr {
        KatExpr::test(BoolExpr::or_all(self.states.iter().filter_map(|s| {
            let (t, f) = eval_cond(c, s, self.cfg);
            (if want { t } else { f }).then(|| atom_expr(&self.vars, s))
        })))
    }

    fn stmt(&mut self, s: &Stmt) -> Result<KatExpr> {
        let cfg = self.cfg;
        Ok(match &s.kind {
            StmtKind::Skip => KatExpr::One,
            StmtKind::Fail => KatExpr::Zero,
            StmtKind::Assume(c) => self.guard(c, true),
            StmtKind::Assign { var, expr } => {
                let update = |st: &Store| {
                    eval_int(expr, st, cfg)
                        .into_iter()
                        .map(|v| {
                            let mut t = st.clone();
                            t.insert(var.clone(), v);
                            t
                        })
                        .collect()
                };
                self.transitions(&format!("Set_{var}"), &update)?
            }
            StmtKind::Event { result, callee, .. } => {
                let values = cfg.events.get(callee).cloned().unwrap_or_else(|| cfg.nondet.clone());
                let update = |st: &Store| match result {
                    None => vec![st.clone()],
                    Some(var) => values
                        .iter()
                        .map(|v| {
                            let mut t = st.clone();
                            t.insert(var.clone(), *v);
                            t
                        })
                        .collect(),
                };
                self.transitions(&format!("Ev_{callee}"), &update)?
            }
            StmtKind::Seq(items) => {
                let mut parts = Vec::new();
                for x in items {
                    parts.push(self.stmt(x)?);
                }
                KatExpr::seq_all(parts)
            }
            StmtKind::If(c, a, b) => {
                let ka = self.stmt(a)?;
                let kb = self.stmt(b)?;
                KatExpr::sum(KatExpr::seq(self.guard(c, true), ka), KatExpr::seq(self.guard(c, false), kb))
            }
            StmtKind::While(c, body) => {
                let kb = self.stmt(body)?;
                KatExpr::seq(KatExpr::star(KatExpr::seq(self.guard(c, true), kb)), self.guard(c, false))
            }
        })
    }
}

/// The strongly valid translation of a boolean program over `vars`: each variable is a test
/// (true when nonzero), atoms are stores, and every assignment or event lists its
/// transitions explicitly. `fail` translates to 0.
pub fn strong_translate(p: &Program, vars: &[String], table: &mut SymbolTable, cfg: &ExecConfig) -> Result<KatExpr> {
    if vars.len() > MAX_TESTS {
        return Err(Error::AlphabetTooLarge(vars.len()));
    }
    let ids: Vec<(String, TestId)> = vars.iter().map(|v| (v.clone(), table.intern_test(v))).collect();
    let states = Domain { vars: vars.to_vec(), values: vec![0, 1] }.stores()?;
    let mut tr = Strong { vars: ids, states, table, cfg };
    Ok(tr.stmt(&p.body)?.normalize())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KatVerdict {
    Refines,
    /// `d` is `None` for a violation of the emptiness clause.
    Violated { b: Vec<Literal>, d: Option<Vec<Literal>> },
}

fn atoms(tests: &[TestId]) -> Vec<Vec<Literal>> {
    (0..1u32 << tests.len())
        .map(|bits| tests.iter().enumerate().map(|(i, &t)| Literal { test: t, positive: bits >> i & 1 == 1 }).collect())
        .collect()
}

fn atom_kat(a: &[Literal]) -> KatExpr {
    KatExpr::test(BoolExpr::and_all(a.iter().map(|l| BoolExpr::lit(*l))))
}

/// Decides `k1` concretely refines `k2` with `b` and `d` ranging over the atoms of the tests
/// the two expressions mention.
pub fn kat_concrete_refines(k1: &KatExpr, k2: &KatExpr) -> Result<KatVerdict> {
    let tests: Vec<TestId> = k1.tests().union(&k2.tests()).copied().collect();
    if tests.len() > MAX_TESTS {
        return Err(Error::AlphabetTooLarge(tests.len()));
    }
    let all = atoms(&tests);
    for b in &all {
        let bk1 = KatExpr::seq(atom_kat(b), k1.clone());
        let bk2 = KatExpr::seq(atom_kat(b), k2.clone());
        let dead1 = is_empty(&bk1);
        let dead2 = is_empty(&bk2);
        if dead1 && !dead2 {
            return Ok(KatVerdict::Violated { b: b.clone(), d: None });
        }
        if dead1 || dead2 {
            continue;
        }
        for d in &all {
            let reach1 = !is_empty(&KatExpr::seq(bk1.clone(), atom_kat(d)));
            if reach1 && is_empty(&KatExpr::seq(bk2.clone(), atom_kat(d))) {
                return Ok(KatVerdict::Violated { b: b.clone(), d: Some(d.clone()) });
            }
        }
    }
    Ok(KatVerdict::Refines)
}

fn find_stmt(p: &Program, loc: Location) -> Option<&Stmt> {
    let mut hit = None;
    p.body.walk(&mut |s| {
        if s.loc == loc && matches!(s.kind, StmtKind::Assign { .. } | StmtKind::Event { .. }) {
            hit = Some(s);
        }
    });
    hit
}

/// The literals `alpha` assigns to `s`, for tests whose variables `s` binds.
fn literals_at(alpha: &Abstraction, side: Side, s: &Store, cfg: &ExecConfig) -> Vec<CexElem> {
    let mut out = Vec::new();
    for t in alpha.table.test_ids() {
        let Some(atom) = alpha.atom_of(t) else { continue };
        let bound = match atom {
            CondAtom::Gt { terms, .. } | CondAtom::Ne { terms, .. } => terms.iter().all(|(v, _)| s.contains_key(v)),
            CondAtom::Opaque(_) => false,
        };
        if !bound || alpha.test_of(side, atom) != Some(t) {
            continue;
        }
        let (holds, fails) = eval_cond(&atom.to_cond(), s, cfg);
        if holds != fails {
            out.push(CexElem::Lit(Literal { test: t, positive: holds }));
        }
    }
    out
}

/// The guarded string an execution traces under `alpha`, or `None` for a non-normal outcome.
pub fn guarded_string(p: &Program, alpha: &Abstraction, outcome: &Outcome, cfg: &ExecConfig) -> Option<CexString> {
    let Outcome::Normal { store, steps } = outcome else { return None };
    let mut out = Vec::new();
    for st in steps {
        out.extend(literals_at(alpha, p.side, &st.before, cfg));
        out.push(CexElem::Act(alpha.action_of(p.side, find_stmt(p, st.loc)?)?));
    }
    out.extend(literals_at(alpha, p.side, store, cfg));
    Some(CexString(out))
}
