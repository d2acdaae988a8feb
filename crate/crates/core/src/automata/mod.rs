//! Guarded-string automata built from partial derivatives, with inclusion checking,
//! intersection and a bounded enumeration oracle.

mod check;
mod enumerate;
mod intersect;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::kat::{ActionId, BoolExpr, KatExpr, SymbolTable, TestId};

pub use check::{
    check, equivalent, extract_cex, find_difference, included, is_empty, CheckResult, Counterexamples, Direction,
};
pub use enumerate::{automaton_language, enumerate_language, GuardedString};
pub use intersect::{intersect, intersect_all};

/// The output test of `e`: the atoms accepted without performing an action.
pub fn accept_guard(e: &KatExpr) -> BoolExpr {
    match e {
        KatExpr::Zero | KatExpr::Action(_) => BoolExpr::Zero,
        KatExpr::One | KatExpr::Star(_) => BoolExpr::One,
        KatExpr::Test(b) => b.clone(),
        KatExpr::Seq(xs) => BoolExpr::and_all(xs.iter().map(accept_guard)),
        KatExpr::Sum(xs) => BoolExpr::or_all(xs.iter().map(accept_guard)),
    }
}

/// Symbolic partial derivatives: `(guard, action, residual)` with guards merged per target.
pub fn derivatives(e: &KatExpr) -> Vec<(BoolExpr, ActionId, KatExpr)> {
    let mut raw = Vec::new();
    raw_derivatives(e, &mut raw);
    let mut merged: BTreeMap<(ActionId, KatExpr), BoolExpr> = BTreeMap::new();
    for (g, a, t) in raw {
        if g == BoolExpr::Zero || t == KatExpr::Zero {
            continue;
        }
        let entry = merged.entry((a, t)).or_insert(BoolExpr::Zero);
        *entry = BoolExpr::or(entry.clone(), g);
    }
    merged
        .into_iter()
        .filter(|(_, g)| g.is_satisfiable())
        .map(|((a, t), g)| (g, a, t))
        .collect()
}

fn raw_derivatives(e: &KatExpr, out: &mut Vec<(BoolExpr, ActionId, KatExpr)>) {
    match e {
        KatExpr::Zero | KatExpr::One | KatExpr::Test(_) => {}
        KatExpr::Action(a) => out.push((BoolExpr::One, *a, KatExpr::One)),
        KatExpr::Sum(xs) => xs.iter().for_each(|x| raw_derivatives(x, out)),
        KatExpr::Seq(xs) => {
            let mut prefix = BoolExpr::One;
            for (i, x) in xs.iter().enumerate() {
                let rest = &xs[i + 1..];
                let mut local = Vec::new();
                raw_derivatives(x, &mut local);
                for (g, a, t) in local {
                    let tail = KatExpr::seq_all(std::iter::once(t).chain(rest.iter().cloned()));
                    out.push((BoolExpr::and(prefix.clone(), g), a, tail));
                }
                prefix = BoolExpr::and(prefix, accept_guard(x));
                if prefix == BoolExpr::Zero {
                    break;
                }
            }
        }
        KatExpr::Star(x) => {
            let mut local = Vec::new();
            raw_derivatives(x, &mut local);
            for (g, a, t) in local {
                out.push((g, a, KatExpr::seq(t, e.clone())));
            }
        }
    }
}

/// Nondeterministic automaton whose states are partial derivatives of the source term.
#[derive(Clone, Debug)]
pub struct GuardedAutomaton {
    pub states: Vec<KatExpr>,
    pub initial: usize,
    pub accept: Vec<BoolExpr>,
    pub transitions: Vec<Vec<(BoolExpr, ActionId, usize)>>,
    /// Tests mentioned by each state's accept guard and outgoing guards.
    pub state_tests: Vec<BTreeSet<TestId>>,
}

pub fn compile(e: &KatExpr) -> GuardedAutomaton {
    let mut index: HashMap<KatExpr, usize> = HashMap::new();
    let mut ga = GuardedAutomaton {
        states: vec![e.clone()],
        initial: 0,
        accept: Vec::new(),
        transitions: Vec::new(),
        state_tests: Vec::new(),
    };
    index.insert(e.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut trans: Vec<Option<Vec<(BoolExpr, ActionId, usize)>>> = vec![None];
    while let Some(q) = queue.pop_front() {
        let st = ga.states[q].clone();
        let mut out = Vec::new();
        for (g, a, t) in derivatives(&st) {
            let id = match index.get(&t) {
                Some(&id) => id,
                None => {
                    let id = ga.states.len();
                    index.insert(t.clone(), id);
                    ga.states.push(t);
                    trans.push(None);
                    queue.push_back(id);
                    id
                }
            };
            out.push((g, a, id));
        }
        trans[q] = Some(out);
    }
    ga.transitions = trans.into_iter().map(|t| t.unwrap_or_default()).collect();
    ga.accept = ga.states.iter().map(accept_guard).collect();
    ga.state_tests = (0..ga.states.len())
        .map(|q| {
            let mut s = ga.accept[q].tests();
            for (g, _, _) in &ga.transitions[q] {
                g.collect_tests(&mut s);
            }
            s
        })
        .collect();
    ga
}

impl GuardedAutomaton {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Line-oriented dump: one `state` line, then one `  -[guard] ACTION-> target` per edge.
    pub fn dump(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for q in 0..self.states.len() {
            let mark = if q == self.initial { " (initial)" } else { "" };
            let _ = writeln!(
                out,
                "state {q}{mark} accept [{}] term {}",
                self.accept[q].display(table),
                self.states[q].display(table)
            );
            for (g, a, t) in &self.transitions[q] {
                let _ = writeln!(out, "  -[{}] {}-> {t}", g.display(table), table.action_name(*a));
            }
        }
        out
    }
}

/// Three-valued evaluation under a partial assignment.
pub(crate) fn eval3(b: &BoolExpr, val: &dyn Fn(TestId) -> Option<bool>) -> Option<bool> {
    match b {
        BoolExpr::Zero => Some(false),
        BoolExpr::One => Some(true),
        BoolExpr::Test(t) => val(*t),
        BoolExpr::Not(x) => eval3(x, val).map(|v| !v),
        BoolExpr::And(xs) => {
            let mut unknown = false;
            for x in xs {
                match eval3(x, val) {
                    Some(false) => return Some(false),
                    None => unknown = true,
                    Some(true) => {}
                }
            }
            if unknown {
                None
            } else {
                Some(true)
            }
        }
        BoolExpr::Or(xs) => {
            let mut unknown = false;
            for x in xs {
                match eval3(x, val) {
                    Some(true) => return Some(true),
                    None => unknown = true,
                    Some(false) => {}
                }
            }
            if unknown {
                None
            } else {
                Some(false)
            }
        }
    }
}
