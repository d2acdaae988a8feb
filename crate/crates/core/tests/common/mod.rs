//! Generators shared by the integration tests: small KAT terms over a fixed alphabet and
//! random boolean programs.

#![allow(dead_code)]

use katrefine::kat::{ActionId, KatExpr, Literal, Origin, SymbolTable, TestId};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Tests `a, b, c, ...` and actions `A, B, C, ...`, interned in that order.
pub struct Alphabet {
    pub table: SymbolTable,
    pub tests: Vec<TestId>,
    pub actions: Vec<ActionId>,
}

pub fn alphabet(tests: usize, actions: usize) -> Alphabet {
    let mut table = SymbolTable::new();
    let tests = (0..tests).map(|i| table.add_test(&((b'a' + i as u8) as char).to_string(), Origin::Free)).collect();
    let actions =
        (0..actions).map(|i| table.add_action(&((b'A' + i as u8) as char).to_string(), Origin::Free)).collect();
    Alphabet { table, tests, actions }
}

/// A term over symbol indices, built into a `KatExpr` by `build`.
#[derive(Clone, Debug)]
pub enum Shape {
    Zero,
    One,
    Lit(usize, bool),
    Act(usize),
    Seq(Box<Shape>, Box<Shape>),
    Sum(Box<Shape>, Box<Shape>),
    Star(Box<Shape>),
}

/// Terms with at most `depth` nested operators.
pub fn shape(tests: usize, actions: usize, depth: u32) -> BoxedStrategy<Shape> {
    let leaf = prop_oneof![
        1 => Just(Shape::Zero),
        2 => Just(Shape::One),
        4 => (0..tests, any::<bool>()).prop_map(|(t, p)| Shape::Lit(t, p)),
        5 => (0..actions).prop_map(Shape::Act),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Shape::Seq(Box::new(a), Box::new(b))),
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Shape::Sum(Box::new(a), Box::new(b))),
            1 => inner.prop_map(|a| Shape::Star(Box::new(a))),
        ]
    })
    .boxed()
}

pub fn build(s: &Shape, ab: &Alphabet) -> KatExpr {
    match s {
        Shape::Zero => KatExpr::Zero,
        Shape::One => KatExpr::One,
        Shape::Lit(t, p) => KatExpr::lit(Literal { test: ab.tests[*t], positive: *p }),
        Shape::Act(a) => KatExpr::action(ab.actions[*a]),
        Shape::Seq(a, b) => KatExpr::seq(build(a, ab), build(b, ab)),
        Shape::Sum(a, b) => KatExpr::sum(build(a, ab), build(b, ab)),
        Shape::Star(a) => KatExpr::star(build(a, ab)),
    }
}

/// A deterministic runner for the counted suites, so case counts and inputs are fixed.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Boolean programs over the variables `x, y, z`.
pub const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug)]
pub enum BCond {
    Holds(usize),
    Clear(usize),
    And(Box<BCond>, Box<BCond>),
    Or(Box<BCond>, Box<BCond>),
    Not(Box<BCond>),
}

#[derive(Clone, Debug)]
pub enum BVal {
    Const(i64),
    Var(usize),
    Flip(usize),
    Nondet,
}

#[derive(Clone, Debug)]
pub enum BStmt {
    Skip,
    Fail,
    Event(usize),
    Set(usize, BVal),
    Assume(BCond),
    If(BCond, Vec<BStmt>, Vec<BStmt>),
    While(BCond, Vec<BStmt>),
}

impl BStmt {
    pub fn count(&self) -> usize {
        match self {
            BStmt::If(_, a, b) => 1 + count_all(a) + count_all(b),
            BStmt::While(_, b) => 1 + count_all(b),
            _ => 1,
        }
    }
}

pub fn count_all(xs: &[BStmt]) -> usize {
    xs.iter().map(BStmt::count).sum()
}

fn cond_text(c: &BCond) -> String {
    match c {
        BCond::Holds(v) => format!("{} > 0", VARS[*v]),
        BCond::Clear(v) => format!("{} == 0", VARS[*v]),
        BCond::And(a, b) => format!("({} && {})", cond_text(a), cond_text(b)),
        BCond::Or(a, b) => format!("({} || {})", cond_text(a), cond_text(b)),
        BCond::Not(a) => format!("!({})", cond_text(a)),
    }
}

fn stmt_text(s: &BStmt, out: &mut String) {
    match s {
        BStmt::Skip => out.push_str("skip; "),
        BStmt::Fail => out.push_str("fail; "),
        BStmt::Event(e) => out.push_str(&format!("ev{e}(); ")),
        BStmt::Set(v, val) => {
            let rhs = match val {
                BVal::Const(n) => n.to_string(),
                BVal::Var(w) => VARS[*w].to_string(),
                BVal::Flip(w) => format!("1 - {}", VARS[*w]),
                BVal::Nondet => "nondet()".into(),
            };
            out.push_str(&format!("{} = {rhs}; ", VARS[*v]));
        }
        BStmt::Assume(c) => out.push_str(&format!("assume({}); ", cond_text(c))),
        BStmt::If(c, a, b) => {
            out.push_str(&format!("if ({}) {{ ", cond_text(c)));
            block_text(a, out);
            out.push_str("} else { ");
            block_text(b, out);
            out.push_str("} ");
        }
        BStmt::While(c, b) => {
            out.push_str(&format!("while ({}) {{ ", cond_text(c)));
            block_text(b, out);
            out.push_str("} ");
        }
    }
}

fn block_text(xs: &[BStmt], out: &mut String) {
    for x in xs {
        stmt_text(x, out);
    }
}

/// Source text of a statement list.
pub fn program_text(xs: &[BStmt]) -> String {
    let mut s = String::new();
    block_text(xs, &mut s);
    if s.is_empty() {
        s.push_str("skip;");
    }
    s
}

fn bcond(vars: usize) -> BoxedStrategy<BCond> {
    let atom = prop_oneof![(0..vars).prop_map(BCond::Holds), (0..vars).prop_map(BCond::Clear)];
    atom.prop_recursive(1, 4, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BCond::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BCond::Or(Box::new(a), Box::new(b))),
            inner.prop_map(|a| BCond::Not(Box::new(a))),
        ]
    })
    .boxed()
}

fn bval(vars: usize) -> BoxedStrategy<BVal> {
    prop_oneof![
        (0..2i64).prop_map(BVal::Const),
        (0..vars).prop_map(BVal::Var),
        (0..vars).prop_map(BVal::Flip),
        Just(BVal::Nondet),
    ]
    .boxed()
}

fn bstmt(vars: usize) -> BoxedStrategy<BStmt> {
    let leaf = prop_oneof![
        1 => Just(BStmt::Skip),
        1 => Just(BStmt::Fail),
        1 => (0..2usize).prop_map(BStmt::Event),
        6 => (0..vars, bval(vars)).prop_map(|(v, e)| BStmt::Set(v, e)),
        2 => bcond(vars).prop_map(BStmt::Assume),
    ];
    leaf.prop_recursive(2, 6, 3, move |inner| {
        let block = proptest::collection::vec(inner, 0..3);
        prop_oneof![
            2 => (bcond(vars), block.clone(), block.clone()).prop_map(|(c, a, b)| BStmt::If(c, a, b)),
            1 => (bcond(vars), block).prop_map(|(c, b)| BStmt::While(c, b)),
        ]
    })
    .boxed()
}

/// A statement list over the first `vars` variables with at most `max` statements in total.
pub fn bool_program(vars: usize, max: usize) -> BoxedStrategy<Vec<BStmt>> {
    proptest::collection::vec(bstmt(vars), 1..=max.min(4))
        .prop_filter("statement budget", move |xs| count_all(xs) <= max)
        .boxed()
}
pub mod suites;
