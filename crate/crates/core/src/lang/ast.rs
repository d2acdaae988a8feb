use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    C1,
    C2,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::C1 => Side::C2,
            Side::C2 => Side::C1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::C1 => write!(f, "C1"),
            Side::C2 => write!(f, "C2"),
        }
    }
}

/// Source position of a statement. Instrumented statements reuse their anchor's position
/// with a nonzero `sub`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub side: Side,
    pub line: u32,
    pub col: u32,
    pub sub: u32,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.line)?;
        if self.sub > 0 {
            write!(f, ".{}", self.sub)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntExpr {
    Var(String),
    Lit(i64),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Nondet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl RelOp {
    pub fn negate(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Ge,
            RelOp::Le => RelOp::Gt,
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
            RelOp::Ge => RelOp::Lt,
            RelOp::Gt => RelOp::Le,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            RelOp::Lt => a < b,
            RelOp::Le => a <= b,
            RelOp::Eq => a == b,
            RelOp::Ne => a != b,
            RelOp::Ge => a >= b,
            RelOp::Gt => a > b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cond {
    True,
    False,
    Rel(RelOp, IntExpr, IntExpr),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

impl Cond {
    pub fn not(c: Cond) -> Cond {
        match c {
            Cond::True => Cond::False,
            Cond::False => Cond::True,
            Cond::Not(inner) => *inner,
            Cond::Rel(op, a, b) => Cond::Rel(op.negate(), a, b),
            other => Cond::Not(Box::new(other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stmt {
    pub loc: Location,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StmtKind {
    Skip,
    Assign { var: String, expr: IntExpr },
    Event { result: Option<String>, callee: String, args: Vec<IntExpr> },
    Assume(Cond),
    /// Goes to the fault state.
    Fail,
    Seq(Vec<Stmt>),
    If(Cond, Box<Stmt>, Box<Stmt>),
    While(Cond, Box<Stmt>),
}

impl Stmt {
    pub fn new(loc: Location, kind: StmtKind) -> Self {
        Stmt { loc, kind }
    }

    /// Visits every statement in pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::Seq(xs) => xs.iter().for_each(|x| x.walk(f)),
            StmtKind::If(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            StmtKind::While(_, b) => b.walk(f),
            _ => {}
        }
    }

    /// Structural equality ignoring locations.
    pub fn same_shape(&self, other: &Stmt) -> bool {
        match (&self.kind, &other.kind) {
            (StmtKind::Seq(a), StmtKind::Seq(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_shape(y))
            }
            (StmtKind::If(c, a, b), StmtKind::If(d, x, y)) => c == d && a.same_shape(x) && b.same_shape(y),
            (StmtKind::While(c, a), StmtKind::While(d, b)) => c == d && a.same_shape(b),
            (a, b) => a == b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub side: Side,
    pub name: String,
    pub params: Vec<String>,
    pub body: Stmt,
}

/// Front-matter settings of a benchmark file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileConfig {
    pub direction: Option<String>,
    pub protected: Vec<String>,
    /// Which fragment plays the refining (left) role; C1 unless stated.
    pub left: Option<Side>,
    pub share_symbols: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Benchmark {
    pub config: FileConfig,
    pub c1: Program,
    pub c2: Program,
}

impl Benchmark {
    pub fn program(&self, side: Side) -> &Program {
        match side {
            Side::C1 => &self.c1,
            Side::C2 => &self.c2,
        }
    }
}
