//! Boolean and KAT terms. Values are only built through the smart constructors, which keep
//! every term in a normal form: n-ary `and`/`or`/`seq`/`sum` are flattened, units and zeros
//! are absorbed, and commutative children are sorted and deduplicated.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::symbols::{ActionId, SymbolTable, TestId};

/// A possibly negated test symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub test: TestId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(test: TestId) -> Self {
        Literal { test, positive: true }
    }

    pub fn neg(test: TestId) -> Self {
        Literal { test, positive: false }
    }

    pub fn negate(self) -> Self {
        Literal { test: self.test, positive: !self.positive }
    }

    pub fn holds(self, value: bool) -> bool {
        value == self.positive
    }

    pub fn render(self, table: &SymbolTable) -> String {
        let name = table.test_name(self.test);
        if self.positive {
            name.to_string()
        } else {
            format!("!{name}")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolExpr {
    Zero,
    One,
    Test(TestId),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

fn literal_key(b: &BoolExpr) -> Option<(TestId, bool)> {
    match b {
        BoolExpr::Test(t) => Some((*t, false)),
        BoolExpr::Not(inner) => match **inner {
            BoolExpr::Test(t) => Some((t, true)),
            _ => None,
        },
        _ => None,
    }
}

/// Literals first, ordered by test id; everything else after, structurally.
fn cmp_bool(a: &BoolExpr, b: &BoolExpr) -> Ordering {
    match (literal_key(a), literal_key(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.cmp(b),
    }
}

impl BoolExpr {
    pub fn test(t: TestId) -> Self {
        BoolExpr::Test(t)
    }

    pub fn lit(l: Literal) -> Self {
        if l.positive {
            BoolExpr::Test(l.test)
        } else {
            BoolExpr::not(BoolExpr::Test(l.test))
        }
    }

    pub fn constant(v: bool) -> Self {
        if v {
            BoolExpr::One
        } else {
            BoolExpr::Zero
        }
    }

    pub fn not(x: BoolExpr) -> Self {
        match x {
            BoolExpr::Zero => BoolExpr::One,
            BoolExpr::One => BoolExpr::Zero,
            BoolExpr::Not(inner) => *inner,
            other => BoolExpr::Not(Box::new(other)),
        }
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        Self::and_all([a, b])
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        Self::or_all([a, b])
    }

    pub fn and_all(items: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut flat = Vec::new();
        for it in items {
            match it {
                BoolExpr::Zero => return BoolExpr::Zero,
                BoolExpr::One => {}
                BoolExpr::And(xs) => flat.extend(xs),
                other => flat.push(other),
            }
        }
        Self::finish(flat, true)
    }

    pub fn or_all(items: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut flat = Vec::new();
        for it in items {
            match it {
                BoolExpr::One => return BoolExpr::One,
                BoolExpr::Zero => {}
                BoolExpr::Or(xs) => flat.extend(xs),
                other => flat.push(other),
            }
        }
        Self::finish(flat, false)
    }

    fn finish(mut flat: Vec<BoolExpr>, conj: bool) -> Self {
        flat.sort_by(cmp_bool);
        flat.dedup();
        for x in &flat {
            if let BoolExpr::Not(inner) = x {
                if flat.binary_search_by(|y| cmp_bool(y, inner)).is_ok() {
                    return BoolExpr::constant(!conj);
                }
            }
        }
        match flat.len() {
            0 => BoolExpr::constant(conj),
            1 => flat.pop().unwrap(),
            _ if conj => BoolExpr::And(flat),
            _ => BoolExpr::Or(flat),
        }
    }

    pub fn eval(&self, val: &dyn Fn(TestId) -> bool) -> bool {
        match self {
            BoolExpr::Zero => false,
            BoolExpr::One => true,
            BoolExpr::Test(t) => val(*t),
            BoolExpr::Not(x) => !x.eval(val),
            BoolExpr::And(xs) => xs.iter().all(|x| x.eval(val)),
            BoolExpr::Or(xs) => xs.iter().any(|x| x.eval(val)),
        }
    }

    pub fn collect_tests(&self, out: &mut BTreeSet<TestId>) {
        match self {
            BoolExpr::Zero | BoolExpr::One => {}
            BoolExpr::Test(t) => {
                out.insert(*t);
            }
            BoolExpr::Not(x) => x.collect_tests(out),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => xs.iter().for_each(|x| x.collect_tests(out)),
        }
    }

    pub fn tests(&self) -> BTreeSet<TestId> {
        let mut s = BTreeSet::new();
        self.collect_tests(&mut s);
        s
    }

    pub fn as_literal(&self) -> Option<Literal> {
        literal_key(self).map(|(test, negated)| Literal { test, positive: !negated })
    }

    /// Brute-force satisfiability over the tests it mentions.
    pub fn is_satisfiable(&self) -> bool {
        match self {
            BoolExpr::Zero => false,
            BoolExpr::One | BoolExpr::Test(_) => true,
            _ => {
                let tests: Vec<TestId> = self.tests().into_iter().collect();
                (0u64..1 << tests.len()).any(|mask| {
                    self.eval(&|t| {
                        let i = tests.iter().position(|&x| x == t).unwrap();
                        mask >> i & 1 == 1
                    })
                })
            }
        }
    }

    /// Substitutes each test by a boolean expression.
    pub fn map_tests(&self, f: &dyn Fn(TestId) -> BoolExpr) -> BoolExpr {
        match self {
            BoolExpr::Zero => BoolExpr::Zero,
            BoolExpr::One => BoolExpr::One,
            BoolExpr::Test(t) => f(*t),
            BoolExpr::Not(x) => BoolExpr::not(x.map_tests(f)),
            BoolExpr::And(xs) => BoolExpr::and_all(xs.iter().map(|x| x.map_tests(f))),
            BoolExpr::Or(xs) => BoolExpr::or_all(xs.iter().map(|x| x.map_tests(f))),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            BoolExpr::Or(_) => 0,
            BoolExpr::And(_) => 2,
            _ => 3,
        }
    }

    pub fn fmt_with(&self, table: &SymbolTable, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            write!(f, "(")?;
        }
        match self {
            BoolExpr::Zero => write!(f, "0")?,
            BoolExpr::One => write!(f, "1")?,
            BoolExpr::Test(t) => write!(f, "{}", table.test_name(*t))?,
            BoolExpr::Not(x) => {
                write!(f, "!")?;
                x.fmt_with(table, f, 3)?;
            }
            BoolExpr::And(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "·")?;
                    }
                    x.fmt_with(table, f, 3)?;
                }
            }
            BoolExpr::Or(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    x.fmt_with(table, f, 1)?;
                }
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KatExpr {
    Zero,
    One,
    /// Never a constant; constants are `Zero`/`One`.
    Test(BoolExpr),
    Action(ActionId),
    Seq(Vec<KatExpr>),
    Sum(Vec<KatExpr>),
    Star(Box<KatExpr>),
}

impl KatExpr {
    pub fn test(b: BoolExpr) -> Self {
        match b {
            BoolExpr::Zero => KatExpr::Zero,
            BoolExpr::One => KatExpr::One,
            other => KatExpr::Test(other),
        }
    }

    pub fn lit(l: Literal) -> Self {
        KatExpr::test(BoolExpr::lit(l))
    }

    pub fn action(a: ActionId) -> Self {
        KatExpr::Action(a)
    }

    fn as_bool(&self) -> Option<BoolExpr> {
        match self {
            KatExpr::Zero => Some(BoolExpr::Zero),
            KatExpr::One => Some(BoolExpr::One),
            KatExpr::Test(b) => Some(b.clone()),
            _ => None,
        }
    }

    pub fn seq(a: KatExpr, b: KatExpr) -> Self {
        Self::seq_all([a, b])
    }

    pub fn sum(a: KatExpr, b: KatExpr) -> Self {
        Self::sum_all([a, b])
    }

    /// Flattens, drops `1`, absorbs `0`, and fuses adjacent tests into one conjunction.
    pub fn seq_all(items: impl IntoIterator<Item = KatExpr>) -> Self {
        let mut out: Vec<KatExpr> = Vec::new();
        let push = |out: &mut Vec<KatExpr>, x: KatExpr| -> bool {
            match x {
                KatExpr::One => true,
                KatExpr::Zero => false,
                KatExpr::Test(b) => {
                    if let Some(KatExpr::Test(prev)) = out.last() {
                        let merged = BoolExpr::and(prev.clone(), b);
                        out.pop();
                        match KatExpr::test(merged) {
                            KatExpr::Zero => return false,
                            KatExpr::One => {}
                            t => out.push(t),
                        }
                    } else {
                        out.push(KatExpr::Test(b));
                    }
                    true
                }
                other => {
                    out.push(other);
                    true
                }
            }
        };
        for it in items {
            let ok = match it {
                KatExpr::Seq(xs) => xs.into_iter().all(|x| push(&mut out, x)),
                other => push(&mut out, other),
            };
            if !ok {
                return KatExpr::Zero;
            }
        }
        match out.len() {
            0 => KatExpr::One,
            1 => out.pop().unwrap(),
            _ => KatExpr::Seq(out),
        }
    }

    /// Flattens, drops `0`, merges all test summands into one disjunction, sorts and dedups.
    pub fn sum_all(items: impl IntoIterator<Item = KatExpr>) -> Self {
        let mut tests: Vec<BoolExpr> = Vec::new();
        let mut rest: Vec<KatExpr> = Vec::new();
        let mut any_test = false;
        for it in items {
            let parts = match it {
                KatExpr::Sum(xs) => xs,
                other => vec![other],
            };
            for p in parts {
                match p.as_bool() {
                    Some(BoolExpr::Zero) => {}
                    Some(b) => {
                        any_test = true;
                        tests.push(b);
                    }
                    None => rest.push(p),
                }
            }
        }
        if any_test {
            let merged = KatExpr::test(BoolExpr::or_all(tests));
            if merged != KatExpr::Zero {
                rest.push(merged);
            }
        }
        rest.sort();
        rest.dedup();
        match rest.len() {
            0 => KatExpr::Zero,
            1 => rest.pop().unwrap(),
            _ => KatExpr::Sum(rest),
        }
    }

    /// `0* = 1* = b* = 1`, `(x*)* = x*`, and `(1 + x)* = x*`.
    pub fn star(e: KatExpr) -> Self {
        match e {
            KatExpr::Zero | KatExpr::One | KatExpr::Test(_) => KatExpr::One,
            KatExpr::Star(_) => e,
            KatExpr::Sum(xs) => {
                let inner = KatExpr::sum_all(xs.into_iter().filter(|x| x.as_bool().is_none()));
                match inner {
                    KatExpr::Zero | KatExpr::One => KatExpr::One,
                    KatExpr::Star(_) => inner,
                    other => KatExpr::Star(Box::new(other)),
                }
            }
            other => KatExpr::Star(Box::new(other)),
        }
    }

    /// Rebuilds the term bottom-up through the smart constructors.
    pub fn normalize(&self) -> KatExpr {
        match self {
            KatExpr::Zero => KatExpr::Zero,
            KatExpr::One => KatExpr::One,
            KatExpr::Test(b) => KatExpr::test(b.map_tests(&BoolExpr::Test)),
            KatExpr::Action(a) => KatExpr::Action(*a),
            KatExpr::Seq(xs) => KatExpr::seq_all(xs.iter().map(|x| x.normalize())),
            KatExpr::Sum(xs) => KatExpr::sum_all(xs.iter().map(|x| x.normalize())),
            KatExpr::Star(x) => KatExpr::star(x.normalize()),
        }
    }

    /// Substitutes actions (`None` = skip) and tests.
    pub fn substitute(
        &self,
        act: &dyn Fn(ActionId) -> Option<ActionId>,
        test: &dyn Fn(TestId) -> BoolExpr,
    ) -> KatExpr {
        match self {
            KatExpr::Zero => KatExpr::Zero,
            KatExpr::One => KatExpr::One,
            KatExpr::Test(b) => KatExpr::test(b.map_tests(test)),
            KatExpr::Action(a) => match act(*a) {
                Some(b) => KatExpr::Action(b),
                None => KatExpr::One,
            },
            KatExpr::Seq(xs) => KatExpr::seq_all(xs.iter().map(|x| x.substitute(act, test))),
            KatExpr::Sum(xs) => KatExpr::sum_all(xs.iter().map(|x| x.substitute(act, test))),
            KatExpr::Star(x) => KatExpr::star(x.substitute(act, test)),
        }
    }

    pub fn collect(&self, actions: &mut BTreeSet<ActionId>, tests: &mut BTreeSet<TestId>) {
        match self {
            KatExpr::Zero | KatExpr::One => {}
            KatExpr::Test(b) => b.collect_tests(tests),
            KatExpr::Action(a) => {
                actions.insert(*a);
            }
            KatExpr::Seq(xs) | KatExpr::Sum(xs) => xs.iter().for_each(|x| x.collect(actions, tests)),
            KatExpr::Star(x) => x.collect(actions, tests),
        }
    }

    pub fn actions(&self) -> BTreeSet<ActionId> {
        let (mut a, mut t) = (BTreeSet::new(), BTreeSet::new());
        self.collect(&mut a, &mut t);
        a
    }

    pub fn tests(&self) -> BTreeSet<TestId> {
        let (mut a, mut t) = (BTreeSet::new(), BTreeSet::new());
        self.collect(&mut a, &mut t);
        t
    }

    /// Number of nodes, used to bound random generation and report sizes.
    pub fn size(&self) -> usize {
        match self {
            KatExpr::Zero | KatExpr::One | KatExpr::Test(_) | KatExpr::Action(_) => 1,
            KatExpr::Seq(xs) | KatExpr::Sum(xs) => 1 + xs.iter().map(|x| x.size()).sum::<usize>(),
            KatExpr::Star(x) => 1 + x.size(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            KatExpr::Sum(_) => 0,
            KatExpr::Seq(_) => 1,
            KatExpr::Test(b) => b.prec(),
            _ => 3,
        }
    }

    fn fmt_with(&self, table: &SymbolTable, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        if let KatExpr::Test(b) = self {
            return b.fmt_with(table, f, ctx);
        }
        let paren = self.prec() < ctx;
        if paren {
            write!(f, "(")?;
        }
        match self {
            KatExpr::Zero => write!(f, "0")?,
            KatExpr::One => write!(f, "1")?,
            KatExpr::Test(_) => unreachable!(),
            KatExpr::Action(a) => write!(f, "{}", table.action_name(*a))?,
            KatExpr::Seq(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "·")?;
                    }
                    x.fmt_with(table, f, 2)?;
                }
            }
            KatExpr::Sum(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    x.fmt_with(table, f, 1)?;
                }
            }
            KatExpr::Star(x) => {
                x.fmt_with(table, f, 3)?;
                write!(f, "*")?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> Shown<'a> {
        Shown { expr: self, table }
    }
}

/// Display adapter binding a term to its symbol table.
pub struct Shown<'a> {
    expr: &'a KatExpr,
    table: &'a SymbolTable,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt_with(self.table, f, 0)
    }
}

pub struct ShownBool<'a> {
    expr: &'a BoolExpr,
    table: &'a SymbolTable,
}

impl BoolExpr {
    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> ShownBool<'a> {
        ShownBool { expr: self, table }
    }
}

impl fmt::Display for ShownBool<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt_with(self.table, f, 0)
    }
}
