//! Trace-refinement relations as values: the composition operators and a versioned JSON form.

use serde::{Deserialize, Serialize};

use crate::automata::{equivalent, included, Direction};
use crate::error::{Error, Result};
use crate::kat::{parse_hypothesis, parse_kat_known, HypothesisSet, KatExpr, Origin, SymbolTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefTuple {
    pub left: KatExpr,
    pub right: KatExpr,
    pub hyps: HypothesisSet,
}

impl RefTuple {
    pub fn new(left: KatExpr, right: KatExpr, hyps: HypothesisSet) -> Self {
        RefTuple { left, right, hyps }
    }
}

/// A finite set of tuples; insertion order is kept for output, duplicates are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRefinementRelation {
    pub direction: Direction,
    pub tuples: Vec<RefTuple>,
}

impl TraceRefinementRelation {
    pub fn new(direction: Direction) -> Self {
        TraceRefinementRelation { direction, tuples: Vec::new() }
    }

    pub fn from_tuples(direction: Direction, tuples: impl IntoIterator<Item = RefTuple>) -> Self {
        let mut r = Self::new(direction);
        for t in tuples {
            r.push(t);
        }
        r
    }

    /// `{(1, 1, ∅)}`, the identity of sequential composition.
    pub fn unit(direction: Direction) -> Self {
        Self::from_tuples(direction, [RefTuple::new(KatExpr::One, KatExpr::One, HypothesisSet::new())])
    }

    pub fn push(&mut self, t: RefTuple) {
        if !self.tuples.contains(&t) {
            self.tuples.push(t);
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for t in &self.tuples {
            out.push_str(&format!(
                "({}, {}, {})\n",
                t.left.display(table),
                t.right.display(table),
                t.hyps.render(table)
            ));
        }
        out
    }
}

fn same_direction(a: &TraceRefinementRelation, b: &TraceRefinementRelation) -> Result<Direction> {
    if a.direction != b.direction {
        return Err(Error::MixedDirections);
    }
    Ok(a.direction)
}

fn pairwise(
    a: &TraceRefinementRelation,
    b: &TraceRefinementRelation,
    join: fn(KatExpr, KatExpr) -> KatExpr,
) -> Result<TraceRefinementRelation> {
    let mut out = TraceRefinementRelation::new(same_direction(a, b)?);
    for x in &a.tuples {
        for y in &b.tuples {
            out.push(RefTuple::new(
                join(x.left.clone(), y.left.clone()),
                join(x.right.clone(), y.right.clone()),
                x.hyps.union(&y.hyps)?,
            ));
        }
    }
    Ok(out)
}

/// `{(l₁·m₁, l₂·m₂, A∪B)}` over all pairs.
pub fn compose_seq(a: &TraceRefinementRelation, b: &TraceRefinementRelation) -> Result<TraceRefinementRelation> {
    pairwise(a, b, KatExpr::seq)
}

/// `{(l₁+m₁, l₂+m₂, A∪B)}` over all pairs.
pub fn compose_sum(a: &TraceRefinementRelation, b: &TraceRefinementRelation) -> Result<TraceRefinementRelation> {
    pairwise(a, b, KatExpr::sum)
}

/// Plain set union, relating `k₁+l₁` to `k₂+l₂`.
pub fn compose_union(a: &TraceRefinementRelation, b: &TraceRefinementRelation) -> Result<TraceRefinementRelation> {
    let mut out = TraceRefinementRelation::new(same_direction(a, b)?);
    for t in a.tuples.iter().chain(&b.tuples) {
        out.push(t.clone());
    }
    Ok(out)
}

/// `{(o*, p*, A)}`.
pub fn compose_star(t: &TraceRefinementRelation) -> TraceRefinementRelation {
    TraceRefinementRelation::from_tuples(
        t.direction,
        t.tuples.iter().map(|x| RefTuple::new(KatExpr::star(x.left.clone()), KatExpr::star(x.right.clone()), x.hyps.clone())),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transitive {
    Defined(TraceRefinementRelation),
    /// Index into the first relation of a tuple whose right part has no partner in the second.
    Undefined { tuple: usize },
    /// Equivalence only: index into the second relation of a tuple no first tuple links to,
    /// so its right part could go uncovered.
    Unused { tuple: usize },
}

/// `{(o₁, p₂, A₁∪A₂) | p₁ ≤ o₂}`, defined when every tuple of `a` has such a partner in `b`.
/// Under equivalence the link is `p₁ ≡ o₂` and every tuple of `b` must be linked, which keeps
/// both the tuple chains and the right-hand coverage intact.
pub fn compose_trans(a: &TraceRefinementRelation, b: &TraceRefinementRelation) -> Result<Transitive> {
    let dir = same_direction(a, b)?;
    let links = |p: &KatExpr, o: &KatExpr| match dir {
        Direction::Inclusion => included(p, o),
        Direction::Equivalence => equivalent(p, o),
    };
    let mut out = TraceRefinementRelation::new(dir);
    let mut used = vec![false; b.tuples.len()];
    for (i, x) in a.tuples.iter().enumerate() {
        let mut found = false;
        for (j, y) in b.tuples.iter().enumerate() {
            if links(&x.right, &y.left) {
                found = true;
                used[j] = true;
                out.push(RefTuple::new(x.left.clone(), y.right.clone(), x.hyps.union(&y.hyps)?));
            }
        }
        if !found {
            return Ok(Transitive::Undefined { tuple: i });
        }
    }
    if dir == Direction::Equivalence {
        if let Some(j) = used.iter().position(|u| !u) {
            return Ok(Transitive::Unused { tuple: j });
        }
    }
    Ok(Transitive::Defined(out))
}

/// `{(m·r₁·l, m·r₂·l, A)}`, relating `m·k₁·l` to `m·k₂·l`.
pub fn embed_context(t: &TraceRefinementRelation, m: &KatExpr, l: &KatExpr) -> TraceRefinementRelation {
    let wrap = |r: &KatExpr| KatExpr::seq_all([m.clone(), r.clone(), l.clone()]);
    TraceRefinementRelation::from_tuples(
        t.direction,
        t.tuples.iter().map(|x| RefTuple::new(wrap(&x.left), wrap(&x.right), x.hyps.clone())),
    )
}

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolNames {
    pub actions: Vec<String>,
    pub tests: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleText {
    pub left: String,
    pub right: String,
    pub hyps: Vec<String>,
}

/// On-disk relation. Expressions and hypotheses are text over the listed symbol names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFile {
    pub version: u32,
    pub direction: Direction,
    pub symbols: SymbolNames,
    pub tuples: Vec<TupleText>,
}

impl RelationFile {
    pub fn from_relation(r: &TraceRefinementRelation, table: &SymbolTable) -> Self {
        RelationFile {
            version: FORMAT_VERSION,
            direction: r.direction,
            symbols: SymbolNames {
                actions: table.action_ids().map(|a| table.action_name(a).to_string()).collect(),
                tests: table.test_ids().map(|t| table.test_name(t).to_string()).collect(),
            },
            tuples: r
                .tuples
                .iter()
                .map(|t| TupleText {
                    left: t.left.display(table).to_string(),
                    right: t.right.display(table).to_string(),
                    hyps: t.hyps.iter().map(|h| h.render(table)).collect(),
                })
                .collect(),
        }
    }

    /// A table holding exactly the listed names, in order.
    pub fn table(&self) -> SymbolTable {
        let mut t = SymbolTable::new();
        for a in &self.symbols.actions {
            t.add_action(a, Origin::Free);
        }
        for b in &self.symbols.tests {
            t.add_test(b, Origin::Free);
        }
        t
    }

    /// Parses the tuples against `table`, which must know every name used.
    pub fn resolve(&self, table: &SymbolTable) -> Result<TraceRefinementRelation> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Invalid(format!("unsupported relation format version {}", self.version)));
        }
        let mut out = TraceRefinementRelation::new(self.direction);
        for t in &self.tuples {
            let mut hyps = HypothesisSet::new();
            let mut scratch = table.clone();
            for h in &t.hyps {
                hyps.insert(parse_hypothesis(h, &mut scratch, false)?)?;
            }
            out.push(RefTuple::new(parse_kat_known(&t.left, table)?, parse_kat_known(&t.right, table)?, hyps));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("relation files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("relation file: {e}")))
    }
}
