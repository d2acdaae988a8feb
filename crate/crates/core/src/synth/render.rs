//! Text and JSON forms of synthesis results.

use serde::{Deserialize, Serialize};

use super::{Assumption, PartialReason, Solution, SolutionTree, SynthOutput};
use crate::algebra::RelationFile;
use crate::automata::Direction;
use crate::editdist::ScoreConfig;
use crate::kat::{Literal, SymbolTable};
use crate::lang::Side;

fn restriction_text(asms: &[Assumption]) -> String {
    if asms.is_empty() {
        "1".into()
    } else {
        asms.iter().map(Assumption::render).collect::<Vec<_>>().join(" ∧ ")
    }
}

fn literal_text(l: Literal, table: &SymbolTable) -> String {
    l.render(table)
}

fn tree_lines(t: &SolutionTree, table: &SymbolTable, rel: &str, indent: usize, out: &mut Vec<String>) {
    let pad = "  ".repeat(indent);
    match t {
        SolutionTree::Leaf(l) => out.push(format!(
            "{pad}leaf {} {rel} {} under {}",
            l.left.display(table),
            l.right.display(table),
            l.hyps.render(table)
        )),
        SolutionTree::Hyp { added, trigger, child } => {
            out.push(format!("{pad}assume {} (cex {})", added.render(table), trigger.render(table)));
            tree_lines(child, table, rel, indent + 1, out);
        }
        SolutionTree::Split { literal, left_at, right_at, trigger, pos, neg } => {
            let at: Vec<String> = left_at.iter().chain(right_at).map(|l| l.to_string()).collect();
            out.push(format!(
                "{pad}split {} at {} (cex {})",
                table.test_name(literal.test),
                at.join(", "),
                trigger.render(table)
            ));
            out.push(format!("{pad}  case {}:", literal_text(*literal, table)));
            tree_lines(pos, table, rel, indent + 2, out);
            out.push(format!("{pad}  case {}:", literal_text(literal.negate(), table)));
            tree_lines(neg, table, rel, indent + 2, out);
        }
        SolutionTree::Partial(r) => out.push(format!(
            "{pad}partial ({})",
            match r {
                PartialReason::Depth => "depth limit",
                PartialReason::Budget => "node budget",
                PartialReason::NoRepair => "no repair",
            }
        )),
    }
}

/// The tuples of one solution, one per line, in the `(restriction, restriction, hypotheses)` style.
pub fn solution_text(s: &Solution, table: &SymbolTable) -> String {
    let mut lines = Vec::new();
    for (i, t) in s.relation.tuples.iter().enumerate() {
        let (l, r) = match s.restrictions.get(i) {
            Some((l, r)) => (restriction_text(l), restriction_text(r)),
            None => ("all".to_string(), "all".to_string()),
        };
        lines.push(format!("  ({l}, {r}, {})", t.hyps.render(table)));
    }
    lines.join("\n")
}

/// Solutions count, tuple range and hypothesis range.
pub fn summary_line(out: &SynthOutput) -> String {
    if out.solutions.is_empty() {
        return "No solutions.".into();
    }
    let tuples: Vec<usize> = out.solutions.iter().map(|s| s.relation.len()).collect();
    let hyps: Vec<usize> = out.solutions.iter().map(|s| s.hypotheses().len()).collect();
    let range = |v: &[usize]| format!("{}-{}", v.iter().min().unwrap(), v.iter().max().unwrap());
    format!(
        "Solutions: {}, tuples: {}, hypotheses: {}{}",
        out.solutions.len(),
        range(&tuples),
        range(&hyps),
        if out.budget_hit { " (search budget reached)" } else { "" }
    )
}

pub fn text(out: &SynthOutput) -> String {
    let table = &out.alpha.table;
    let mut s = String::new();
    let (l, r) = (out.config.left, out.config.left.other());
    let rel = if out.config.direction == Direction::Inclusion { "≤" } else { "≡" };
    s.push_str(&format!("Refinement {l} {rel} {r}\n"));
    s.push_str(&format!("k_{l} = {}\n", out.left_expr.display(table)));
    s.push_str(&format!("k_{r} = {}\n", out.right_expr.display(table)));
    s.push_str("Symbols:\n");
    for line in table.dump().lines() {
        s.push_str(&format!("  {line}\n"));
    }
    for (i, sol) in out.solutions.iter().enumerate() {
        let status = if sol.complete {
            "complete"
        } else {
            "partial, completed with the trivial tuple"
        };
        s.push_str(&format!("Solution {} ({} tuples, {status}):\n", i + 1, sol.relation.len()));
        s.push_str(&solution_text(sol, table));
        s.push('\n');
        let mut lines = Vec::new();
        tree_lines(&sol.tree, table, rel, 2, &mut lines);
        s.push_str("  tree:\n");
        for line in lines {
            s.push_str(&line);
            s.push('\n');
        }
    }
    s.push_str(&summary_line(out));
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleRestriction {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub complete: bool,
    pub trivially_completed: bool,
    /// Parallel to `relation.tuples`; the trivial tuple has none.
    pub restrictions: Vec<TupleRestriction>,
    pub relation: RelationFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthJson {
    pub version: u32,
    pub direction: Direction,
    pub left: Side,
    pub scores: ScoreConfig,
    pub left_expr: String,
    pub right_expr: String,
    pub solutions: Vec<SolutionJson>,
}

pub fn json(out: &SynthOutput) -> SynthJson {
    let table = &out.alpha.table;
    SynthJson {
        version: crate::algebra::FORMAT_VERSION,
        direction: out.config.direction,
        left: out.config.left,
        scores: out.config.scores.clone(),
        left_expr: out.left_expr.display(table).to_string(),
        right_expr: out.right_expr.display(table).to_string(),
        solutions: out
            .solutions
            .iter()
            .map(|s| SolutionJson {
                complete: s.complete,
                trivially_completed: s.trivially_completed,
                restrictions: s
                    .restrictions
                    .iter()
                    .map(|(l, r)| TupleRestriction {
                        left: l.iter().map(Assumption::render).collect(),
                        right: r.iter().map(Assumption::render).collect(),
                    })
                    .collect(),
                relation: RelationFile::from_relation(&s.relation, table),
            })
            .collect(),
    }
}
