//! Kleene algebra with tests: symbols, terms, hypotheses and counterexample strings.

mod cex;
mod expr;
mod hyp;
mod parse;
mod symbols;

pub use cex::{kat_of_cex, CexElem, CexString};
pub use expr::{BoolExpr, KatExpr, Literal, Shown};
pub use hyp::{rewrite_under_hypotheses, Hypothesis, HypothesisSet, Substitution};
pub use parse::{parse_hypothesis, parse_kat, parse_kat_known};
pub use symbols::{ActionId, Origin, SymbolInfo, SymbolKind, SymbolTable, TestId};
