use serde::{Deserialize, Serialize};

use super::expr::{BoolExpr, KatExpr, Literal};
use super::symbols::{ActionId, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CexElem {
    Lit(Literal),
    Act(ActionId),
}

impl CexElem {
    pub fn is_action(&self) -> bool {
        matches!(self, CexElem::Act(_))
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        match *self {
            CexElem::Lit(l) => l.render(table),
            CexElem::Act(a) => table.action_name(a).to_string(),
        }
    }
}

/// A concatenation of literals and actions. Literals between two actions are sorted by test id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CexString(pub Vec<CexElem>);

impl CexString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn action_count(&self) -> usize {
        self.0.iter().filter(|e| e.is_action()).count()
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|e| e.render(table)).collect::<Vec<_>>().join("·")
    }

    /// Returns `None` for expressions that are not a plain concatenation of literals and actions.
    pub fn from_kat(e: &KatExpr) -> Option<CexString> {
        fn push_test(b: &BoolExpr, out: &mut Vec<CexElem>) -> Option<()> {
            match b {
                BoolExpr::And(xs) => {
                    for x in xs {
                        out.push(CexElem::Lit(x.as_literal()?));
                    }
                    Some(())
                }
                other => {
                    out.push(CexElem::Lit(other.as_literal()?));
                    Some(())
                }
            }
        }
        let mut out = Vec::new();
        let items: Vec<&KatExpr> = match e {
            KatExpr::Seq(xs) => xs.iter().collect(),
            KatExpr::One => vec![],
            other => vec![other],
        };
        for it in items {
            match it {
                KatExpr::Action(a) => out.push(CexElem::Act(*a)),
                KatExpr::Test(b) => push_test(b, &mut out)?,
                _ => return None,
            }
        }
        Some(CexString(out))
    }
}

/// The concatenation-only expression with the same element sequence.
pub fn kat_of_cex(s: &CexString) -> KatExpr {
    KatExpr::seq_all(s.0.iter().map(|e| match *e {
        CexElem::Lit(l) => KatExpr::lit(l),
        CexElem::Act(a) => KatExpr::Action(a),
    }))
}
