//! Textual KAT syntax: `+` sum, `.`/`·`/juxtaposition seq, postfix `*`, prefix `!` on tests,
//! `0`, `1`, identifiers starting uppercase are actions and lowercase are tests.
//! `Any` stands for the sum of every event action in the table.

use super::expr::{BoolExpr, KatExpr, Literal};
use super::hyp::Hypothesis;
use super::symbols::{Origin, SymbolTable};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Plus,
    Dot,
    Star,
    Bang,
    LParen,
    RParen,
    Eq,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0' => Tok::Zero,
            '1' => Tok::One,
            '+' => Tok::Plus,
            '.' | '·' | ';' => Tok::Dot,
            '*' => Tok::Star,
            '!' | '~' | '¬' => Tok::Bang,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' | '≡' => Tok::Eq,
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => {
                return Err(Error::Syntax { line: 1, col: start + 1, msg: format!("unexpected `{other}`") })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    table: &'a mut SymbolTable,
    intern: bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err(&self, msg: &str) -> Error {
        let col = self.toks.get(self.pos).map(|t| t.1 + 1).unwrap_or(0);
        Error::Syntax { line: 1, col, msg: msg.to_string() }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<KatExpr> {
        let mut items = vec![self.seq()?];
        while self.eat(&Tok::Plus) {
            items.push(self.seq()?);
        }
        Ok(KatExpr::sum_all(items))
    }

    fn starts_unary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Zero | Tok::One | Tok::LParen | Tok::Bang))
    }

    fn seq(&mut self) -> Result<KatExpr> {
        let mut items = vec![self.unary()?];
        loop {
            if self.eat(&Tok::Dot) {
                items.push(self.unary()?);
            } else if self.starts_unary() {
                items.push(self.unary()?);
            } else {
                break;
            }
        }
        Ok(KatExpr::seq_all(items))
    }

    fn unary(&mut self) -> Result<KatExpr> {
        if self.eat(&Tok::Bang) {
            let inner = self.unary()?;
            return match inner {
                KatExpr::Zero => Ok(KatExpr::One),
                KatExpr::One => Ok(KatExpr::Zero),
                KatExpr::Test(b) => Ok(KatExpr::test(BoolExpr::not(b))),
                _ => Err(self.err("negation applies only to tests")),
            };
        }
        let mut e = self.atom()?;
        while self.eat(&Tok::Star) {
            e = KatExpr::star(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<KatExpr> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Zero => Ok(KatExpr::Zero),
            Tok::One => Ok(KatExpr::One),
            Tok::LParen => {
                let e = self.sum()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Tok::Ident(name) => self.ident(&name),
            _ => {
                self.pos -= 1;
                Err(self.err("expected an expression"))
            }
        }
    }

    fn ident(&mut self, name: &str) -> Result<KatExpr> {
        if name == "Any" {
            let events: Vec<KatExpr> = self
                .table
                .action_ids()
                .filter(|&a| matches!(self.table.action(a).origin, Origin::Event { .. }))
                .map(KatExpr::Action)
                .collect();
            let all = if events.is_empty() {
                self.table.action_ids().map(KatExpr::Action).collect()
            } else {
                events
            };
            return Ok(KatExpr::sum_all(all));
        }
        let upper = name.chars().next().is_some_and(|c| c.is_uppercase());
        if upper {
            match self.table.action_by_name(name) {
                Some(a) => Ok(KatExpr::Action(a)),
                None if self.intern => Ok(KatExpr::Action(self.table.intern_action(name))),
                None => Err(Error::UnknownSymbol(name.to_string())),
            }
        } else {
            match self.table.test_by_name(name) {
                Some(t) => Ok(KatExpr::test(BoolExpr::Test(t))),
                None if self.intern => Ok(KatExpr::test(BoolExpr::Test(self.table.intern_test(name)))),
                None => Err(Error::UnknownSymbol(name.to_string())),
            }
        }
    }

    fn literal(&mut self) -> Result<Option<Literal>> {
        let neg = self.eat(&Tok::Bang);
        match self.unary()? {
            KatExpr::Test(b) => match b.as_literal() {
                Some(l) => Ok(Some(if neg { l.negate() } else { l })),
                None => Err(self.err("expected a literal")),
            },
            _ => Ok(None),
        }
    }
}

/// Parses an expression, interning unknown names as free symbols.
pub fn parse_kat(src: &str, table: &mut SymbolTable) -> Result<KatExpr> {
    parse_inner(src, table, true)
}

/// Parses an expression whose names must all already be in `table`.
pub fn parse_kat_known(src: &str, table: &SymbolTable) -> Result<KatExpr> {
    let mut copy = table.clone();
    parse_inner(src, &mut copy, false)
}

fn parse_inner(src: &str, table: &mut SymbolTable, intern: bool) -> Result<KatExpr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, table, intern };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Parses `A=1`, `b=0`, `b=1`, `A=B`, `a=!b`, `!a=b`.
pub fn parse_hypothesis(src: &str, table: &mut SymbolTable, intern: bool) -> Result<Hypothesis> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, table, intern };
    let lhs_neg = p.peek() == Some(&Tok::Bang);
    let lhs = p.unary()?;
    if !p.eat(&Tok::Eq) {
        return Err(p.err("expected `=`"));
    }
    let h = match lhs {
        KatExpr::Action(a) => match p.peek() {
            Some(Tok::One) => {
                p.pos += 1;
                Hypothesis::ActionIsSkip(a)
            }
            _ => match p.unary()? {
                KatExpr::Action(b) => Hypothesis::action_eq(a, b)?,
                _ => return Err(p.err("an action can only equal 1 or another action")),
            },
        },
        KatExpr::Test(b) => {
            let l1 = b.as_literal().ok_or_else(|| p.err("expected a literal"))?;
            match p.peek() {
                Some(Tok::Zero) | Some(Tok::One) => {
                    let v = p.peek() == Some(&Tok::One);
                    p.pos += 1;
                    Hypothesis::TestConst(l1.test, v == l1.positive)
                }
                _ => match p.literal()? {
                    Some(l2) => Hypothesis::lit_eq(l1, l2)?,
                    None => return Err(p.err("a test can only equal 0, 1 or a literal")),
                },
            }
        }
        _ => {
            let _ = lhs_neg;
            return Err(p.err("expected an action or a literal"));
        }
    };
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(h)
}
