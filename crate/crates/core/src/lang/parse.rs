//! Recursive-descent parser for the mini language.
//!
//! A file is an optional block of `//@ key: value` lines followed by two function
//! definitions; the first is C1 and the second C2. Calls to any function other than
//! `nondet`, `assume` and `fail` are events.

use super::ast::*;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

const PUNCTS: [&str; 27] = [
    "&&", "||", "==", "!=", "<=", ">=", "++", "--", "+=", "-=", "{", "}", "(", ")", ";", ",", "=", "<", ">", "+",
    "-", "!", "*", "/", "%", "&", "|",
];

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, chars: &[char]| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, &chars);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, &chars);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                advance(&mut i, &mut line, &mut col, &chars);
            }
            if i < chars.len() {
                advance(&mut i, &mut line, &mut col, &chars);
                advance(&mut i, &mut line, &mut col, &chars);
            }
            continue;
        }
        let (tl, tc) = (line, col);
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, &chars);
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse()
                .map_err(|_| Error::Syntax { line: tl as usize, col: tc as usize, msg: "integer too large".into() })?;
            out.push(Token { tok: Tok::Int(v), line: tl, col: tc });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, &chars);
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(*p)) {
            Some(p) => {
                for _ in 0..p.len() {
                    advance(&mut i, &mut line, &mut col, &chars);
                }
                out.push(Token { tok: Tok::Punct(p), line: tl, col: tc });
            }
            None => {
                return Err(Error::Syntax { line: tl as usize, col: tc as usize, msg: format!("unexpected `{c}`") })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    side: Side,
    functions: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn loc(&self) -> Location {
        let t = &self.toks[self.pos];
        Location { side: self.side, line: t.line, col: t.col, sub: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax { line: t.line as usize, col: t.col as usize, msg: msg.into() })
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn function(&mut self, side: Side) -> Result<Program> {
        self.side = side;
        let mut names = vec![self.ident()?];
        while !self.is("(") {
            names.push(self.ident()?);
        }
        let name = names.pop().unwrap();
        self.expect("(")?;
        let mut params = Vec::new();
        while !self.eat(")") {
            let mut group = vec![self.ident()?];
            while let Tok::Ident(_) = self.peek() {
                group.push(self.ident()?);
            }
            params.push(group.pop().unwrap());
            if !self.is(")") {
                self.expect(",")?;
            }
        }
        let body = self.block()?;
        Ok(Program { side, name, params, body })
    }

    fn block(&mut self) -> Result<Stmt> {
        let loc = self.loc();
        self.expect("{")?;
        let mut items = Vec::new();
        while !self.eat("}") {
            if *self.peek() == Tok::Eof {
                return self.err("unterminated block");
            }
            let s = self.stmt()?;
            if s.kind != StmtKind::Skip {
                items.push(s);
            }
        }
        Ok(match items.len() {
            0 => Stmt::new(loc, StmtKind::Skip),
            _ => Stmt::new(loc, StmtKind::Seq(items)),
        })
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let loc = self.loc();
        if self.is("{") {
            return self.block();
        }
        if self.eat(";") {
            return Ok(Stmt::new(loc, StmtKind::Skip));
        }
        if self.is_kw("if") {
            self.pos += 1;
            self.expect("(")?;
            let c = self.cond()?;
            self.expect(")")?;
            let then = self.stmt()?;
            let els = if self.is_kw("else") {
                self.pos += 1;
                self.stmt()?
            } else {
                Stmt::new(loc, StmtKind::Skip)
            };
            return Ok(Stmt::new(loc, StmtKind::If(c, Box::new(then), Box::new(els))));
        }
        if self.is_kw("while") {
            self.pos += 1;
            self.expect("(")?;
            let c = self.cond()?;
            self.expect(")")?;
            let body = self.stmt()?;
            return Ok(Stmt::new(loc, StmtKind::While(c, Box::new(body))));
        }
        if self.is_kw("assume") {
            self.pos += 1;
            self.expect("(")?;
            let c = self.cond()?;
            self.expect(")")?;
            self.expect(";")?;
            return Ok(Stmt::new(loc, StmtKind::Assume(c)));
        }
        if self.is_kw("fail") {
            self.pos += 1;
            if self.eat("(") {
                self.expect(")")?;
            }
            self.expect(";")?;
            return Ok(Stmt::new(loc, StmtKind::Fail));
        }
        if self.is_kw("skip") {
            self.pos += 1;
            self.expect(";")?;
            return Ok(Stmt::new(loc, StmtKind::Skip));
        }
        if (self.is_kw("int") || self.is_kw("bool")) && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.pos += 1;
            let var = self.ident()?;
            if self.eat(";") {
                return Ok(Stmt::new(loc, StmtKind::Skip));
            }
            self.expect("=")?;
            let s = self.rhs(loc, var)?;
            self.expect(";")?;
            return Ok(s);
        }
        let name = self.ident()?;
        let s = if self.eat("(") {
            let args = self.args()?;
            Stmt::new(loc, StmtKind::Event { result: None, callee: name, args })
        } else if self.eat("++") {
            incr(loc, name, 1)
        } else if self.eat("--") {
            incr(loc, name, -1)
        } else if self.eat("+=") {
            let e = self.int_expr()?;
            let var = IntExpr::Var(name.clone());
            Stmt::new(loc, StmtKind::Assign { var: name, expr: IntExpr::Add(Box::new(var), Box::new(e)) })
        } else if self.eat("-=") {
            let e = self.int_expr()?;
            let var = IntExpr::Var(name.clone());
            Stmt::new(loc, StmtKind::Assign { var: name, expr: IntExpr::Sub(Box::new(var), Box::new(e)) })
        } else {
            self.expect("=")?;
            self.rhs(loc, name)?
        };
        self.expect(";")?;
        Ok(s)
    }

    fn rhs(&mut self, loc: Location, var: String) -> Result<Stmt> {
        if let (Tok::Ident(callee), Tok::Punct("(")) = (self.peek().clone(), self.peek_at(1).clone()) {
            if callee != "nondet" {
                if self.functions.contains(&callee) {
                    return self.err(format!("calls to `{callee}` are not supported"));
                }
                self.pos += 2;
                let args = self.args()?;
                return Ok(Stmt::new(loc, StmtKind::Event { result: Some(var), callee, args }));
            }
        }
        let expr = self.int_expr()?;
        Ok(Stmt::new(loc, StmtKind::Assign { var, expr }))
    }

    fn args(&mut self) -> Result<Vec<IntExpr>> {
        let mut args = Vec::new();
        while !self.eat(")") {
            args.push(self.int_expr()?);
            if !self.is(")") {
                self.expect(",")?;
            }
        }
        Ok(args)
    }

    fn cond(&mut self) -> Result<Cond> {
        let mut c = self.cond_and()?;
        while self.eat("||") {
            let r = self.cond_and()?;
            c = Cond::Or(Box::new(c), Box::new(r));
        }
        Ok(c)
    }

    fn cond_and(&mut self) -> Result<Cond> {
        let mut c = self.cond_unary()?;
        while self.eat("&&") {
            let r = self.cond_unary()?;
            c = Cond::And(Box::new(c), Box::new(r));
        }
        Ok(c)
    }

    fn cond_unary(&mut self) -> Result<Cond> {
        if self.eat("!") {
            let c = self.cond_unary()?;
            return Ok(match c {
                Cond::True => Cond::False,
                Cond::False => Cond::True,
                other => Cond::Not(Box::new(other)),
            });
        }
        if self.is("(") {
            let save = self.pos;
            self.pos += 1;
            if let Ok(c) = self.cond() {
                if self.eat(")") && !self.at_relop() && !self.is("+") && !self.is("-") {
                    return Ok(c);
                }
            }
            self.pos = save;
        }
        if (self.is_kw("true") || self.is_kw("false")) && !matches!(self.peek_at(1), Tok::Punct(p) if is_relop(p)) {
            let v = self.is_kw("true");
            self.pos += 1;
            return Ok(if v { Cond::True } else { Cond::False });
        }
        let lhs = self.int_expr()?;
        if let Tok::Punct(p) = self.peek().clone() {
            if let Some(op) = relop(p) {
                self.pos += 1;
                let rhs = self.int_expr()?;
                return Ok(Cond::Rel(op, lhs, rhs));
            }
        }
        Ok(Cond::Rel(RelOp::Ne, lhs, IntExpr::Lit(0)))
    }

    fn at_relop(&self) -> bool {
        matches!(self.peek(), Tok::Punct(p) if is_relop(p))
    }

    fn int_expr(&mut self) -> Result<IntExpr> {
        let mut e = self.int_term()?;
        loop {
            if self.eat("+") {
                let r = self.int_term()?;
                e = IntExpr::Add(Box::new(e), Box::new(r));
            } else if self.eat("-") {
                let r = self.int_term()?;
                e = IntExpr::Sub(Box::new(e), Box::new(r));
            } else {
                return Ok(e);
            }
        }
    }

    fn int_term(&mut self) -> Result<IntExpr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.pos += 1;
                Ok(IntExpr::Lit(v))
            }
            Tok::Punct("-") => {
                self.pos += 1;
                let t = self.int_term()?;
                Ok(match t {
                    IntExpr::Lit(v) => IntExpr::Lit(-v),
                    other => IntExpr::Sub(Box::new(IntExpr::Lit(0)), Box::new(other)),
                })
            }
            Tok::Punct("(") => {
                self.pos += 1;
                let e = self.int_expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match name.as_str() {
                    "true" => return Ok(IntExpr::Lit(1)),
                    "false" => return Ok(IntExpr::Lit(0)),
                    _ => {}
                }
                if self.is("(") {
                    if name == "nondet" {
                        self.pos += 1;
                        self.expect(")")?;
                        return Ok(IntExpr::Nondet);
                    }
                    self.pos -= 1;
                    return self.err("event calls may only appear as statements or assignment right-hand sides");
                }
                Ok(IntExpr::Var(name))
            }
            _ => self.err("expected an integer expression"),
        }
    }
}

fn incr(loc: Location, name: String, by: i64) -> Stmt {
    let var = Box::new(IntExpr::Var(name.clone()));
    let expr = if by > 0 { IntExpr::Add(var, Box::new(IntExpr::Lit(by))) } else { IntExpr::Sub(var, Box::new(IntExpr::Lit(-by))) };
    Stmt::new(loc, StmtKind::Assign { var: name, expr })
}

fn is_relop(p: &str) -> bool {
    relop(p).is_some()
}

fn relop(p: &str) -> Option<RelOp> {
    Some(match p {
        "<" => RelOp::Lt,
        "<=" => RelOp::Le,
        "==" => RelOp::Eq,
        "!=" => RelOp::Ne,
        ">=" => RelOp::Ge,
        ">" => RelOp::Gt,
        _ => return None,
    })
}

fn parse_config(src: &str) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (i, line) in src.lines().enumerate() {
        let Some(rest) = line.trim_start().strip_prefix("//@") else { continue };
        let (key, value) = rest
            .split_once(':')
            .ok_or(Error::Syntax { line: i + 1, col: 1, msg: "expected `key: value`".into() })?;
        let value = value.trim();
        match key.trim() {
            "direction" => cfg.direction = Some(value.to_string()),
            "protect" => {
                cfg.protected.extend(value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()))
            }
            "left" => {
                cfg.left = Some(match value {
                    "C1" => Side::C1,
                    "C2" => Side::C2,
                    _ => return Err(Error::Syntax { line: i + 1, col: 1, msg: "left must be C1 or C2".into() }),
                })
            }
            "share-symbols" => cfg.share_symbols = Some(matches!(value, "on" | "true" | "yes")),
            "name" | "category" | "expect" => {}
            other => {
                return Err(Error::Syntax { line: i + 1, col: 1, msg: format!("unknown config key `{other}`") })
            }
        }
    }
    Ok(cfg)
}

fn function_names(toks: &[Token]) -> Vec<String> {
    // a name directly followed by `(...)` and then `{` at nesting depth zero
    let mut names = Vec::new();
    let mut depth = 0i32;
    for (i, t) in toks.iter().enumerate() {
        match &t.tok {
            Tok::Punct("{") => depth += 1,
            Tok::Punct("}") => depth -= 1,
            Tok::Ident(name) if depth == 0 => {
                if let Some(Tok::Punct("(")) = toks.get(i + 1).map(|t| &t.tok) {
                    names.push(name.clone());
                }
            }
            _ => {}
        }
    }
    names
}

/// Parses a benchmark file holding two fragments.
pub fn parse_benchmark(src: &str) -> Result<Benchmark> {
    let config = parse_config(src)?;
    let toks = lex(src)?;
    let functions = function_names(&toks);
    let mut p = Parser { toks, pos: 0, side: Side::C1, functions };
    let c1 = p.function(Side::C1)?;
    let c2 = p.function(Side::C2)?;
    if *p.peek() != Tok::Eof {
        return p.err("expected end of file after two fragments");
    }
    Ok(Benchmark { config, c1, c2 })
}

/// Parses a single fragment: either a function definition or a bare statement list.
pub fn parse_program(src: &str, side: Side) -> Result<Program> {
    let toks = lex(src)?;
    let functions = function_names(&toks);
    let mut p = Parser { toks, pos: 0, side, functions };
    let is_function = matches!(p.peek(), Tok::Ident(_))
        && (1..4).any(|k| matches!(p.peek_at(k), Tok::Punct("(")))
        && p.toks.iter().any(|t| t.tok == Tok::Punct("{"))
        && !p.is_kw("if")
        && !p.is_kw("while")
        && first_call_is_definition(&p);
    if is_function {
        let prog = p.function(side)?;
        if *p.peek() != Tok::Eof {
            return p.err("expected end of input");
        }
        return Ok(prog);
    }
    let loc = p.loc();
    let mut items = Vec::new();
    while *p.peek() != Tok::Eof {
        let s = p.stmt()?;
        if s.kind != StmtKind::Skip {
            items.push(s);
        }
    }
    let body = if items.is_empty() { Stmt::new(loc, StmtKind::Skip) } else { Stmt::new(loc, StmtKind::Seq(items)) };
    Ok(Program { side, name: side.to_string(), params: vec![], body })
}

fn first_call_is_definition(p: &Parser) -> bool {
    // `name(...) {` or `type name(...) {`
    let mut k = 0;
    while matches!(p.peek_at(k), Tok::Ident(_)) {
        k += 1;
    }
    if !matches!(p.peek_at(k), Tok::Punct("(")) {
        return false;
    }
    let mut depth = 0;
    loop {
        match p.peek_at(k) {
            Tok::Punct("(") => depth += 1,
            Tok::Punct(")") => {
                depth -= 1;
                if depth == 0 {
                    return matches!(p.peek_at(k + 1), Tok::Punct("{"));
                }
            }
            Tok::Eof => return false,
            _ => {}
        }
        k += 1;
    }
}
