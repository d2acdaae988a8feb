//! Canonical pretty printer; its output re-parses to the same tree shape.

use std::fmt::Write;

use super::ast::*;

pub fn int_expr(e: &IntExpr) -> String {
    match e {
        IntExpr::Var(v) => v.clone(),
        IntExpr::Lit(n) => n.to_string(),
        IntExpr::Nondet => "nondet()".into(),
        IntExpr::Add(a, b) => format!("{} + {}", int_expr(a), operand(b)),
        IntExpr::Sub(a, b) => format!("{} - {}", int_expr(a), operand(b)),
    }
}

fn operand(e: &IntExpr) -> String {
    match e {
        IntExpr::Add(..) | IntExpr::Sub(..) => format!("({})", int_expr(e)),
        IntExpr::Lit(n) if *n < 0 => format!("({n})"),
        _ => int_expr(e),
    }
}

pub fn cond(c: &Cond) -> String {
    cond_prec(c, 0)
}

// precedence: || = 0, && = 1, unary = 2
fn cond_prec(c: &Cond, ctx: u8) -> String {
    let (s, p) = match c {
        Cond::True => ("true".to_string(), 2),
        Cond::False => ("false".to_string(), 2),
        Cond::Rel(op, a, b) => (format!("{} {} {}", int_expr(a), op.symbol(), int_expr(b)), 2),
        Cond::Not(x) => (format!("!({})", cond_prec(x, 0)), 2),
        Cond::And(a, b) => (format!("{} && {}", cond_prec(a, 1), cond_prec(b, 2)), 1),
        Cond::Or(a, b) => (format!("{} || {}", cond_prec(a, 0), cond_prec(b, 1)), 0),
    };
    if p < ctx {
        format!("({s})")
    } else {
        s
    }
}

/// One-line rendering of a simple statement, as used for action symbol origins.
pub fn stmt_head(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Skip => "skip;".into(),
        StmtKind::Assign { var, expr } => format!("{var} = {};", int_expr(expr)),
        StmtKind::Event { result, callee, args } => {
            let args: Vec<String> = args.iter().map(int_expr).collect();
            match result {
                Some(r) => format!("{r} = {callee}({});", args.join(", ")),
                None => format!("{callee}({});", args.join(", ")),
            }
        }
        StmtKind::Assume(c) => format!("assume({});", cond(c)),
        StmtKind::Fail => "fail();".into(),
        StmtKind::Seq(_) => "{ ... }".into(),
        StmtKind::If(c, _, _) => format!("if ({})", cond(c)),
        StmtKind::While(c, _) => format!("while ({})", cond(c)),
    }
}

fn block(out: &mut String, s: &Stmt, depth: usize) {
    out.push_str("{\n");
    match &s.kind {
        StmtKind::Seq(items) => items.iter().for_each(|x| stmt(out, x, depth + 1)),
        StmtKind::Skip => {}
        _ => stmt(out, s, depth + 1),
    }
    let _ = write!(out, "{}}}", "    ".repeat(depth));
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = "    ".repeat(depth);
    match &s.kind {
        StmtKind::Seq(_) => {
            out.push_str(&pad);
            block(out, s, depth);
            out.push('\n');
        }
        StmtKind::If(c, t, e) => {
            let _ = write!(out, "{pad}if ({}) ", cond(c));
            block(out, t, depth);
            if e.kind != StmtKind::Skip {
                out.push_str(" else ");
                block(out, e, depth);
            }
            out.push('\n');
        }
        StmtKind::While(c, b) => {
            let _ = write!(out, "{pad}while ({}) ", cond(c));
            block(out, b, depth);
            out.push('\n');
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", stmt_head(s));
        }
    }
}

pub fn program(p: &Program) -> String {
    let mut out = format!("void {}({}) ", p.name, p.params.iter().map(|x| format!("int {x}")).collect::<Vec<_>>().join(", "));
    block(&mut out, &p.body, 0);
    out.push('\n');
    out
}

/// Both fragments plus the front-matter lines that differ from the defaults.
pub fn benchmark(b: &Benchmark) -> String {
    let mut out = String::new();
    if let Some(d) = &b.config.direction {
        let _ = writeln!(out, "//@ direction: {d}");
    }
    if !b.config.protected.is_empty() {
        let _ = writeln!(out, "//@ protect: {}", b.config.protected.join(", "));
    }
    if let Some(side) = b.config.left {
        let _ = writeln!(out, "//@ left: {side}");
    }
    if let Some(share) = b.config.share_symbols {
        let _ = writeln!(out, "//@ share-symbols: {}", if share { "on" } else { "off" });
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str(&program(&b.c1));
    out.push('\n');
    out.push_str(&program(&b.c2));
    out
}
