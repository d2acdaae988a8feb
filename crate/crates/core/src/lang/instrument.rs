//! Inserting located `assume` statements.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use crate::error::{Error, Result};

type Key = (Side, u32, u32);

fn key(l: &Location) -> Key {
    (l.side, l.line, l.col)
}

/// Inserts `assume(c)` right before the statement at each location, or at the head of the
/// body when the location is a loop or a block. Re-inserting an existing pair is a no-op.
pub fn instrument(p: &Program, asms: &[(Location, Cond)]) -> Result<Program> {
    if asms.is_empty() {
        return Ok(p.clone());
    }
    let mut known = BTreeSet::new();
    let mut next_sub: BTreeMap<Key, u32> = BTreeMap::new();
    p.body.walk(&mut |s| {
        known.insert(s.loc);
        let e = next_sub.entry(key(&s.loc)).or_insert(1);
        *e = (*e).max(s.loc.sub + 1);
    });
    let mut wanted: BTreeMap<Location, Vec<&Cond>> = BTreeMap::new();
    for (loc, c) in asms {
        if !known.contains(loc) {
            return Err(Error::UnknownLocation(loc.to_string()));
        }
        let v = wanted.entry(*loc).or_default();
        if !v.contains(&c) {
            v.push(c);
        }
    }
    let mut body = p.body.clone();
    rewrite(&mut body, &wanted, &mut next_sub, true);
    Ok(Program { body, ..p.clone() })
}

/// The assumes already sitting directly in front of position `i` that belong to `anchor`.
fn present(items: &[Stmt], i: usize, anchor: &Location) -> Vec<Cond> {
    let mut out = Vec::new();
    let mut j = i;
    while j > 0 {
        j -= 1;
        match &items[j].kind {
            StmtKind::Assume(c) if items[j].loc.sub > 0 && key(&items[j].loc) == key(anchor) => out.push(c.clone()),
            _ => break,
        }
    }
    out
}

fn fresh(anchor: &Location, next_sub: &mut BTreeMap<Key, u32>) -> Location {
    let n = next_sub.entry(key(anchor)).or_insert(1);
    let loc = Location { sub: *n, ..*anchor };
    *n += 1;
    loc
}

fn prepend(target: &mut Stmt, anchor: &Location, conds: &[&Cond], next_sub: &mut BTreeMap<Key, u32>) {
    let mut items = match std::mem::replace(&mut target.kind, StmtKind::Skip) {
        StmtKind::Seq(items) => items,
        StmtKind::Skip => vec![],
        other => vec![Stmt { loc: target.loc, kind: other }],
    };
    let mut have: Vec<Cond> = Vec::new();
    for s in &items {
        match &s.kind {
            StmtKind::Assume(c) if s.loc.sub > 0 && key(&s.loc) == key(anchor) => have.push(c.clone()),
            _ => break,
        }
    }
    let mut at = have.len();
    for c in conds {
        if !have.contains(c) {
            items.insert(at, Stmt::new(fresh(anchor, next_sub), StmtKind::Assume((*c).clone())));
            at += 1;
        }
    }
    target.kind = StmtKind::Seq(items);
}

fn rewrite(s: &mut Stmt, wanted: &BTreeMap<Location, Vec<&Cond>>, next_sub: &mut BTreeMap<Key, u32>, top: bool) {
    let loc = s.loc;
    match &mut s.kind {
        StmtKind::Seq(items) => {
            let mut i = 0;
            while i < items.len() {
                let target = items[i].loc;
                let is_container = matches!(items[i].kind, StmtKind::While(..) | StmtKind::Seq(_));
                if !is_container {
                    if let Some(conds) = wanted.get(&target) {
                        let have = present(items, i, &target);
                        for c in conds {
                            if !have.contains(c) {
                                items.insert(i, Stmt::new(fresh(&target, next_sub), StmtKind::Assume((*c).clone())));
                                i += 1;
                            }
                        }
                    }
                }
                rewrite(&mut items[i], wanted, next_sub, false);
                i += 1;
            }
            if let Some(conds) = wanted.get(&loc) {
                prepend(s, &loc, conds, next_sub);
            }
        }
        StmtKind::If(_, a, b) => {
            rewrite_child(a, wanted, next_sub);
            rewrite_child(b, wanted, next_sub);
        }
        StmtKind::While(_, body) => {
            rewrite_child(body, wanted, next_sub);
            if let Some(conds) = wanted.get(&loc) {
                prepend(body, &loc, conds, next_sub);
            }
        }
        _ => {
            if top {
                if let Some(conds) = wanted.get(&loc) {
                    let mut wrapper = Stmt::new(loc, StmtKind::Seq(vec![s.clone()]));
                    wrap_before(&mut wrapper, &loc, conds, next_sub);
                    *s = wrapper;
                }
            }
        }
    }
}

fn wrap_before(wrapper: &mut Stmt, anchor: &Location, conds: &[&Cond], next_sub: &mut BTreeMap<Key, u32>) {
    if let StmtKind::Seq(items) = &mut wrapper.kind {
        for (k, c) in conds.iter().enumerate() {
            items.insert(k, Stmt::new(fresh(anchor, next_sub), StmtKind::Assume((*c).clone())));
        }
    }
}

/// A branch or loop body that is a single statement gets wrapped in a block so that
/// assumes can sit in front of it.
fn rewrite_child(child: &mut Stmt, wanted: &BTreeMap<Location, Vec<&Cond>>, next_sub: &mut BTreeMap<Key, u32>) {
    let container = matches!(child.kind, StmtKind::Seq(_) | StmtKind::While(..));
    if !container && wanted.contains_key(&child.loc) {
        let loc = child.loc;
        *child = Stmt::new(Location { col: 0, sub: 0, ..loc }, StmtKind::Seq(vec![child.clone()]));
    }
    rewrite(child, wanted, next_sub, false);
}
