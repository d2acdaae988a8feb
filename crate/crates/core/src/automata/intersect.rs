use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{compile, GuardedAutomaton};
use crate::kat::{BoolExpr, KatExpr};

struct Product {
    accept: Vec<BoolExpr>,
    edges: Vec<Vec<(BoolExpr, crate::kat::ActionId, usize)>>,
}

fn product(a: &GuardedAutomaton, b: &GuardedAutomaton) -> Product {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = vec![(a.initial, b.initial)];
    index.insert((a.initial, b.initial), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (p, q) = pairs[i];
        let mut out = Vec::new();
        for (g1, x, t1) in &a.transitions[p] {
            for (g2, y, t2) in &b.transitions[q] {
                if x != y {
                    continue;
                }
                let g = BoolExpr::and(g1.clone(), g2.clone());
                if !g.is_satisfiable() {
                    continue;
                }
                let j = *index.entry((*t1, *t2)).or_insert_with(|| {
                    pairs.push((*t1, *t2));
                    queue.push_back(pairs.len() - 1);
                    pairs.len() - 1
                });
                out.push((g, *x, j));
            }
        }
        if edges.len() <= i {
            edges.resize_with(i + 1, Vec::new);
        }
        edges[i] = out;
    }
    edges.resize_with(pairs.len(), Vec::new);
    let accept = pairs
        .iter()
        .map(|&(p, q)| {
            let g = BoolExpr::and(a.accept[p].clone(), b.accept[q].clone());
            if g.is_satisfiable() {
                g
            } else {
                BoolExpr::Zero
            }
        })
        .collect();
    Product { accept, edges }
}

/// Converts an automaton to an expression by state elimination.
fn eliminate(accept: &[BoolExpr], edges: &[Vec<(BoolExpr, crate::kat::ActionId, usize)>]) -> KatExpr {
    let n = accept.len();
    // keep only states that can reach acceptance
    let mut live = vec![false; n];
    let mut changed = true;
    for q in 0..n {
        live[q] = accept[q] != BoolExpr::Zero;
    }
    while changed {
        changed = false;
        for q in 0..n {
            if !live[q] && edges[q].iter().any(|(_, _, t)| live[*t]) {
                live[q] = true;
                changed = true;
            }
        }
    }
    if !live[0] {
        return KatExpr::Zero;
    }
    let (start, fin) = (n, n + 1);
    let mut r: BTreeMap<(usize, usize), KatExpr> = BTreeMap::new();
    let add = |r: &mut BTreeMap<(usize, usize), KatExpr>, p: usize, q: usize, e: KatExpr| {
        if e == KatExpr::Zero {
            return;
        }
        let cur = r.remove(&(p, q)).unwrap_or(KatExpr::Zero);
        r.insert((p, q), KatExpr::sum(cur, e));
    };
    add(&mut r, start, 0, KatExpr::One);
    for q in (0..n).filter(|&q| live[q]) {
        add(&mut r, q, fin, KatExpr::test(accept[q].clone()));
        for (g, x, t) in &edges[q] {
            if live[*t] {
                add(&mut r, q, *t, KatExpr::seq(KatExpr::test(g.clone()), KatExpr::Action(*x)));
            }
        }
    }
    let mut remaining: BTreeSet<usize> = (0..n).filter(|&q| live[q]).collect();
    while !remaining.is_empty() {
        // cheapest state first: fewest predecessor/successor pairs
        let q = *remaining
            .iter()
            .min_by_key(|&&q| {
                let ins = r.keys().filter(|&&(_, t)| t == q).count();
                let outs = r.keys().filter(|&&(s, _)| s == q).count();
                (ins * outs, q)
            })
            .unwrap();
        remaining.remove(&q);
        let lp = r.remove(&(q, q)).map(KatExpr::star).unwrap_or(KatExpr::One);
        let ins: Vec<(usize, KatExpr)> =
            r.iter().filter(|(&(_, t), _)| t == q).map(|(&(s, _), e)| (s, e.clone())).collect();
        let outs: Vec<(usize, KatExpr)> =
            r.iter().filter(|(&(s, _), _)| s == q).map(|(&(_, t), e)| (t, e.clone())).collect();
        for (p, _) in &ins {
            r.remove(&(*p, q));
        }
        for (s, _) in &outs {
            r.remove(&(q, *s));
        }
        for (p, ein) in &ins {
            for (s, eout) in &outs {
                add(&mut r, *p, *s, KatExpr::seq_all([ein.clone(), lp.clone(), eout.clone()]));
            }
        }
    }
    r.remove(&(start, fin)).unwrap_or(KatExpr::Zero)
}

/// An expression denoting L(e1) ∩ L(e2).
pub fn intersect(e1: &KatExpr, e2: &KatExpr) -> KatExpr {
    if e1 == e2 {
        return e1.clone();
    }
    if *e1 == KatExpr::Zero || *e2 == KatExpr::Zero {
        return KatExpr::Zero;
    }
    let p = product(&compile(e1), &compile(e2));
    eliminate(&p.accept, &p.edges)
}

pub fn intersect_all<'a>(items: impl IntoIterator<Item = &'a KatExpr>) -> KatExpr {
    let mut it = items.into_iter();
    let first = match it.next() {
        Some(e) => e.clone(),
        None => return KatExpr::One,
    };
    it.fold(first, |acc, e| intersect(&acc, e))
}
