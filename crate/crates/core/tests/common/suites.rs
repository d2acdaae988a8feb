//! Randomized suites with fixed seeds, shared by the module tests (small counts) and the
//! acceptance run (full counts). Each returns how many instances were checked and what failed.

use std::collections::BTreeSet;

use katrefine::algebra::{
    compose_seq, compose_star, compose_sum, compose_trans, compose_union, embed_context, RefTuple,
    TraceRefinementRelation, Transitive,
};
use katrefine::automata::{automaton_language, check, compile, enumerate_language, CheckResult, Direction, GuardedString};
use katrefine::kat::{kat_of_cex, CexString, Hypothesis, HypothesisSet, KatExpr, Literal, SymbolTable};
use katrefine::lang::{parse_program, Side};
use katrefine::oracle::{concrete_refines, kat_concrete_refines, strong_translate, ConcreteVerdict, Domain, ExecConfig, KatVerdict};
use katrefine::synth::verify_solution;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

use super::{alphabet, bool_program, build, program_text, runner, shape, Alphabet, Shape, VARS};

#[derive(Debug, Default)]
pub struct Report {
    pub checked: usize,
    pub failed: usize,
    /// Failures keyed by the tuple count of the first operand.
    pub by_tuples: std::collections::BTreeMap<usize, usize>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < 20 {
            self.failures.push(msg);
        } else if self.failures.len() == 20 {
            self.failures.push("...".into());
        }
    }
}

fn draw<S: Strategy>(s: &S, r: &mut TestRunner) -> S::Value {
    s.new_tree(r).expect("strategy").current()
}

fn bounded(e: &KatExpr, ab: &Alphabet, n: usize) -> BTreeSet<GuardedString> {
    enumerate_language(e, &ab.tests, n).expect("small alphabet")
}

/// The cex denotes at least one guarded string in `l1 \ l2` (same action count).
fn cex_witnessed(cex: &CexString, e1: &KatExpr, e2: &KatExpr, ab: &Alphabet) -> bool {
    let n = cex.action_count();
    let l1 = bounded(e1, ab, n);
    let l2 = bounded(e2, ab, n);
    bounded(&kat_of_cex(cex), ab, n).iter().any(|g| l1.contains(g) && !l2.contains(g))
}

/// Bounded languages from the term and from its automaton agree; `check` never contradicts
/// the bounded languages, and every counterexample it returns is a real witness.
pub fn automata_vs_enumeration(cases: usize) -> Report {
    const BOUND: usize = 4;
    let ab = alphabet(2, 3);
    let mut r = runner(cases as u32);
    let pair = (shape(2, 3, 4), shape(2, 3, 4));
    let mut rep = Report::default();
    for _ in 0..cases {
        let (s1, s2): (Shape, Shape) = draw(&pair, &mut r);
        let (e1, e2) = (build(&s1, &ab), build(&s2, &ab));
        rep.checked += 1;
        let l1 = bounded(&e1, &ab, BOUND);
        let l2 = bounded(&e2, &ab, BOUND);
        if automaton_language(&compile(&e1), &ab.tests, BOUND).expect("small alphabet") != l1 {
            rep.fail(format!("automaton language differs for {}", e1.display(&ab.table)));
            continue;
        }
        for dir in [Direction::Inclusion, Direction::Equivalence] {
            let verdict = check(&e1, &e2, &HypothesisSet::new(), dir).expect("no hypotheses");
            let ok_bounded = l1.is_subset(&l2) && (dir == Direction::Inclusion || l2.is_subset(&l1));
            match verdict {
                CheckResult::Ok if !ok_bounded => rep.fail(format!(
                    "{dir:?} accepted but bounded languages differ: {} vs {}",
                    e1.display(&ab.table),
                    e2.display(&ab.table)
                )),
                CheckResult::Ok => {}
                CheckResult::Fail(c) => {
                    if c.left_not_right.is_none() && c.right_not_left.is_none() {
                        rep.fail("failure without a counterexample".into());
                    }
                    if let Some(w) = &c.left_not_right {
                        if !cex_witnessed(w, &e1, &e2, &ab) {
                            rep.fail(format!("bogus cex {} for {}", w.render(&ab.table), e1.display(&ab.table)));
                        }
                    }
                    if let Some(w) = &c.right_not_left {
                        if !cex_witnessed(w, &e2, &e1, &ab) {
                            rep.fail(format!("bogus cex {} for {}", w.render(&ab.table), e2.display(&ab.table)));
                        }
                    }
                }
            }
        }
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Seq,
    Sum,
    Union,
    Star,
    Trans,
    Context,
}

pub const OPS: [Op; 6] = [Op::Seq, Op::Sum, Op::Union, Op::Star, Op::Trans, Op::Context];

/// A relation together with the pair it was built for.
#[derive(Clone, Debug)]
pub struct Instance {
    pub k1: KatExpr,
    pub k2: KatExpr,
    pub rel: TraceRefinementRelation,
}

/// Raw material for one instance: the left term, extra behavior for the right side, which
/// hypotheses to use, and an optional literal to split the tuples on.
#[derive(Clone, Debug)]
pub struct Recipe {
    pub left: Shape,
    pub extra: Shape,
    pub skip: Option<usize>,
    pub rename: Option<(usize, usize)>,
    pub split: Option<(usize, bool)>,
    pub drop_hyp: bool,
}

pub fn recipe() -> BoxedStrategy<Recipe> {
    (
        shape(2, 3, 3),
        shape(2, 3, 2),
        proptest::option::of(0..3usize),
        proptest::option::of((0..3usize, 0..3usize)),
        proptest::option::of((0..2usize, any::<bool>())),
        proptest::bool::weighted(0.1),
    )
        .prop_map(|(left, extra, skip, rename, split, drop_hyp)| Recipe { left, extra, skip, rename, split, drop_hyp })
        .boxed()
}

/// Builds the right side from the left so the hypotheses relate them, then splits the
/// tuples on a literal. `drop_hyp` forgets the hypotheses, which usually breaks validity.
pub fn instance(rc: &Recipe, left: KatExpr, dir: Direction, ab: &Alphabet) -> Instance {
    let mut hyps = HypothesisSet::new();
    let mut k2 = left.clone();
    if let Some((a, b)) = rc.rename.filter(|(a, b)| a != b) {
        let (from, to) = (ab.actions[a], ab.actions[b]);
        let _ = hyps.insert(Hypothesis::action_eq(from, to).expect("distinct"));
        k2 = k2.substitute(&|x| Some(if x == from { to } else { x }), &|t| katrefine::kat::BoolExpr::test(t));
    }
    if let Some(c) = rc.skip {
        let _ = hyps.insert(Hypothesis::ActionIsSkip(ab.actions[c]));
        k2 = KatExpr::seq(k2, KatExpr::action(ab.actions[c]));
    }
    if dir == Direction::Inclusion {
        k2 = KatExpr::sum(k2, build(&rc.extra, ab));
    }
    if rc.drop_hyp {
        hyps = HypothesisSet::new();
    }
    let tuples = match rc.split {
        None => vec![RefTuple::new(left.clone(), k2.clone(), hyps)],
        Some((t, p)) => [p, !p]
            .into_iter()
            .map(|pol| {
                let g = KatExpr::lit(Literal { test: ab.tests[t], positive: pol });
                RefTuple::new(KatExpr::seq(g.clone(), left.clone()), KatExpr::seq(g, k2.clone()), hyps.clone())
            })
            .collect(),
    };
    Instance { k1: left, k2: k2.clone(), rel: TraceRefinementRelation::from_tuples(dir, tuples) }
}

fn valid(i: &Instance) -> bool {
    matches!(verify_solution(&i.rel, &i.k1, &i.k2), Ok(v) if v.is_ok())
}

fn describe(i: &Instance, table: &SymbolTable) -> String {
    format!("k1 = {}, k2 = {}, T = {}", i.k1.display(table), i.k2.display(table), i.rel.render(table))
}

/// Composes valid operands and checks the result against the composed pair. Only instances
/// whose operands verify (and, for `Trans`, whose composition is defined) are counted.
pub fn composition(op: Op, wanted: usize) -> Report {
    let ab = alphabet(2, 3);
    let mut r = runner(wanted as u32);
    let input = (recipe(), recipe(), any::<bool>(), shape(2, 3, 2), shape(2, 3, 2));
    let mut rep = Report::default();
    let mut attempts = 0;
    while rep.checked < wanted && attempts < wanted * 20 {
        attempts += 1;
        let (ra, rb, eq, m, l) = draw(&input, &mut r);
        let dir = if eq { Direction::Equivalence } else { Direction::Inclusion };
        let a = instance(&ra, build(&ra.left, &ab), dir, &ab);
        // the second operand of ⊗ starts where the first one ends
        let b_left = if op == Op::Trans { a.k2.clone() } else { build(&rb.left, &ab) };
        let b = instance(&rb, b_left, dir, &ab);
        if !valid(&a) || (op != Op::Star && op != Op::Context && !valid(&b)) {
            continue;
        }
        let composed = match op {
            Op::Seq => compose_seq(&a.rel, &b.rel).map(|t| (t, KatExpr::seq(a.k1.clone(), b.k1.clone()), KatExpr::seq(a.k2.clone(), b.k2.clone()))),
            Op::Sum => compose_sum(&a.rel, &b.rel).map(|t| (t, KatExpr::sum(a.k1.clone(), b.k1.clone()), KatExpr::sum(a.k2.clone(), b.k2.clone()))),
            Op::Union => compose_union(&a.rel, &b.rel).map(|t| (t, KatExpr::sum(a.k1.clone(), b.k1.clone()), KatExpr::sum(a.k2.clone(), b.k2.clone()))),
            Op::Star => Ok((compose_star(&a.rel), KatExpr::star(a.k1.clone()), KatExpr::star(a.k2.clone()))),
            Op::Trans => match compose_trans(&a.rel, &b.rel) {
                Ok(Transitive::Defined(t)) => Ok((t, a.k1.clone(), b.k2.clone())),
                Ok(Transitive::Undefined { .. } | Transitive::Unused { .. }) => continue,
                Err(e) => Err(e),
            },
            Op::Context => {
                let (m, l) = (build(&m, &ab), build(&l, &ab));
                let wrap = |k: &KatExpr| KatExpr::seq_all([m.clone(), k.clone(), l.clone()]);
                Ok((embed_context(&a.rel, &m, &l), wrap(&a.k1), wrap(&a.k2)))
            }
        };
        // hypotheses of the two operands may contradict each other; such pairs are skipped
        let Ok((t, k1, k2)) = composed else { continue };
        rep.checked += 1;
        match verify_solution(&t, &k1, &k2) {
            Ok(v) if v.is_ok() => {}
            Ok(v) => {
                *rep.by_tuples.entry(a.rel.len()).or_default() += 1;
                rep.fail(format!("{op:?}: {v:?} for first operand {}", describe(&a, &ab.table)))
            }
            Err(_) => {}
        }
    }
    rep
}

/// Concrete refinement of two boolean programs agrees with the KAT-level definition on their
/// strongly valid translations.
pub fn concrete_vs_kat(cases: usize) -> Report {
    let mut r = runner(cases as u32);
    let input = (1..=3usize).prop_flat_map(|n| (Just(n), bool_program(n, 6), bool_program(n, 6)));
    let cfg = ExecConfig::default();
    let mut rep = Report::default();
    for _ in 0..cases {
        let (n, p1, p2) = draw(&input, &mut r);
        let vars: Vec<String> = VARS[..n].iter().map(|s| s.to_string()).collect();
        let (t1, t2) = (program_text(&p1), program_text(&p2));
        let c1 = parse_program(&t1, Side::C1).expect("generated program parses");
        let c2 = parse_program(&t2, Side::C2).expect("generated program parses");
        let domain = Domain { vars: vars.clone(), values: vec![0, 1] };
        let concrete = concrete_refines(&c1, &c2, &domain, &cfg).expect("small domain");
        let mut table = SymbolTable::new();
        let k1 = strong_translate(&c1, &vars, &mut table, &cfg).expect("boolean program");
        let k2 = strong_translate(&c2, &vars, &mut table, &cfg).expect("boolean program");
        let kat = kat_concrete_refines(&k1, &k2).expect("small alphabet");
        rep.checked += 1;
        let (a, b) = (concrete == ConcreteVerdict::Refines, kat == KatVerdict::Refines);
        if a != b {
            rep.fail(format!("concrete {concrete:?} but KAT {kat:?} for `{t1}` vs `{t2}`"));
        }
    }
    rep
}
