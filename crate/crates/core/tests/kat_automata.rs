//! KAT terms, hypotheses and the automata layer, checked against the bounded-enumeration
//! oracle and the worked examples.

mod common;

use std::collections::BTreeSet;

use katrefine::automata::{
    automaton_language, check, compile, enumerate_language, extract_cex, included, intersect, CheckResult, Direction,
    GuardedString,
};
use katrefine::kat::{
    kat_of_cex, parse_hypothesis, parse_kat, rewrite_under_hypotheses, BoolExpr, CexString, Hypothesis, HypothesisSet,
    KatExpr, Literal, SymbolTable,
};
use proptest::prelude::*;

use common::suites::automata_vs_enumeration;
use common::{alphabet, build, shape, Alphabet};

fn kat(src: &str, t: &mut SymbolTable) -> KatExpr {
    parse_kat(src, t).unwrap()
}

fn hyps(srcs: &[&str], t: &mut SymbolTable) -> HypothesisSet {
    let mut h = HypothesisSet::new();
    for s in srcs {
        h.insert(parse_hypothesis(s, t, true).unwrap()).unwrap();
    }
    h
}

fn shown(e: &KatExpr, t: &SymbolTable) -> String {
    e.display(t).to_string()
}

fn equiv(a: &KatExpr, b: &KatExpr) -> bool {
    check(a, b, &HypothesisSet::new(), Direction::Equivalence).unwrap().is_ok()
}

// The two fragments of the running example, with the restricted classes of traces.
const K1: &str = "(a·(E·(b·O + !b)·(c·C·S·(b·L + !b) + !c)·X))*·!a";
const K2: &str = "(a·(E·(c·K·(d·C·S + !d) + !c·O)·X))*·!a";
const EQN1: &str = "(a·(E·(c·C·S)·X))*·!a";
const EQN2: &str = "(a·(E·(c·K·C·S)·X))*·!a";

#[test]
fn skip_hypothesis_substitutes_one() {
    let mut t = SymbolTable::new();
    let e = kat("a·M·(b·F + !b·G)", &mut t);
    let h = hyps(&["F=1"], &mut t);
    let r = rewrite_under_hypotheses(&e, &h).unwrap();
    assert!(equiv(&r, &kat("a·M·(b + !b·G)", &mut t)));
}

#[test]
fn ignoring_the_check_event_collapses_it() {
    let mut t = SymbolTable::new();
    let e = kat("K·C·S", &mut t);
    let h = hyps(&["K=1"], &mut t);
    assert_eq!(shown(&rewrite_under_hypotheses(&e, &h).unwrap(), &t), "C·S");
}

#[test]
fn empty_hypotheses_are_the_identity() {
    let mut t = SymbolTable::new();
    let e = kat("(b·O + !b·1)*", &mut t);
    assert_eq!(rewrite_under_hypotheses(&e, &HypothesisSet::new()).unwrap(), e);
}

#[test]
fn contradictory_constants_are_rejected() {
    let mut t = SymbolTable::new();
    let mut h = hyps(&["b=0"], &mut t);
    assert!(h.insert(parse_hypothesis("b=1", &mut t, true).unwrap()).is_err());
}

#[test]
fn negated_literal_equations_keep_polarity() {
    let mut t = SymbolTable::new();
    let e = kat("b·P + !b·Q", &mut t);
    let _ = kat("a", &mut t);
    // with b ≡ !a the guard flips onto a
    let h = hyps(&["a=!b"], &mut t);
    let r = rewrite_under_hypotheses(&e, &h).unwrap();
    assert!(equiv(&r, &kat("!a·P + a·Q", &mut t)) || equiv(&r, &kat("b·P + !b·Q", &mut t)));
    assert!(check(&e, &kat("!a·P + a·Q", &mut t), &h, Direction::Equivalence).unwrap().is_ok());
}

#[test]
fn cex_strings_round_trip() {
    let mut t = SymbolTable::new();
    for src in ["a·M·b·F", "E", "a·E·!b·!c·X·!a"] {
        let e = kat(src, &mut t);
        let s = CexString::from_kat(&e).unwrap();
        assert_eq!(s.render(&t), src);
        assert_eq!(kat_of_cex(&s), e);
    }
    let w1 = CexString::from_kat(&kat("a·E·!b·!c·X·!a", &mut t)).unwrap();
    assert_eq!(w1.len(), 6);
    assert_eq!(w1.action_count(), 2);
}

#[test]
fn empty_language_automaton() {
    let ab = alphabet(1, 1);
    assert!(automaton_language(&compile(&KatExpr::Zero), &ab.tests, 3).unwrap().is_empty());
}

#[test]
fn single_action_language() {
    let ab = alphabet(1, 1);
    let e = KatExpr::action(ab.actions[0]);
    let got = automaton_language(&compile(&e), &ab.tests, 3).unwrap();
    let want: BTreeSet<GuardedString> = (0..2u32)
        .flat_map(|a| (0..2u32).map(move |b| (a, b)))
        .map(|(a, b)| GuardedString { atoms: vec![a, b], actions: vec![ab.actions[0]] })
        .collect();
    assert_eq!(got, want);
}

#[test]
fn guarded_loop_matches_enumeration() {
    let ab = alphabet(1, 1);
    let b = Literal::pos(ab.tests[0]);
    let e = KatExpr::star(KatExpr::sum(
        KatExpr::seq(KatExpr::lit(b), KatExpr::action(ab.actions[0])),
        KatExpr::lit(b.negate()),
    ));
    assert_eq!(
        automaton_language(&compile(&e), &ab.tests, 3).unwrap(),
        enumerate_language(&e, &ab.tests, 3).unwrap()
    );
}

#[test]
fn enumeration_basics() {
    let ab = alphabet(1, 1);
    let ones = enumerate_language(&KatExpr::One, &ab.tests, 0).unwrap();
    assert_eq!(ones.len(), 2);
    let e = KatExpr::seq(KatExpr::lit(Literal::pos(ab.tests[0])), KatExpr::action(ab.actions[0]));
    let got = enumerate_language(&e, &ab.tests, 1).unwrap();
    assert_eq!(got.len(), 2);
    assert!(got.iter().all(|g| g.atoms[0] == 1 && g.actions == vec![ab.actions[0]]));
    let wide = alphabet(7, 1);
    assert!(enumerate_language(&KatExpr::One, &wide.tests, 1).is_err());
}

#[test]
fn katdiff_worked_example() {
    let mut t = SymbolTable::new();
    let k1 = kat("a·M·(b·F + !b·G)", &mut t);
    let k2 = kat("a·M·!b·G", &mut t);
    let CheckResult::Fail(c) = check(&k1, &k2, &HypothesisSet::new(), Direction::Inclusion).unwrap() else {
        panic!("inclusion should fail")
    };
    assert_eq!(c.left_not_right.unwrap().render(&t), "a·M·b·F");
    assert_eq!(extract_cex(&compile(&k1), &compile(&k2)).unwrap().render(&t), "a·M·b·F");
    assert!(extract_cex(&compile(&k1), &compile(&k1)).is_none());
}

#[test]
fn reflexive_checks_pass_under_any_hypotheses() {
    let mut t = SymbolTable::new();
    let k1 = kat(K1, &mut t);
    for h in [vec![], vec!["O=1"], vec!["C=S", "b=0"]] {
        let h = hyps(&h, &mut t);
        assert!(check(&k1, &k1, &h, Direction::Equivalence).unwrap().is_ok());
    }
}

#[test]
fn running_example_classes_agree_once_the_check_is_ignored() {
    let mut t = SymbolTable::new();
    let (k1, k2, e1, e2) = (kat(K1, &mut t), kat(K2, &mut t), kat(EQN1, &mut t), kat(EQN2, &mut t));
    // the classes are the traces without logging, with valid messages and a passing check
    let quiet = kat("(!b·c·d·(E + O + C + S + L + X + K))*·!b·c·d", &mut t);
    assert!(included(&intersect(&e1, &quiet), &k1));
    assert!(included(&intersect(&e2, &quiet), &k2));
    assert!(!check(&e1, &e2, &HypothesisSet::new(), Direction::Equivalence).unwrap().is_ok());
    let h = hyps(&["K=1"], &mut t);
    assert!(check(&e2, &e1, &h, Direction::Equivalence).unwrap().is_ok());
}

#[test]
fn running_example_difference_is_one_loop_iteration() {
    let mut t = SymbolTable::new();
    let (k1, k2) = (kat(K1, &mut t), kat(K2, &mut t));
    let cex = extract_cex(&compile(&k1), &compile(&k2)).unwrap();
    let text = cex.render(&t);
    assert!(text.starts_with("a·E·") && text.ends_with("!a"), "{text}");
    // the witness is a real member of the difference
    let only = intersect(&kat_of_cex(&cex), &k1);
    assert!(!katrefine::automata::is_empty(&only));
    assert!(!included(&only, &k2));
}

#[test]
fn intersection_examples() {
    let mut t = SymbolTable::new();
    let k1 = kat(K1, &mut t);
    assert!(equiv(&intersect(&k1, &k1), &k1));
    assert!(equiv(&intersect(&k1, &KatExpr::Zero), &KatExpr::Zero));
    // every atom has !b and c: no logging, valid messages
    let r = kat("(!b·c·(E + O + C + S + L + X))*·!b·c", &mut t);
    let e1 = kat(EQN1, &mut t);
    assert!(equiv(&intersect(&k1, &r), &intersect(&e1, &r)));
}

#[test]
fn automaton_dump_is_line_oriented() {
    let mut t = SymbolTable::new();
    let e = kat("a·M·(b·F + !b·G)", &mut t);
    let dump = compile(&e).dump(&t);
    assert!(dump.lines().count() >= 3, "{dump}");
    assert!(dump.contains('M') && dump.contains('F') && dump.contains('G'));
}

#[test]
fn enumeration_oracle_small_sweep() {
    let r = automata_vs_enumeration(150);
    assert!(r.passed(), "{:?}", r.failures);
}

fn bounded(e: &KatExpr, ab: &Alphabet) -> BTreeSet<GuardedString> {
    enumerate_language(e, &ab.tests, 3).unwrap()
}

/// Rebuilds a term through the public smart constructors.
fn rebuild(e: &KatExpr) -> KatExpr {
    match e {
        KatExpr::Zero => KatExpr::Zero,
        KatExpr::One => KatExpr::One,
        KatExpr::Test(b) => KatExpr::test(b.clone()),
        KatExpr::Action(a) => KatExpr::action(*a),
        KatExpr::Seq(xs) => KatExpr::seq_all(xs.iter().map(rebuild)),
        KatExpr::Sum(xs) => KatExpr::sum_all(xs.iter().map(rebuild)),
        KatExpr::Star(x) => KatExpr::star(rebuild(x)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn smart_constructors_are_idempotent(s in shape(2, 3, 4)) {
        let ab = alphabet(2, 3);
        let e = build(&s, &ab).normalize();
        prop_assert_eq!(rebuild(&e), e.clone());
        prop_assert_eq!(e.normalize(), e);
    }

    #[test]
    fn rewriting_is_idempotent(s in shape(2, 3, 4), skip in 0..3usize, eq in (0..3usize, 0..3usize)) {
        let ab = alphabet(2, 3);
        let e = build(&s, &ab);
        let mut h = HypothesisSet::new();
        h.insert(Hypothesis::ActionIsSkip(ab.actions[skip])).unwrap();
        if eq.0 != eq.1 {
            h.insert(Hypothesis::action_eq(ab.actions[eq.0], ab.actions[eq.1]).unwrap()).unwrap();
        }
        let once = rewrite_under_hypotheses(&e, &h).unwrap();
        prop_assert_eq!(rewrite_under_hypotheses(&once, &h).unwrap(), once);
        prop_assert_eq!(rewrite_under_hypotheses(&e, &HypothesisSet::new()).unwrap(), e);
    }

    #[test]
    fn action_equations_rename_the_language(s in shape(2, 3, 3)) {
        let ab = alphabet(2, 3);
        let e = build(&s, &ab);
        let (a, b) = (ab.actions[0], ab.actions[1]);
        let h: HypothesisSet = [Hypothesis::action_eq(a, b).unwrap()].into_iter().fold(HypothesisSet::new(), |mut h, x| { h.insert(x).unwrap(); h });
        // the smaller id represents the class
        let renamed: BTreeSet<GuardedString> = bounded(&e, &ab)
            .into_iter()
            .map(|mut g| { for x in &mut g.actions { if *x == b { *x = a; } } g })
            .collect();
        prop_assert_eq!(bounded(&rewrite_under_hypotheses(&e, &h).unwrap(), &ab), renamed);
    }

    #[test]
    fn test_constants_fix_the_atoms(s in shape(2, 3, 3), value in any::<bool>()) {
        let ab = alphabet(2, 3);
        let e = build(&s, &ab);
        let mut h = HypothesisSet::new();
        h.insert(Hypothesis::TestConst(ab.tests[0], value)).unwrap();
        let keep = |g: &GuardedString| g.atoms.iter().all(|at| (at & 1 == 1) == value);
        let lhs: BTreeSet<_> = bounded(&rewrite_under_hypotheses(&e, &h).unwrap(), &ab).into_iter().filter(keep).collect();
        let rhs: BTreeSet<_> = bounded(&e, &ab).into_iter().filter(keep).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn skipping_an_action_only_erases_it(s in shape(2, 3, 3)) {
        let ab = alphabet(2, 3);
        let e = build(&s, &ab);
        let c = ab.actions[2];
        let mut h = HypothesisSet::new();
        h.insert(Hypothesis::ActionIsSkip(c)).unwrap();
        let rewritten = enumerate_language(&rewrite_under_hypotheses(&e, &h).unwrap(), &ab.tests, 2).unwrap();
        for g in enumerate_language(&e, &ab.tests, 3).unwrap() {
            // erasing C is only meaningful where the atoms around it agree
            let mut atoms = vec![g.atoms[0]];
            let mut actions = vec![];
            let mut consistent = true;
            for (i, &x) in g.actions.iter().enumerate() {
                if x == c {
                    consistent &= g.atoms[i] == g.atoms[i + 1];
                } else {
                    actions.push(x);
                    atoms.push(g.atoms[i + 1]);
                }
            }
            if consistent && actions.len() <= 2 {
                let g = GuardedString { atoms, actions };
                prop_assert!(rewritten.contains(&g));
            }
        }
    }

    #[test]
    fn intersection_is_a_lower_bound(s1 in shape(2, 3, 3), s2 in shape(2, 3, 3), s3 in shape(2, 3, 2)) {
        let ab = alphabet(2, 3);
        let (x, y, z) = (build(&s1, &ab), build(&s2, &ab), build(&s3, &ab));
        let xy = intersect(&x, &y);
        prop_assert!(included(&xy, &x) && included(&xy, &y));
        prop_assert!(equiv(&xy, &intersect(&y, &x)));
        prop_assert!(equiv(&intersect(&xy, &z), &intersect(&x, &intersect(&y, &z))));
        prop_assert_eq!(bounded(&xy, &ab), bounded(&x, &ab).intersection(&bounded(&y, &ab)).cloned().collect());
        if included(&x, &y) {
            prop_assert!(equiv(&xy, &x));
        }
    }

    #[test]
    fn intersection_distributes_one_way(s in proptest::collection::vec(shape(2, 3, 2), 4)) {
        let ab = alphabet(2, 3);
        let [k, o, l, p] = [0, 1, 2, 3].map(|i| build(&s[i], &ab));
        let lhs = KatExpr::seq(intersect(&k, &o), intersect(&l, &p));
        prop_assert!(included(&lhs, &intersect(&KatExpr::seq(k.clone(), l.clone()), &KatExpr::seq(o.clone(), p.clone()))));
        let star = KatExpr::star(intersect(&k, &o));
        prop_assert!(included(&star, &intersect(&KatExpr::star(k), &KatExpr::star(o))));
    }

    #[test]
    fn counterexamples_are_members(s1 in shape(2, 3, 4), s2 in shape(2, 3, 4)) {
        let ab = alphabet(2, 3);
        let (x, y) = (build(&s1, &ab), build(&s2, &ab));
        if let CheckResult::Fail(c) = check(&x, &y, &HypothesisSet::new(), Direction::Inclusion).unwrap() {
            let w = kat_of_cex(&c.left_not_right.unwrap());
            prop_assert!(!katrefine::automata::is_empty(&intersect(&w, &x)));
            // the witness avoids y on at least one completion of its atoms
            prop_assert!(!included(&intersect(&w, &x), &y));
        }
    }

    #[test]
    fn boolean_guards_are_tests(t in 0..2usize, p in any::<bool>()) {
        let ab = alphabet(2, 1);
        let l = Literal { test: ab.tests[t], positive: p };
        let e = KatExpr::test(BoolExpr::or(BoolExpr::lit(l), BoolExpr::lit(l.negate())));
        prop_assert_eq!(e, KatExpr::One);
    }
}
