//! The synthesis loop: translate, check, repair the difference, restrict, recurse.

pub mod diff;
pub mod render;
pub mod verify;

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::algebra::{RefTuple, TraceRefinementRelation};
use crate::automata::{check, equivalent, CheckResult, Direction};
use crate::editdist::ScoreConfig;
use crate::error::{Error, Result};
use crate::kat::{ActionId, CexString, HypothesisSet, KatExpr, Literal, Origin, SymbolTable, TestId};
use crate::lang::{instrument, print, Cond, Location, Program, Side};
use crate::translate::{refine, translate, Abstraction};

pub use diff::{nearest_targets, Alternative, DiffContext};
pub use verify::{check_coverage, ref_relation, trivial_tuple, verify_solution, Obligation, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    pub direction: Direction,
    /// The refining fragment; its translation is the left side of every check.
    pub left: Side,
    pub share_symbols: bool,
    /// Event names (callee or symbol) no hypothesis may mention.
    pub protected: Vec<String>,
    pub scores: ScoreConfig,
    pub max_depth: usize,
    pub max_solutions: usize,
    pub max_alternatives: usize,
    pub max_nodes: usize,
    /// Distinct nearest targets considered per counterexample.
    pub max_targets: usize,
    /// Paths of the other automaton enumerated when looking for a nearest target.
    pub max_paths: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            direction: Direction::Inclusion,
            left: Side::C1,
            share_symbols: true,
            protected: Vec::new(),
            scores: ScoreConfig::default(),
            max_depth: 8,
            max_solutions: 256,
            max_alternatives: 4,
            max_nodes: 2000,
            max_targets: 2,
            max_paths: 2000,
        }
    }
}

/// `assume(cond)` instrumented in front of the statement at `loc`; `literal` is its test.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assumption {
    pub loc: Location,
    pub literal: Literal,
    pub cond: Cond,
}

impl Assumption {
    pub fn render(&self) -> String {
        format!("asm({})@{}", print::cond(&self.cond), self.loc)
    }
}

/// Located assumptions for each side plus the hypotheses they come with. `split` names the
/// literal when the restriction is one half of a case split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub left: Vec<Assumption>,
    pub right: Vec<Assumption>,
    pub hyps: HypothesisSet,
    pub split: Option<Literal>,
}

/// A verified tuple together with the restrictions that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub left_asms: Vec<Assumption>,
    pub right_asms: Vec<Assumption>,
    pub left: KatExpr,
    pub right: KatExpr,
    pub hyps: HypothesisSet,
    pub alpha: Rc<Abstraction>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialReason {
    Depth,
    Budget,
    NoRepair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionTree {
    Leaf(Rc<Leaf>),
    /// Hypotheses added because of `trigger`, which the child no longer contains.
    Hyp { added: HypothesisSet, trigger: CexString, child: Rc<SolutionTree> },
    /// Complementary assumptions on `literal`'s test at the listed locations.
    Split {
        literal: Literal,
        left_at: Vec<Location>,
        right_at: Vec<Location>,
        trigger: CexString,
        pos: Rc<SolutionTree>,
        neg: Rc<SolutionTree>,
    },
    Partial(PartialReason),
}

impl SolutionTree {
    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a SolutionTree, out: &mut Vec<&'a Leaf>) {
            match t {
                SolutionTree::Leaf(l) => out.push(l),
                SolutionTree::Hyp { child, .. } => go(child, out),
                SolutionTree::Split { pos, neg, .. } => {
                    go(pos, out);
                    go(neg, out);
                }
                SolutionTree::Partial(_) => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// No subtree was cut off by a budget or a dead end.
    pub fn structurally_complete(&self) -> bool {
        match self {
            SolutionTree::Leaf(_) => true,
            SolutionTree::Hyp { child, .. } => child.structurally_complete(),
            SolutionTree::Split { pos, neg, .. } => pos.structurally_complete() && neg.structurally_complete(),
            SolutionTree::Partial(_) => false,
        }
    }
}

/// One synthesized relation. `restrictions[i]` explains `relation.tuples[i]`; the trivial
/// completion tuple, when present, is last and has no restrictions.
#[derive(Clone, Debug)]
pub struct Solution {
    pub tree: Rc<SolutionTree>,
    pub relation: TraceRefinementRelation,
    pub restrictions: Vec<(Vec<Assumption>, Vec<Assumption>)>,
    /// Structurally complete and the first projections cover the left translation.
    pub complete: bool,
    pub trivially_completed: bool,
}

impl Solution {
    /// Hypotheses of the non-trivial tuples.
    pub fn hypotheses(&self) -> HypothesisSet {
        let n = self.relation.len() - self.trivially_completed as usize;
        let mut out = HypothesisSet::new();
        for t in &self.relation.tuples[..n] {
            for h in t.hyps.iter() {
                let _ = out.insert(*h);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SynthOutput {
    pub config: SynthConfig,
    pub alpha: Abstraction,
    pub left_expr: KatExpr,
    pub right_expr: KatExpr,
    pub solutions: Vec<Solution>,
    /// Trees whose relation failed verification and were therefore dropped.
    pub rejected: usize,
    pub nodes: usize,
    pub budget_hit: bool,
}

/// Instruments each program with its side of `r` and refines `alpha` with the new conditions.
pub fn restrict(
    c_left: &Program,
    r: &Restriction,
    c_right: &Program,
    alpha: &Abstraction,
) -> Result<(Program, Program, Abstraction)> {
    let pairs = |asms: &[Assumption]| asms.iter().map(|a| (a.loc, a.cond.clone())).collect::<Vec<_>>();
    let d_left = instrument(c_left, &pairs(&r.left))?;
    let d_right = instrument(c_right, &pairs(&r.right))?;
    let conds: Vec<(Side, Cond)> = r
        .left
        .iter()
        .map(|a| (c_left.side, a.cond.clone()))
        .chain(r.right.iter().map(|a| (c_right.side, a.cond.clone())))
        .collect();
    Ok((d_left, d_right, refine(alpha, &conds)))
}

/// Action ids whose callee or symbol name is listed as protected.
pub fn protected_actions(table: &SymbolTable, names: &[String]) -> BTreeSet<ActionId> {
    table
        .action_ids()
        .filter(|&a| {
            let info = table.action(a);
            names.iter().any(|n| {
                n.eq_ignore_ascii_case(&info.name)
                    || matches!(&info.origin, Origin::Event { callee, .. } if callee.eq_ignore_ascii_case(n))
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    left: Vec<Assumption>,
    right: Vec<Assumption>,
    hyps: HypothesisSet,
}

impl Node {
    fn split_tests(&self) -> BTreeSet<TestId> {
        self.left.iter().chain(&self.right).map(|a| a.literal.test).collect()
    }

    fn with(&self, r: &Restriction) -> Result<Node> {
        let merge = |a: &[Assumption], b: &[Assumption]| {
            let mut v: Vec<Assumption> = a.iter().chain(b).cloned().collect();
            v.sort();
            v.dedup();
            v
        };
        Ok(Node { left: merge(&self.left, &r.left), right: merge(&self.right, &r.right), hyps: self.hyps.union(&r.hyps)? })
    }
}

type Trees = Rc<Vec<Rc<SolutionTree>>>;

struct Search<'a> {
    cfg: &'a SynthConfig,
    left: &'a Program,
    right: &'a Program,
    alpha: Abstraction,
    protected: BTreeSet<ActionId>,
    memo: HashMap<(Node, usize), Trees>,
    translations: HashMap<(Side, Vec<Assumption>), (KatExpr, Rc<Abstraction>)>,
    nodes: usize,
    budget_hit: bool,
}

impl Search<'_> {
    fn translated(&mut self, side: Side, asms: &[Assumption]) -> Result<(KatExpr, Rc<Abstraction>)> {
        let key = (side, asms.to_vec());
        if let Some(hit) = self.translations.get(&key) {
            return Ok(hit.clone());
        }
        let p = if side == self.left.side { self.left } else { self.right };
        let pairs: Vec<(Location, Cond)> = asms.iter().map(|a| (a.loc, a.cond.clone())).collect();
        let d = instrument(p, &pairs)?;
        let r = translate(&d, &self.alpha)?;
        let out = (r.expr, Rc::new(r.alpha));
        self.translations.insert(key, out.clone());
        Ok(out)
    }

    fn cap(&self, v: &mut Vec<Rc<SolutionTree>>) {
        v.truncate(self.cfg.max_solutions);
    }

    /// A split is useless when a branch leaves the relevant translations unchanged.
    fn split_is_useful(&mut self, node: &Node, alt: &Alternative, here: (&KatExpr, &KatExpr)) -> Result<bool> {
        for r in alt {
            let child = node.with(r)?;
            let (l, _) = self.translated(self.left.side, &child.left)?;
            let (rt, _) = self.translated(self.right.side, &child.right)?;
            let same_left = equivalent(&l, here.0);
            let same_right = equivalent(&rt, here.1);
            if same_left && same_right {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn solve(&mut self, node: &Node, depth: usize) -> Result<Trees> {
        let key = (node.clone(), depth);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        self.nodes += 1;
        if self.nodes > self.cfg.max_nodes {
            self.budget_hit = true;
            return Ok(Rc::new(vec![Rc::new(SolutionTree::Partial(PartialReason::Budget))]));
        }
        let (dl, al) = self.translated(self.left.side, &node.left)?;
        let (dr, ar) = self.translated(self.right.side, &node.right)?;
        let cexs = match check(&dl, &dr, &node.hyps, self.cfg.direction)? {
            CheckResult::Ok => {
                let alpha = Rc::new(crate::translate::combine(&al, &ar)?);
                let leaf = Leaf {
                    left_asms: node.left.clone(),
                    right_asms: node.right.clone(),
                    left: dl,
                    right: dr,
                    hyps: node.hyps.clone(),
                    alpha,
                };
                let out: Trees = Rc::new(vec![Rc::new(SolutionTree::Leaf(Rc::new(leaf)))]);
                self.memo.insert(key, out.clone());
                return Ok(out);
            }
            CheckResult::Fail(c) => c,
        };
        if depth >= self.cfg.max_depth {
            self.budget_hit = true;
            return Ok(Rc::new(vec![Rc::new(SolutionTree::Partial(PartialReason::Depth))]));
        }
        let trigger = cexs.left_not_right.clone().or_else(|| cexs.right_not_left.clone()).unwrap_or_default();
        let split_tests = node.split_tests();
        let alts = {
            let ctx = DiffContext {
                left: self.left,
                right: self.right,
                alpha: &self.alpha,
                direction: self.cfg.direction,
                scores: &self.cfg.scores,
                protected: &self.protected,
                split_tests: &split_tests,
                max_targets: self.cfg.max_targets,
                max_paths: self.cfg.max_paths,
            };
            match ctx.solve_diff(&dl, &dr, &node.hyps, &cexs) {
                Ok(a) => a,
                Err(Error::NoRepairFound) => Vec::new(),
                Err(e) => return Err(e),
            }
        };
        let mut out: Vec<Rc<SolutionTree>> = Vec::new();
        let mut tried = 0;
        for alt in alts {
            if tried >= self.cfg.max_alternatives || out.len() >= self.cfg.max_solutions {
                break;
            }
            match alt.as_slice() {
                [r] => {
                    tried += 1;
                    let child = node.with(r)?;
                    let sub = self.solve(&child, depth + 1)?;
                    for t in sub.iter() {
                        if matches!(**t, SolutionTree::Partial(_)) {
                            continue;
                        }
                        out.push(Rc::new(SolutionTree::Hyp {
                            added: r.hyps.clone(),
                            trigger: trigger.clone(),
                            child: t.clone(),
                        }));
                    }
                }
                [p, n] => {
                    if !self.split_is_useful(node, &alt, (&dl, &dr))? {
                        continue;
                    }
                    tried += 1;
                    let dead = || Rc::new(vec![Rc::new(SolutionTree::Partial(PartialReason::NoRepair))]);
                    let pos = self.solve(&node.with(p)?, depth + 1)?;
                    let neg = self.solve(&node.with(n)?, depth + 1)?;
                    let pos = if pos.is_empty() { dead() } else { pos };
                    let neg = if neg.is_empty() { dead() } else { neg };
                    let literal = p.split.expect("split restrictions carry their literal");
                    let locs = |r: &Restriction, left: bool| {
                        let v = if left { &r.left } else { &r.right };
                        v.iter().filter(|a| a.literal == literal).map(|a| a.loc).collect::<Vec<_>>()
                    };
                    'outer: for a in pos.iter() {
                        for b in neg.iter() {
                            if a.leaves().is_empty() && b.leaves().is_empty() {
                                continue;
                            }
                            out.push(Rc::new(SolutionTree::Split {
                                literal,
                                left_at: locs(p, true),
                                right_at: locs(p, false),
                                trigger: trigger.clone(),
                                pos: a.clone(),
                                neg: b.clone(),
                            }));
                            if out.len() >= self.cfg.max_solutions {
                                break 'outer;
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        self.cap(&mut out);
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// Synthesizes relations between `c1` and `c2` starting from hypotheses `hyps`. Every returned
/// solution has passed [`verify_solution`] against the translations of the unrestricted
/// programs under the common abstraction.
pub fn synth_with(c1: &Program, c2: &Program, hyps: &HypothesisSet, cfg: &SynthConfig) -> Result<SynthOutput> {
    let mut alpha = Abstraction::new(c1, c2, cfg.share_symbols);
    alpha.keep_decided_guards = true;
    let (left, right) = if cfg.left == Side::C1 { (c1, c2) } else { (c2, c1) };
    let protected = protected_actions(&alpha.table, &cfg.protected);
    let mut search = Search {
        cfg,
        left,
        right,
        alpha: alpha.clone(),
        protected: protected.clone(),
        memo: HashMap::new(),
        translations: HashMap::new(),
        nodes: 0,
        budget_hit: false,
    };
    let root = Node { left: vec![], right: vec![], hyps: hyps.clone() };
    let trees = search.solve(&root, 0)?;
    let mut solutions: Vec<Solution> = Vec::new();
    let mut rejected = 0;
    let mut common = alpha.clone();
    for tree in trees.iter() {
        let leaves = tree.leaves();
        if leaves.is_empty() {
            continue;
        }
        let (mut relation, alpha_t) = ref_relation(&leaves, cfg.direction)?;
        let mut restrictions = Vec::new();
        let mut seen = Vec::new();
        for l in &leaves {
            let t = RefTuple::new(l.left.clone(), l.right.clone(), l.hyps.clone());
            if !seen.contains(&t) {
                seen.push(t);
                restrictions.push((l.left_asms.clone(), l.right_asms.clone()));
            }
        }
        let kl = translate(left, &alpha_t)?.expr;
        let kr = translate(right, &alpha_t)?.expr;
        let complete = tree.structurally_complete() && check_coverage(&relation, &kl, &kr)?.is_ok();
        let mut trivially_completed = false;
        if !complete {
            let table = &alpha_t.table;
            let prot = protected_actions(table, &cfg.protected);
            relation.push(trivial_tuple(&kl, &kr, table, &prot));
            trivially_completed = true;
        }
        if !verify_solution(&relation, &kl, &kr)?.is_ok() {
            rejected += 1;
            continue;
        }
        if solutions.iter().any(|s| s.relation == relation) {
            continue;
        }
        common = crate::translate::combine(&common, &alpha_t)?;
        solutions.push(Solution { tree: tree.clone(), relation, restrictions, complete, trivially_completed });
    }
    let left_expr = translate(left, &common)?.expr;
    let right_expr = translate(right, &common)?.expr;
    Ok(SynthOutput {
        config: cfg.clone(),
        alpha: common,
        left_expr,
        right_expr,
        solutions,
        rejected,
        nodes: search.nodes,
        budget_hit: search.budget_hit,
    })
}

pub fn synth(c1: &Program, c2: &Program, cfg: &SynthConfig) -> Result<SynthOutput> {
    synth_with(c1, c2, &HypothesisSet::new(), cfg)
}
