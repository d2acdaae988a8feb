//! Scored edit distance between two counterexample strings, and the repairs it suggests.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::kat::{CexElem, CexString, Hypothesis, Literal, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrSide {
    Left,
    Right,
}

/// Positions index the original strings, so the order transformations are applied in
/// does not matter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transformation {
    Remove { side: StrSide, pos: usize, elem: CexElem },
    /// Replaces the left element with the right one.
    Replace { left: usize, right: usize, from: CexElem, to: CexElem },
    Match { left: usize, right: usize, elem: CexElem },
}

impl Transformation {
    pub fn render(&self, table: &SymbolTable) -> String {
        match self {
            Transformation::Remove { side, elem, .. } => {
                format!("Remove({}, {})", elem.render(table), if *side == StrSide::Left { "s1" } else { "s2" })
            }
            Transformation::Replace { from, to, .. } => {
                format!("Replace({}, {}, s1)", from.render(table), to.render(table))
            }
            Transformation::Match { elem, .. } => format!("Match({})", elem.render(table)),
        }
    }
}

/// Weights of the four transformation kinds. `penalty = None` means `len(s1) + len(s2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreConfig {
    #[serde(with = "ratio_text")]
    pub remove: Rational64,
    #[serde(with = "ratio_text")]
    pub replace: Rational64,
    #[serde(rename = "match", with = "ratio_text")]
    pub matched: Rational64,
    #[serde(default, with = "opt_ratio_text")]
    pub penalty: Option<Rational64>,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            remove: Rational64::from_integer(1),
            replace: Rational64::from_integer(1),
            matched: Rational64::new(-1, 4),
            penalty: None,
        }
    }
}

mod ratio_text {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        text.trim().parse().map_err(|_| serde::de::Error::custom(format!("bad rational `{text}`")))
    }
}

mod opt_ratio_text {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational64>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| t.trim().parse().map_err(|_| serde::de::Error::custom(format!("bad rational `{t}`"))))
            .transpose()
    }
}

fn same_type(a: &CexElem, b: &CexElem) -> bool {
    a.is_action() == b.is_action()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Align,
    RemoveLeft,
    RemoveRight,
}

/// Minimal-score transformation list turning both strings into the same string. Ties
/// prefer aligning the heads, then removing from the left, then from the right.
pub fn distance(s1: &CexString, s2: &CexString, cfg: &ScoreConfig) -> (Vec<Transformation>, Rational64) {
    let (a, b) = (&s1.0, &s2.0);
    let (n, m) = (a.len(), b.len());
    let penalty = cfg.penalty.unwrap_or_else(|| Rational64::from_integer((n + m) as i64));
    // best[i][j] scores the suffixes a[i..], b[j..]
    let mut best = vec![vec![Rational64::from_integer(0); m + 1]; n + 1];
    let mut step = vec![vec![Step::Align; m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                best[i][j] = cfg.matched;
            } else if i == n {
                best[i][j] = cfg.remove * Rational64::from_integer((m - j) as i64);
                step[i][j] = Step::RemoveRight;
            } else if j == m {
                best[i][j] = cfg.remove * Rational64::from_integer((n - i) as i64);
                step[i][j] = Step::RemoveLeft;
            } else {
                let align_cost = if a[i] == b[j] {
                    cfg.matched
                } else if same_type(&a[i], &b[j]) {
                    cfg.replace
                } else {
                    penalty
                };
                let options = [
                    (best[i + 1][j + 1] + align_cost, Step::Align),
                    (best[i + 1][j] + cfg.remove, Step::RemoveLeft),
                    (best[i][j + 1] + cfg.remove, Step::RemoveRight),
                ];
                let (score, s) = options.iter().fold(options[0], |acc, &o| if o.0 < acc.0 { o } else { acc });
                best[i][j] = score;
                step[i][j] = s;
            }
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        match step[i][j] {
            Step::Align => {
                out.push(if a[i] == b[j] {
                    Transformation::Match { left: i, right: j, elem: a[i] }
                } else {
                    Transformation::Replace { left: i, right: j, from: a[i], to: b[j] }
                });
                i += 1;
                j += 1;
            }
            Step::RemoveLeft => {
                out.push(Transformation::Remove { side: StrSide::Left, pos: i, elem: a[i] });
                i += 1;
            }
            Step::RemoveRight => {
                out.push(Transformation::Remove { side: StrSide::Right, pos: j, elem: b[j] });
                j += 1;
            }
        }
    }
    (out, best[0][0])
}

/// Applies the transformations to both strings; a correct list yields two equal strings.
pub fn apply(s1: &CexString, s2: &CexString, t: &[Transformation]) -> (Vec<CexElem>, Vec<CexElem>) {
    let mut left: Vec<Option<CexElem>> = s1.0.iter().copied().map(Some).collect();
    let mut right: Vec<Option<CexElem>> = s2.0.iter().copied().map(Some).collect();
    for x in t {
        match x {
            Transformation::Remove { side: StrSide::Left, pos, .. } => left[*pos] = None,
            Transformation::Remove { side: StrSide::Right, pos, .. } => right[*pos] = None,
            Transformation::Replace { left: i, to, .. } => left[*i] = Some(*to),
            Transformation::Match { .. } => {}
        }
    }
    (left.into_iter().flatten().collect(), right.into_iter().flatten().collect())
}

/// What a transformation asks of the programs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepairAction {
    Hypothesis(Hypothesis),
    /// Restrict the programs of `side` to each valuation of the literal's test in turn.
    CaseSplit { side: StrSide, literal: Literal },
}

/// Removing an action hypothesizes it away, removing a literal splits on its test,
/// replacing one symbol by another of the same sort equates them. A literal replaced by its
/// own negation, and any cross-sort replacement, fall back to the removal repairs.
pub fn to_repairs(t: &[Transformation]) -> Vec<RepairAction> {
    let mut out: Vec<RepairAction> = Vec::new();
    let remove = |side: StrSide, e: &CexElem, out: &mut Vec<RepairAction>| {
        out.push(match *e {
            CexElem::Act(a) => RepairAction::Hypothesis(Hypothesis::ActionIsSkip(a)),
            CexElem::Lit(l) => RepairAction::CaseSplit { side, literal: l },
        })
    };
    for x in t {
        match x {
            Transformation::Match { .. } => {}
            Transformation::Remove { side, elem, .. } => remove(*side, elem, &mut out),
            Transformation::Replace { from, to, .. } => match (*from, *to) {
                (CexElem::Act(p), CexElem::Act(q)) => match Hypothesis::action_eq(p, q) {
                    Ok(h) => out.push(RepairAction::Hypothesis(h)),
                    Err(_) => {}
                },
                (CexElem::Lit(l1), CexElem::Lit(l2)) => match Hypothesis::lit_eq(l1, l2) {
                    Ok(h) => out.push(RepairAction::Hypothesis(h)),
                    _ => out.push(RepairAction::CaseSplit { side: StrSide::Left, literal: l1 }),
                },
                (f, t) => {
                    remove(StrSide::Left, &f, &mut out);
                    remove(StrSide::Right, &t, &mut out);
                }
            },
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|r| seen.insert(r.clone()));
    out
}
