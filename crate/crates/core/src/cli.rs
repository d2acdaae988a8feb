//! Command-line front end. Exit codes: 0 success, 2 no solution or a difference found,
//! 1 usage, parse or I/O error.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{
    compose_seq, compose_star, compose_sum, compose_trans, compose_union, embed_context, RelationFile,
    TraceRefinementRelation, Transitive,
};
use crate::automata::{check, CheckResult, Direction};
use crate::editdist::ScoreConfig;
use crate::error::{Error, Result};
use crate::kat::{parse_hypothesis, parse_kat, HypothesisSet, Origin, SymbolTable};
use crate::lang::{parse_benchmark, Benchmark, Side};
use crate::synth::{self, render, verify_solution, Obligation, SynthConfig, Verdict};
use crate::translate::{translate, Abstraction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Le,
    Eq,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Le => Direction::Inclusion,
            DirectionArg::Eq => Direction::Equivalence,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    Seq,
    Sum,
    Union,
    Star,
    Trans,
    Context,
}

#[derive(Debug, Parser)]
#[command(name = "katrefine", about = "Synthesize and check trace-refinement relations between two program fragments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args, Default)]
pub struct SynthFlags {
    /// Inclusion (le) or equivalence (eq); overrides the file's front matter.
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Share symbols for identical statements and conditions across the two fragments.
    #[arg(long, value_enum)]
    pub share_symbols: Option<OnOff>,
    /// Events that no hypothesis may remove or equate, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub protect: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize relations for a benchmark file holding two fragments.
    Synth {
        file: String,
        #[command(flatten)]
        flags: SynthFlags,
        /// Print the structured JSON form instead of text.
        #[arg(long)]
        json: bool,
        /// Deepest chain of repairs explored from the root (default 8).
        #[arg(long)]
        max_depth: Option<usize>,
        /// Stop after this many solutions (default 256).
        #[arg(long)]
        max_solutions: Option<usize>,
        /// JSON file with `remove`, `replace`, `match` and optional `penalty` weights.
        #[arg(long)]
        scores: Option<String>,
    },
    /// Re-verify a relation file (or every solution of a synth JSON file) against a benchmark.
    Check {
        file: String,
        relation: String,
        #[command(flatten)]
        flags: SynthFlags,
    },
    /// Decide inclusion or equivalence of two KAT expressions and print a counterexample.
    Katdiff {
        left: String,
        right: String,
        /// Hypotheses such as `A=1`, `A=B`, `b=0`, `a=!b`.
        #[arg(long = "hyp")]
        hyps: Vec<String>,
        #[arg(long, value_enum, default_value = "le")]
        direction: DirectionArg,
    },
    /// Run synth on every benchmark file (or every file of a directory) in parallel.
    Corpus {
        paths: Vec<String>,
        #[command(flatten)]
        flags: SynthFlags,
        /// Write `<file>.out` next to each benchmark instead of printing.
        #[arg(long)]
        write_golden: bool,
        /// Compare against `<file>.out` and report mismatches.
        #[arg(long)]
        check_golden: bool,
    },
    /// Combine relation files.
    Compose {
        #[arg(value_enum)]
        operator: Operator,
        relations: Vec<String>,
        /// Context prefix for `context`.
        #[arg(long, default_value = "1")]
        pre: String,
        /// Context suffix for `context`.
        #[arg(long, default_value = "1")]
        post: String,
    },
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))
}

fn parse_direction(text: &str) -> Result<Direction> {
    match text.trim().to_ascii_lowercase().as_str() {
        "le" | "inclusion" | "<=" => Ok(Direction::Inclusion),
        "eq" | "equivalence" | "==" => Ok(Direction::Equivalence),
        other => Err(Error::Invalid(format!("unknown direction `{other}`"))),
    }
}

/// File front matter first, then command-line overrides.
pub fn config_for(bench: &Benchmark, flags: &SynthFlags) -> Result<SynthConfig> {
    let mut cfg = SynthConfig::default();
    if let Some(d) = &bench.config.direction {
        cfg.direction = parse_direction(d)?;
    }
    if let Some(d) = flags.direction {
        cfg.direction = d.into();
    }
    cfg.left = bench.config.left.unwrap_or(Side::C1);
    cfg.share_symbols = match flags.share_symbols {
        Some(v) => v == OnOff::On,
        None => bench.config.share_symbols.unwrap_or(true),
    };
    cfg.protected = bench.config.protected.clone();
    cfg.protected.extend(flags.protect.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
    Ok(cfg)
}

fn relations_from(text: &str) -> Result<Vec<RelationFile>> {
    if let Ok(s) = serde_json::from_str::<render::SynthJson>(text) {
        return Ok(s.solutions.into_iter().map(|x| x.relation).collect());
    }
    Ok(vec![RelationFile::from_json(text)?])
}

fn describe(v: &Verdict, table: &SymbolTable) -> String {
    match v {
        Verdict::Ok => "OK".into(),
        Verdict::Violation { obligation, cex } => {
            let what = match obligation {
                Obligation::Tuple(i) => format!("tuple {} does not refine", i + 1),
                Obligation::LeftCoverage => "first projections do not cover the left fragment".into(),
                Obligation::RightCoverage => "second projections do not cover the right fragment".into(),
            };
            match cex {
                Some(c) => format!("Violation: {what}; counterexample {}", c.render(table)),
                None => format!("Violation: {what}"),
            }
        }
    }
}

/// A table holding the names of every file, in first-seen order.
fn merged_table(files: &[RelationFile]) -> SymbolTable {
    let mut t = SymbolTable::new();
    for f in files {
        for a in &f.symbols.actions {
            if t.action_by_name(a).is_none() {
                t.add_action(a, Origin::Free);
            }
        }
        for b in &f.symbols.tests {
            if t.test_by_name(b).is_none() {
                t.add_test(b, Origin::Free);
            }
        }
    }
    t
}

/// Benchmark files named by `paths`; directories contribute their `.c` files, sorted.
pub fn corpus_files(paths: &[String]) -> Result<Vec<std::path::PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        let path = std::path::PathBuf::from(p);
        if path.is_dir() {
            let mut inner: Vec<_> = std::fs::read_dir(&path)
                .map_err(|e| Error::Invalid(format!("{p}: {e}")))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "c"))
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(path);
        }
    }
    Ok(files)
}

/// The text `synth` prints for one benchmark, with its exit code.
pub fn synth_text(source: &str, flags: &SynthFlags) -> Result<(String, i32)> {
    let bench = parse_benchmark(source)?;
    let cfg = config_for(&bench, flags)?;
    let result = synth::synth(&bench.c1, &bench.c2, &cfg)?;
    if result.solutions.is_empty() {
        Ok(("No solutions.\n".into(), 2))
    } else {
        Ok((render::text(&result), 0))
    }
}

/// Golden path for a benchmark: the same name with `.out`.
pub fn golden_path(file: &std::path::Path) -> std::path::PathBuf {
    file.with_extension("out")
}

fn run_corpus(paths: &[String], flags: &SynthFlags, write: bool, compare: bool, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    let files = corpus_files(paths)?;
    // Entries run concurrently; results are collected by index so output keeps input order.
    let results: Vec<Result<(String, i32)>> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| s.spawn(move || synth_text(&read(&f.to_string_lossy())?, flags)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Error::Invalid("worker panicked".into())))).collect()
    });
    let mut worst = 0;
    for (f, r) in files.iter().zip(results) {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let (text, code) = match r {
            Ok(x) => x,
            Err(e) => {
                writeln!(out, "== {name}: error: {e}").map_err(io)?;
                worst = 1;
                continue;
            }
        };
        let gold = golden_path(f);
        if write {
            std::fs::write(&gold, &text).map_err(|e| Error::Invalid(format!("{}: {e}", gold.display())))?;
            writeln!(out, "== {name}: wrote {}", gold.display()).map_err(io)?;
        } else if compare {
            let same = std::fs::read_to_string(&gold).map(|g| g == text).unwrap_or(false);
            writeln!(out, "== {name}: {}", if same { "matches golden" } else { "differs from golden" }).map_err(io)?;
            if !same {
                worst = worst.max(2);
            }
        } else {
            writeln!(out, "== {name} (exit {code})").map_err(io)?;
            write!(out, "{text}").map_err(io)?;
        }
    }
    Ok(worst)
}

fn run_command(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    match cmd {
        Command::Synth { file, flags, json, max_depth, max_solutions, scores } => {
            let bench = parse_benchmark(&read(&file)?)?;
            let mut cfg = config_for(&bench, &flags)?;
            if let Some(d) = max_depth {
                cfg.max_depth = d;
            }
            if let Some(n) = max_solutions {
                cfg.max_solutions = n;
            }
            if let Some(path) = scores {
                cfg.scores = serde_json::from_str::<ScoreConfig>(&read(&path)?)
                    .map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
            }
            let result = synth::synth(&bench.c1, &bench.c2, &cfg)?;
            if json {
                let doc = render::json(&result);
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")).map_err(io)?;
            } else if result.solutions.is_empty() {
                writeln!(out, "No solutions.").map_err(io)?;
            } else {
                write!(out, "{}", render::text(&result)).map_err(io)?;
            }
            Ok(if result.solutions.is_empty() { 2 } else { 0 })
        }
        Command::Check { file, relation, flags } => {
            let bench = parse_benchmark(&read(&file)?)?;
            let cfg = config_for(&bench, &flags)?;
            let mut alpha = Abstraction::new(&bench.c1, &bench.c2, cfg.share_symbols);
            alpha.keep_decided_guards = true;
            let left = bench.program(cfg.left);
            let right = bench.program(cfg.left.other());
            let k1 = translate(left, &alpha)?.expr;
            let k2 = translate(right, &alpha)?.expr;
            let mut worst = 0;
            for (i, f) in relations_from(&read(&relation)?)?.iter().enumerate() {
                let rel = f.resolve(&alpha.table)?;
                let v = verify_solution(&rel, &k1, &k2)?;
                writeln!(out, "relation {}: {}", i + 1, describe(&v, &alpha.table)).map_err(io)?;
                if !v.is_ok() {
                    worst = 2;
                }
            }
            Ok(worst)
        }
        Command::Katdiff { left, right, hyps, direction } => {
            let mut table = SymbolTable::new();
            let k1 = parse_kat(&left, &mut table)?;
            let k2 = parse_kat(&right, &mut table)?;
            let mut set = HypothesisSet::new();
            for h in &hyps {
                set.insert(parse_hypothesis(h, &mut table, true)?)?;
            }
            match check(&k1, &k2, &set, direction.into())? {
                CheckResult::Ok => {
                    writeln!(out, "OK").map_err(io)?;
                    Ok(0)
                }
                CheckResult::Fail(c) => {
                    if let Some(s) = &c.left_not_right {
                        writeln!(out, "Counterexample (left, not right): {}", s.render(&table)).map_err(io)?;
                    }
                    if let Some(s) = &c.right_not_left {
                        writeln!(out, "Counterexample (right, not left): {}", s.render(&table)).map_err(io)?;
                    }
                    Ok(2)
                }
            }
        }
        Command::Corpus { paths, flags, write_golden, check_golden } => {
            run_corpus(&paths, &flags, write_golden, check_golden, out)
        }
        Command::Compose { operator, relations, pre, post } => {
            let files =
                relations.iter().map(|p| RelationFile::from_json(&read(p)?)).collect::<Result<Vec<_>>>()?;
            let table = merged_table(&files);
            let rels =
                files.iter().map(|f| f.resolve(&table)).collect::<Result<Vec<TraceRefinementRelation>>>()?;
            let need = |n: usize| -> Result<()> {
                if rels.len() != n {
                    return Err(Error::Invalid(format!("{operator:?} takes {n} relation file(s)")));
                }
                Ok(())
            };
            let composed = match operator {
                Operator::Seq => {
                    need(2)?;
                    compose_seq(&rels[0], &rels[1])?
                }
                Operator::Sum => {
                    need(2)?;
                    compose_sum(&rels[0], &rels[1])?
                }
                Operator::Union => {
                    need(2)?;
                    compose_union(&rels[0], &rels[1])?
                }
                Operator::Star => {
                    need(1)?;
                    compose_star(&rels[0])
                }
                Operator::Trans => {
                    need(2)?;
                    match compose_trans(&rels[0], &rels[1])? {
                        Transitive::Defined(r) => r,
                        Transitive::Undefined { tuple } => {
                            writeln!(out, "Undefined: tuple {} of the first relation has no partner", tuple + 1)
                                .map_err(io)?;
                            return Ok(2);
                        }
                        Transitive::Unused { tuple } => {
                            writeln!(out, "Undefined: tuple {} of the second relation is never linked", tuple + 1)
                                .map_err(io)?;
                            return Ok(2);
                        }
                    }
                }
                Operator::Context => {
                    need(1)?;
                    let mut t = table.clone();
                    let m = parse_kat(&pre, &mut t)?;
                    let l = parse_kat(&post, &mut t)?;
                    let r = files[0].resolve(&t)?;
                    let out_rel = embed_context(&r, &m, &l);
                    writeln!(out, "{}", RelationFile::from_relation(&out_rel, &t).to_json()).map_err(io)?;
                    return Ok(0);
                }
            };
            writeln!(out, "{}", RelationFile::from_relation(&composed, &table).to_json()).map_err(io)?;
            Ok(0)
        }
    }
}

/// Parses `args` (program name first) and runs the command; errors go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match run_command(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
