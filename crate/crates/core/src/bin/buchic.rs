//! Command-line front end: corpus generation, complementation, parity
//! conversion, lasso-based language checks, slice traces, and the
//! benchmark harness.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};

use buchic::automaton::Automaton;
use buchic::bench::{self, BenchRecord, Pipeline};
use buchic::complement::Limits;
use buchic::oaf;
use buchic::oracle::{self, Verdict};
use buchic::parity;
use buchic::randgen::{self, GenSpec};
use buchic::slice::{self, Slice};

#[derive(Parser)]
#[command(name = "buchic", version, about = "Büchi complementation toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded random NBW corpus into a directory.
    Generate {
        #[arg(long)]
        n: usize,
        /// Alphabet size.
        #[arg(long, default_value_t = 2)]
        sigma: usize,
        /// Transition density: ceil(r*n) transition pairs per symbol.
        #[arg(long)]
        r: f64,
        /// Acceptance density: ceil(f*n) accepting states.
        #[arg(long)]
        f: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Base seed; automaton i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Complement an automaton (slice construction for NBW input, parity
    /// pipeline for DPW input).
    Complement {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "slice")]
        construction: String,
        /// Comma-separated flags: P,A,D,R,M for slice; S,E for parity.
        #[arg(long, default_value = "")]
        heuristics: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        state_budget: usize,
    },
    /// Convert an NPW to an NBW (no complementation step).
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated flags: S (simulation simplification first),
        /// E (improved conversion).
        #[arg(long, default_value = "")]
        heuristics: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two automata on all lasso words within bounds.
    Check {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckMode::Complement)]
        mode: CheckMode,
        #[arg(long, default_value_t = 3)]
        max_u: usize,
        #[arg(long, default_value_t = 4)]
        max_v: usize,
    },
    /// Print the reduced-split-tree slice at every level along a finite
    /// word.
    Trace {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated symbols, e.g. "p,!p,p".
        #[arg(long)]
        word: String,
        /// Follow the deterministic decoration rule instead of plain
        /// slices.
        #[arg(long)]
        decorated: bool,
        /// Emit a DOT chain instead of one slice per line.
        #[arg(long)]
        dot: bool,
    },
    /// Run every pipeline on every corpus automaton and aggregate
    /// statistics.
    Bench {
        /// Directory of .oaf files; each file is one task.
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated pipeline descriptors, e.g.
        /// "slice,slice+ADRM".
        #[arg(long)]
        pipelines: String,
        #[arg(long, default_value_t = 10_000)]
        timeout_ms: u64,
        #[arg(long, default_value_t = 200_000)]
        state_budget: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write per-task records as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckMode {
    Complement,
    Equivalent,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn run(cli: Cli) -> Result<ExitCode, AnyError> {
    match cli.cmd {
        Cmd::Generate { n, sigma, r, f, count, seed, out } => {
            generate(n, sigma, r, f, count, seed, &out)?;
        }
        Cmd::Complement { input, construction, heuristics, out, state_budget } => {
            let a = oaf::read_oaf(&input)?;
            let pipeline = parse_pipeline(&construction, &heuristics)?;
            let limits = Limits { max_states: state_budget, deadline: None };
            let c = bench::complement_with(&a, &pipeline, &limits)?;
            write_result(out.as_deref(), &c)?;
        }
        Cmd::Convert { input, heuristics, out } => {
            let a = oaf::read_oaf(&input)?;
            let flags = parse_flags(&heuristics)?;
            for f in &flags {
                if !"SE".contains(*f) {
                    return Err(format!("unknown convert heuristic `{f}`").into());
                }
            }
            let npw = if flags.contains(&'S') { parity::simplify_npw(&a)? } else { a };
            let nbw = if flags.contains(&'E') {
                parity::parity_to_buchi_improved(&npw)?
            } else {
                parity::parity_to_buchi_typical(&npw)?
            };
            write_result(out.as_deref(), &nbw)?;
        }
        Cmd::Check { a, b, mode, max_u, max_v } => {
            let left = oaf::read_oaf(&a)?;
            let right = oaf::read_oaf(&b)?;
            let verdict = match mode {
                CheckMode::Complement => oracle::check_complement(&left, &right, max_u, max_v)?,
                CheckMode::Equivalent => oracle::check_equivalent(&left, &right, max_u, max_v)?,
            };
            match verdict {
                Verdict::Pass => println!("pass"),
                Verdict::Fail { witness, in_a, in_b } => {
                    println!("fail: {witness} (in a: {in_a}, in b: {in_b})");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Cmd::Trace { input, word, decorated, dot } => {
            let a = oaf::read_oaf(&input)?;
            let symbols: Vec<String> = word
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect();
            let levels = if decorated {
                decorated_trace(&a, &symbols)?
            } else {
                oracle::reduced_split_tree_prefix(&a, &symbols)?
            };
            print!("{}", render_trace(&levels, &symbols, dot));
        }
        Cmd::Bench { corpus, pipelines, timeout_ms, state_budget, jobs, csv } => {
            run_bench(&corpus, &pipelines, timeout_ms, state_budget, jobs, csv.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(
    n: usize,
    sigma: usize,
    r: f64,
    f: f64,
    count: usize,
    seed: u64,
    out: &Path,
) -> Result<(), AnyError> {
    std::fs::create_dir_all(out)?;
    let mut manifest = String::new();
    for i in 0..count {
        let spec = GenSpec {
            n,
            alphabet_size: sigma,
            transition_density: r,
            acceptance_density: f,
            seed: seed + i as u64,
        };
        let a = randgen::generate(&spec)?;
        let id = format!("t{i:04}");
        let file = format!("{id}.oaf");
        oaf::write_oaf(&out.join(&file), &a)?;
        manifest.push_str(&randgen::manifest_line(&id, &spec, &file));
        manifest.push('\n');
    }
    std::fs::write(
        out.join("manifest.txt"),
        format!("# rng: {}\n{manifest}", randgen::RNG_ALGORITHM),
    )?;
    Ok(())
}

fn parse_flags(heuristics: &str) -> Result<Vec<char>, AnyError> {
    let mut flags = Vec::new();
    for tok in heuristics.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        for c in tok.chars() {
            flags.push(c.to_ascii_uppercase());
        }
    }
    Ok(flags)
}

fn parse_pipeline(construction: &str, heuristics: &str) -> Result<Pipeline, AnyError> {
    let flags = parse_flags(heuristics)?;
    let mut desc = construction.to_string();
    if !flags.is_empty() {
        desc.push('+');
        desc.extend(flags);
    }
    Ok(desc.parse::<Pipeline>()?)
}

fn write_result(out: Option<&Path>, a: &Automaton) -> Result<(), AnyError> {
    match out {
        Some(path) => oaf::write_oaf(path, a)?,
        None => print!("{}", oaf::emit_oaf(a)),
    }
    Ok(())
}

/// Levels of the decorated run that follows the deterministic decoration
/// rule: the first step decorates accepting children 0 and others 1, later
/// steps apply the decoration-propagation rules.
fn decorated_trace(a: &Automaton, symbols: &[String]) -> Result<Vec<Slice>, AnyError> {
    let mut levels = vec![Slice::initial(a.initial())];
    for s in symbols {
        let sym = a
            .symbol_index(s)
            .ok_or_else(|| format!("symbol `{s}` not in the automaton alphabet"))?;
        let prev = levels.last().unwrap();
        let next = if prev.is_undecorated() {
            slice::guess_decorations(a, prev, sym, true)?.remove(0)
        } else {
            slice::decorated_successor(a, prev, sym, true)?.unwrap_or_else(Slice::bottom)
        };
        levels.push(next);
    }
    Ok(levels)
}

fn render_trace(levels: &[Slice], symbols: &[String], dot: bool) -> String {
    let mut out = String::new();
    if dot {
        out.push_str("digraph trace {\n  rankdir=LR;\n  node [shape=box];\n");
        for (i, s) in levels.iter().enumerate() {
            writeln!(out, "  n{i} [label=\"{s}\"];").unwrap();
        }
        for (i, sym) in symbols.iter().take(levels.len().saturating_sub(1)).enumerate() {
            writeln!(out, "  n{i} -> n{} [label=\"{sym}\"];", i + 1).unwrap();
        }
        out.push_str("}\n");
    } else {
        for s in levels {
            writeln!(out, "{s}").unwrap();
        }
    }
    out
}

fn run_bench(
    corpus: &Path,
    pipelines: &str,
    timeout_ms: u64,
    state_budget: usize,
    jobs: usize,
    csv: Option<&Path>,
) -> Result<(), AnyError> {
    let pipelines: Vec<Pipeline> = pipelines
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Pipeline>())
        .collect::<Result<_, _>>()?;
    if pipelines.is_empty() {
        return Err("no pipelines given".into());
    }

    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "oaf"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(format!("no .oaf files in {}", corpus.display()).into());
    }
    let mut tasks: Vec<(String, Automaton)> = Vec::new();
    for path in &files {
        let id = path.file_stem().unwrap().to_string_lossy().into_owned();
        tasks.push((id, oaf::read_oaf(path)?));
    }

    for (id, a) in &tasks {
        for p in &pipelines {
            let wants_parity = matches!(p.construction, bench::Construction::Parity { .. });
            let has_parity = matches!(a.acceptance(), buchic::automaton::Acceptance::Parity(_));
            if wants_parity != has_parity {
                return Err(format!(
                    "pipeline {p} does not fit task {id} ({} acceptance)",
                    if has_parity { "parity" } else { "Büchi" }
                )
                .into());
            }
        }
    }

    let units: Vec<(usize, usize)> = (0..tasks.len())
        .flat_map(|t| (0..pipelines.len()).map(move |p| (t, p)))
        .collect();
    let next = AtomicUsize::new(0);
    let collected: Mutex<Vec<BenchRecord>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(t, p)) = units.get(i) else { break };
                let (id, a) = &tasks[t];
                let mut record = bench::run_task(a, &pipelines[p], timeout_ms, state_budget)
                    .expect("pipeline matches input acceptance kind");
                record.task_id = id.clone();
                collected.lock().unwrap().push(record);
            });
        }
    });
    let mut records = collected.into_inner().unwrap();
    records.sort_by(|a, b| (&a.task_id, &a.pipeline).cmp(&(&b.task_id, &b.pipeline)));

    if let Some(path) = csv {
        let mut text = String::from(bench::CSV_HEADER);
        text.push('\n');
        for r in &records {
            text.push_str(&r.csv_row());
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }

    let to_f64 = |q: num_rational::Rational64| *q.numer() as f64 / *q.denom() as f64;
    println!(
        "{:<14} {:>4} {:>4} {:>6} {:>12} {:>12} {:>10} {:>10} {:>8}",
        "pipeline", "T", "M", "eff", "meanSR", "meanSL", "winSR", "winSL", "SL/SR"
    );
    for s in bench::aggregate_stats(&records)? {
        let fmt_mean = |m: Option<num_rational::Rational64>| match m {
            Some(q) => format!("{:.2}", to_f64(q)),
            None => "-".to_string(),
        };
        println!(
            "{:<14} {:>4} {:>4} {:>6} {:>12} {:>12} {:>10} {:>10} {:>8}",
            s.pipeline,
            s.timeouts,
            s.memouts,
            s.effective_samples,
            fmt_mean(s.mean_s_r),
            fmt_mean(s.mean_s_l),
            s.win_share_s_r.to_string(),
            s.win_share_s_l.to_string(),
            fmt_mean(s.live_to_reachable),
        );
    }
    Ok(())
}
