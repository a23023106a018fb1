//! Benchmark harness: pipeline descriptors, per-task execution with
//! wall-clock timeout and state budget, CSV records, and exact-rational
//! aggregate statistics (timeouts T, budget-exceeded M, effective samples,
//! mean complement sizes, win shares with 1/k tie splitting).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use thiserror::Error;

use crate::automaton::{self, Acceptance, Automaton, AutomatonError};
use crate::complement::{complement_slice, ComplementError, Limits, SliceConfig};
use crate::parity;
use crate::preopt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Slice-based NBW complementation with any subset of D, R, M.
    Slice(SliceConfig),
    /// DPW complementation followed by parity-to-Büchi conversion;
    /// S = simulation simplification of the complement NPW, E = improved
    /// conversion.
    Parity { simplify: bool, improved: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pipeline {
    /// +P: simulation-based preprocessing of the input NBW.
    pub preopt_p: bool,
    /// +A: acceptance maximization of the input NBW.
    pub preopt_a: bool,
    pub construction: Construction,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("unknown construction `{0}` (expected `slice` or `parity`)")]
    UnknownConstruction(String),
    #[error("unknown flag `{flag}` for construction `{construction}`")]
    UnknownFlag { construction: &'static str, flag: char },
    #[error("empty pipeline descriptor")]
    Empty,
}

impl FromStr for Pipeline {
    type Err = PipelineError;

    /// Descriptors look like `slice`, `slice+ADRM`, `slice+P+A+D`,
    /// `parity+SE`; flag letters may be grouped or separate.
    fn from_str(s: &str) -> Result<Self, PipelineError> {
        let mut parts = s.split('+');
        let head = parts.next().ok_or(PipelineError::Empty)?.trim();
        let flags: Vec<char> = parts.flat_map(|g| g.trim().chars()).collect();
        let mut p = match head.to_ascii_lowercase().as_str() {
            "slice" => Pipeline {
                preopt_p: false,
                preopt_a: false,
                construction: Construction::Slice(SliceConfig::basic()),
            },
            "parity" => Pipeline {
                preopt_p: false,
                preopt_a: false,
                construction: Construction::Parity { simplify: false, improved: false },
            },
            "" => return Err(PipelineError::Empty),
            other => return Err(PipelineError::UnknownConstruction(other.to_string())),
        };
        for flag in flags {
            let f = flag.to_ascii_uppercase();
            match (&mut p.construction, f) {
                (Construction::Slice(_), 'P') => p.preopt_p = true,
                (Construction::Slice(_), 'A') => p.preopt_a = true,
                (Construction::Slice(cfg), 'D') => cfg.use_d = true,
                (Construction::Slice(cfg), 'R') => cfg.use_r = true,
                (Construction::Slice(cfg), 'M') => cfg.use_m = true,
                (Construction::Parity { simplify, .. }, 'S') => *simplify = true,
                (Construction::Parity { improved, .. }, 'E') => *improved = true,
                (c, _) => {
                    let construction = match c {
                        Construction::Slice(_) => "slice",
                        Construction::Parity { .. } => "parity",
                    };
                    return Err(PipelineError::UnknownFlag { construction, flag });
                }
            }
        }
        Ok(p)
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut flags = String::new();
        if self.preopt_p {
            flags.push('P');
        }
        if self.preopt_a {
            flags.push('A');
        }
        let head = match self.construction {
            Construction::Slice(cfg) => {
                if cfg.use_d {
                    flags.push('D');
                }
                if cfg.use_r {
                    flags.push('R');
                }
                if cfg.use_m {
                    flags.push('M');
                }
                "slice"
            }
            Construction::Parity { simplify, improved } => {
                if simplify {
                    flags.push('S');
                }
                if improved {
                    flags.push('E');
                }
                "parity"
            }
        };
        if flags.is_empty() {
            write!(f, "{head}")
        } else {
            write!(f, "{head}+{flags}")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Timeout,
    BudgetExceeded,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Done => "done",
            Outcome::Timeout => "timeout",
            Outcome::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub task_id: String,
    pub pipeline: String,
    pub outcome: Outcome,
    pub wall_millis: u64,
    /// |reachable| of the complement; present iff Done.
    pub s_r: Option<usize>,
    /// |live| of the complement; present iff Done.
    pub s_l: Option<usize>,
    /// Input classified universal iff the complement has no live state.
    pub universal: Option<bool>,
}

pub const CSV_HEADER: &str = "taskId,pipeline,outcome,wallMillis,sR,sL,universal";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.task_id,
            self.pipeline,
            self.outcome,
            self.wall_millis,
            opt(self.s_r.map(|v| v.to_string())),
            opt(self.s_l.map(|v| v.to_string())),
            opt(self.universal.map(|v| v.to_string())),
        )
    }
}

/// Runs a full pipeline and returns the complement NBW. Timeouts and
/// budget overruns surface as `ComplementError`; acceptance-kind
/// mismatches as `AutomatonError`.
pub fn complement_with(
    a: &Automaton,
    pipeline: &Pipeline,
    limits: &Limits,
) -> Result<Automaton, PipelineRunError> {
    match (&pipeline.construction, a.acceptance()) {
        (Construction::Slice(_), Acceptance::Buchi(_)) => {}
        (Construction::Parity { .. }, Acceptance::Parity(_)) => {}
        (Construction::Slice(_), _) => return Err(AutomatonError::ExpectedBuchi.into()),
        (Construction::Parity { .. }, _) => return Err(AutomatonError::ExpectedParity.into()),
    }
    let timed_out = || match limits.deadline {
        Some(d) => Instant::now() >= d,
        None => false,
    };
    match pipeline.construction {
        Construction::Slice(cfg) => {
            let mut input = a.clone();
            if pipeline.preopt_p {
                input = preopt::simplify_nbw(&input)?;
            }
            if pipeline.preopt_a {
                input = preopt::maximize_acceptance(&input)?;
            }
            Ok(complement_slice(&input, cfg, *limits)?.automaton)
        }
        Construction::Parity { simplify, improved } => {
            let mut stage = parity::complement_dpw(a)?;
            if simplify {
                if timed_out() {
                    return Err(ComplementError::TimedOut.into());
                }
                stage = parity::simplify_npw(&stage)?;
            }
            if timed_out() {
                return Err(ComplementError::TimedOut.into());
            }
            let nbw = if improved {
                parity::parity_to_buchi_improved(&stage)?
            } else {
                parity::parity_to_buchi_typical(&stage)?
            };
            if nbw.num_states() > limits.max_states {
                return Err(ComplementError::BudgetExceeded(nbw.num_states()).into());
            }
            if timed_out() {
                return Err(ComplementError::TimedOut.into());
            }
            Ok(nbw)
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineRunError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Complement(#[from] ComplementError),
}

/// Runs one complementation task. Timeouts and budget overruns are
/// outcomes, not errors; `Err` means the pipeline does not fit the input's
/// acceptance kind.
pub fn run_task(
    a: &Automaton,
    pipeline: &Pipeline,
    timeout_millis: u64,
    state_budget: usize,
) -> Result<BenchRecord, AutomatonError> {
    let start = Instant::now();
    let limits = Limits {
        max_states: state_budget,
        deadline: Some(
            start
                .checked_add(Duration::from_millis(timeout_millis))
                .unwrap_or_else(|| start + Duration::from_secs(3_000_000_000)),
        ),
    };
    let record = |outcome: Outcome, complement: Option<&Automaton>| {
        let (s_r, s_l, universal) = match complement {
            Some(c) => {
                let live = automaton::live(c).expect("complement is an NBW").len();
                (Some(automaton::reachable(c).len()), Some(live), Some(live == 0))
            }
            None => (None, None, None),
        };
        BenchRecord {
            task_id: String::new(),
            pipeline: pipeline.to_string(),
            outcome,
            wall_millis: start.elapsed().as_millis() as u64,
            s_r,
            s_l,
            universal,
        }
    };
    match complement_with(a, pipeline, &limits) {
        Ok(c) => Ok(record(Outcome::Done, Some(&c))),
        Err(PipelineRunError::Complement(ComplementError::TimedOut)) => {
            Ok(record(Outcome::Timeout, None))
        }
        Err(PipelineRunError::Complement(ComplementError::BudgetExceeded(_))) => {
            Ok(record(Outcome::BudgetExceeded, None))
        }
        Err(PipelineRunError::Complement(ComplementError::ExpectedBuchi)) => {
            Err(AutomatonError::ExpectedBuchi)
        }
        Err(PipelineRunError::Automaton(e)) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsSummary {
    pub pipeline: String,
    /// T: timed-out tasks.
    pub timeouts: usize,
    /// M: tasks that exhausted the state budget.
    pub memouts: usize,
    pub effective_samples: usize,
    pub mean_s_r: Option<Rational64>,
    pub mean_s_l: Option<Rational64>,
    pub win_share_s_r: Rational64,
    pub win_share_s_l: Rational64,
    /// mean S_L / mean S_R over effective samples.
    pub live_to_reachable: Option<Rational64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("task `{task}` has {got} records for pipeline `{pipeline}` (expected 1)")]
    DuplicateRecord { task: String, pipeline: String, got: usize },
    #[error("task `{task}` is missing a record for pipeline `{pipeline}`")]
    MissingRecord { task: String, pipeline: String },
    #[error("no records")]
    Empty,
}

/// Aggregates records into one summary per pipeline. Every pipeline must
/// have attempted every task exactly once.
pub fn aggregate_stats(records: &[BenchRecord]) -> Result<Vec<StatsSummary>, StatsError> {
    if records.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut pipelines: Vec<String> = Vec::new();
    for r in records {
        if !pipelines.contains(&r.pipeline) {
            pipelines.push(r.pipeline.clone());
        }
    }
    let mut by_task: BTreeMap<&str, BTreeMap<&str, &BenchRecord>> = BTreeMap::new();
    for r in records {
        let slot = by_task.entry(&r.task_id).or_default();
        if slot.insert(&r.pipeline, r).is_some() {
            return Err(StatsError::DuplicateRecord {
                task: r.task_id.clone(),
                pipeline: r.pipeline.clone(),
                got: 2,
            });
        }
    }
    for (task, slot) in &by_task {
        for p in &pipelines {
            if !slot.contains_key(p.as_str()) {
                return Err(StatsError::MissingRecord {
                    task: task.to_string(),
                    pipeline: p.clone(),
                });
            }
        }
    }

    let effective: Vec<&BTreeMap<&str, &BenchRecord>> = by_task
        .values()
        .filter(|slot| slot.values().all(|r| r.outcome == Outcome::Done))
        .collect();

    let mut summaries: Vec<StatsSummary> = pipelines
        .iter()
        .map(|p| {
            let rs = || by_task.values().map(|slot| slot[p.as_str()]);
            let timeouts = rs().filter(|r| r.outcome == Outcome::Timeout).count();
            let memouts = rs().filter(|r| r.outcome == Outcome::BudgetExceeded).count();
            let count = effective.len() as i64;
            let mean = |get: fn(&BenchRecord) -> Option<usize>| {
                if count == 0 {
                    return None;
                }
                let total: i64 = effective
                    .iter()
                    .map(|slot| get(slot[p.as_str()]).expect("Done record has counts") as i64)
                    .sum();
                Some(Rational64::new(total, count))
            };
            let mean_s_r = mean(|r| r.s_r);
            let mean_s_l = mean(|r| r.s_l);
            let live_to_reachable = match (mean_s_l, mean_s_r) {
                (Some(l), Some(r)) if r != Rational64::from_integer(0) => Some(l / r),
                _ => None,
            };
            StatsSummary {
                pipeline: p.clone(),
                timeouts,
                memouts,
                effective_samples: effective.len(),
                mean_s_r,
                mean_s_l,
                win_share_s_r: Rational64::from_integer(0),
                win_share_s_l: Rational64::from_integer(0),
                live_to_reachable,
            }
        })
        .collect();

    // win shares: each of the k pipelines tied for the smallest count on a
    // sample gets 1/k
    let shares_for = |get: fn(&BenchRecord) -> Option<usize>| {
        let mut shares: BTreeMap<&str, Rational64> = BTreeMap::new();
        for slot in &effective {
            let best = pipelines
                .iter()
                .map(|p| get(slot[p.as_str()]).unwrap())
                .min()
                .unwrap();
            let winners: Vec<&str> = pipelines
                .iter()
                .map(String::as_str)
                .filter(|p| get(slot[p]).unwrap() == best)
                .collect();
            let share = Rational64::new(1, winners.len() as i64);
            for w in winners {
                *shares.entry(w).or_insert_with(|| Rational64::from_integer(0)) += share;
            }
        }
        shares
    };
    let s_r_shares = shares_for(|r| r.s_r);
    let s_l_shares = shares_for(|r| r.s_l);
    for s in summaries.iter_mut() {
        if let Some(&v) = s_r_shares.get(s.pipeline.as_str()) {
            s.win_share_s_r = v;
        }
        if let Some(&v) = s_l_shares.get(s.pipeline.as_str()) {
            s.win_share_s_l = v;
        }
    }
    Ok(summaries)
}
