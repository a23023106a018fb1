//! Ground-truth engine: membership of ultimately periodic words and bounded
//! language comparison. Independent of the complementation constructions it
//! is used to validate.

use std::fmt;

use thiserror::Error;

use crate::automaton::{Acceptance, Automaton, StateId};
use crate::graph;
use crate::slice::{self, Slice};

/// An ultimately periodic word u·v^ω given by a finite prefix and a nonempty
/// period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    pub prefix: Vec<String>,
    pub period: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("lasso period must be nonempty")]
    EmptyPeriod,
    #[error("symbol `{0}` not in the automaton alphabet")]
    UnknownSymbol(String),
    #[error("alphabet mismatch between compared automata")]
    AlphabetMismatch,
    #[error("operation requires Büchi acceptance")]
    ExpectedBuchi,
}

impl LassoWord {
    pub fn new(prefix: Vec<String>, period: Vec<String>) -> Result<Self, OracleError> {
        if period.is_empty() {
            return Err(OracleError::EmptyPeriod);
        }
        Ok(LassoWord { prefix, period })
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.prefix {
            write!(f, "{s} ")?;
        }
        write!(f, "(")?;
        for (i, s) in self.period.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")^w")
    }
}

/// Outcome of a bounded language comparison. `Fail` carries the first
/// counterexample in enumeration order with both membership verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail {
        witness: LassoWord,
        in_a: bool,
        in_b: bool,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Symbol indices of u·v laid out as one position sequence; position
/// `prefix.len()..` is the periodic part.
fn positions(a: &Automaton, w: &LassoWord) -> Result<Vec<usize>, OracleError> {
    w.prefix
        .iter()
        .chain(w.period.iter())
        .map(|s| {
            a.symbol_index(s)
                .ok_or_else(|| OracleError::UnknownSymbol(s.clone()))
        })
        .collect()
}

/// Reachable part of the product of `a` with the lasso positions. Returns
/// the product adjacency plus the automaton state of every product node.
fn product(a: &Automaton, w: &LassoWord) -> Result<(Vec<Vec<usize>>, Vec<StateId>), OracleError> {
    let syms = positions(a, w)?;
    let len = syms.len();
    let wrap = w.prefix.len();
    let mut id = vec![usize::MAX; a.num_states() * len];
    let mut nodes: Vec<(StateId, usize)> = Vec::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut work: Vec<usize> = Vec::new();

    let start_key = a.initial() * len;
    id[start_key] = 0;
    nodes.push((a.initial(), 0));
    adj.push(Vec::new());
    work.push(0);

    while let Some(n) = work.pop() {
        let (q, pos) = nodes[n];
        let next_pos = if pos + 1 < len { pos + 1 } else { wrap };
        for &succ in a.successors(q, syms[pos]) {
            let key = succ * len + next_pos;
            let m = if id[key] != usize::MAX {
                id[key]
            } else {
                let m = nodes.len();
                id[key] = m;
                nodes.push((succ, next_pos));
                adj.push(Vec::new());
                work.push(m);
                m
            };
            adj[n].push(m);
        }
    }
    let states = nodes.into_iter().map(|(q, _)| q).collect();
    Ok((adj, states))
}

/// True iff some run of the NBW on u·v^ω is accepting: an accepting state
/// lies on a reachable cycle of the product graph.
pub fn member_nbw(a: &Automaton, w: &LassoWord) -> Result<bool, OracleError> {
    let accepting = match a.acceptance() {
        Acceptance::Buchi(set) => set.clone(),
        Acceptance::Parity(_) => return Err(OracleError::ExpectedBuchi),
    };
    let (adj, states) = product(a, w)?;
    let cyclic = graph::on_cycle(&adj);
    Ok((0..adj.len()).any(|n| cyclic[n] && accepting.contains(&states[n])))
}

/// True iff some run of the NPW on u·v^ω has an even minimal priority on its
/// periodic cycle: for some even d there is a reachable cycle through a
/// priority-d node inside the subgraph of nodes with priority >= d.
pub fn member_npw(a: &Automaton, w: &LassoWord) -> Result<bool, OracleError> {
    let priorities = a
        .priorities()
        .map_err(|_| OracleError::ExpectedBuchi)?
        .to_vec();
    let (adj, states) = product(a, w)?;
    let max_p = priorities.iter().copied().max().unwrap_or(0);
    for d in (0..=max_p).step_by(2) {
        // restrict to nodes of priority >= d by redirecting edges; keep node
        // ids stable and cut edges touching excluded nodes
        let restricted: Vec<Vec<usize>> = adj
            .iter()
            .enumerate()
            .map(|(n, succs)| {
                if priorities[states[n]] < d {
                    Vec::new()
                } else {
                    succs
                        .iter()
                        .copied()
                        .filter(|&m| priorities[states[m]] >= d)
                        .collect()
                }
            })
            .collect();
        let cyclic = graph::on_cycle(&restricted);
        if (0..adj.len()).any(|n| cyclic[n] && priorities[states[n]] == d) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Membership dispatched on the acceptance condition.
pub fn member(a: &Automaton, w: &LassoWord) -> Result<bool, OracleError> {
    match a.acceptance() {
        Acceptance::Buchi(_) => member_nbw(a, w),
        Acceptance::Parity(_) => member_npw(a, w),
    }
}

/// All lassos (u, v) with |u| <= max_u and 1 <= |v| <= max_v over the given
/// alphabet, ordered by length then lexicographically (prefix outer, period
/// inner).
pub fn enumerate_lassos(alphabet: &[String], max_u: usize, max_v: usize) -> Vec<LassoWord> {
    let words = |min_len: usize, max_len: usize| -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for len in min_len..=max_len {
            let mut idx = vec![0usize; len];
            'this_len: loop {
                out.push(idx.iter().map(|&i| alphabet[i].clone()).collect());
                // odometer increment, most significant digit first
                let mut pos = len;
                loop {
                    if pos == 0 {
                        break 'this_len; // wrapped around: length exhausted
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < alphabet.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        out
    };
    let prefixes = words(0, max_u);
    let periods = words(1, max_v);
    let mut lassos = Vec::with_capacity(prefixes.len() * periods.len());
    for u in &prefixes {
        for v in &periods {
            lassos.push(LassoWord {
                prefix: u.clone(),
                period: v.clone(),
            });
        }
    }
    lassos
}

/// Pass iff membership in `a` and `b` differ on every enumerated lasso.
pub fn check_complement(
    a: &Automaton,
    b: &Automaton,
    max_u: usize,
    max_v: usize,
) -> Result<Verdict, OracleError> {
    compare(a, b, max_u, max_v, |x, y| x != y)
}

/// Pass iff membership in `a` and `b` agree on every enumerated lasso.
pub fn check_equivalent(
    a: &Automaton,
    b: &Automaton,
    max_u: usize,
    max_v: usize,
) -> Result<Verdict, OracleError> {
    compare(a, b, max_u, max_v, |x, y| x == y)
}

fn compare(
    a: &Automaton,
    b: &Automaton,
    max_u: usize,
    max_v: usize,
    ok: impl Fn(bool, bool) -> bool,
) -> Result<Verdict, OracleError> {
    if a.alphabet() != b.alphabet() {
        return Err(OracleError::AlphabetMismatch);
    }
    for w in enumerate_lassos(a.alphabet(), max_u, max_v) {
        let in_a = member(a, &w)?;
        let in_b = member(b, &w)?;
        if !ok(in_a, in_b) {
            return Ok(Verdict::Fail {
                witness: w,
                in_a,
                in_b,
            });
        }
    }
    Ok(Verdict::Pass)
}

/// The slice at every level of the reduced split tree along a finite word,
/// starting from the root slice ({q0}); length is |word| + 1.
pub fn reduced_split_tree_prefix(
    a: &Automaton,
    word: &[String],
) -> Result<Vec<Slice>, OracleError> {
    if !matches!(a.acceptance(), Acceptance::Buchi(_)) {
        return Err(OracleError::ExpectedBuchi);
    }
    let mut levels = vec![Slice::initial(a.initial())];
    for s in word {
        let sym = a
            .symbol_index(s)
            .ok_or_else(|| OracleError::UnknownSymbol(s.clone()))?;
        let next = slice::slice_successor(a, levels.last().unwrap(), sym).expect("undecorated");
        levels.push(next);
    }
    Ok(levels)
}
