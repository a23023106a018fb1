//! Slice-based complementation: the basic construction and the improved one
//! with independently toggleable heuristics.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use thiserror::Error;

use crate::automaton::{Acceptance, Automaton};
use crate::slice::{self, Slice};

/// Heuristic flags of the slice construction: deterministic decoration (+D),
/// reducing transitions (+R), and merging adjacent nodes (+M). Any subset is
/// legal; the paper's improved construction is all three.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SliceConfig {
    pub use_d: bool,
    pub use_r: bool,
    pub use_m: bool,
}

impl SliceConfig {
    pub fn basic() -> Self {
        SliceConfig::default()
    }

    pub fn improved() -> Self {
        SliceConfig {
            use_d: true,
            use_r: true,
            use_m: true,
        }
    }
}

/// Resource limits of a single construction. The state cap stands in for a
/// memory cap; the optional deadline implements wall-clock timeouts.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_states: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            deadline: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplementError {
    #[error("state budget exceeded after building {0} states")]
    BudgetExceeded(usize),
    #[error("construction timed out")]
    TimedOut,
    #[error("slice complementation requires Büchi acceptance")]
    ExpectedBuchi,
}

/// A constructed complement together with the printable slice label of every
/// state, in state order.
#[derive(Debug, Clone)]
pub struct SliceComplement {
    pub automaton: Automaton,
    pub labels: Vec<String>,
}

/// Complements an NBW with the slice construction under the given heuristic
/// flags. Only reachable slices are built, breadth first from the initial
/// undecorated slice; state numbering follows discovery order.
pub fn complement_slice(
    a: &Automaton,
    cfg: SliceConfig,
    limits: Limits,
) -> Result<SliceComplement, ComplementError> {
    if !matches!(a.acceptance(), Acceptance::Buchi(_)) {
        return Err(ComplementError::ExpectedBuchi);
    }

    let mut ids: HashMap<Slice, usize> = HashMap::new();
    let mut slices: Vec<Slice> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut transitions: Vec<(usize, usize, usize)> = Vec::new();

    let mut intern = |s: Slice,
                      slices: &mut Vec<Slice>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize, ComplementError> {
        if let Some(&id) = ids.get(&s) {
            return Ok(id);
        }
        if slices.len() >= limits.max_states {
            return Err(ComplementError::BudgetExceeded(slices.len()));
        }
        let id = slices.len();
        ids.insert(s.clone(), id);
        slices.push(s);
        queue.push_back(id);
        Ok(id)
    };

    let init = intern(Slice::initial(a.initial()), &mut slices, &mut queue)?;
    debug_assert_eq!(init, 0);

    while let Some(src) = queue.pop_front() {
        if let Some(deadline) = limits.deadline {
            if Instant::now() >= deadline {
                return Err(ComplementError::TimedOut);
            }
        }
        let s = slices[src].clone();
        for sym in 0..a.alphabet().len() {
            if s.is_bottom() {
                // ⊥ is one state, simultaneously undecorated and decorated,
                // with a self-loop on every symbol
                transitions.push((src, sym, src));
                continue;
            }
            if s.is_undecorated() {
                let u = slice_successor(a, &s, sym);
                let u_id = intern(u, &mut slices, &mut queue)?;
                transitions.push((src, sym, u_id));
                for guess in slice::guess_decorations(a, &s, sym, cfg.use_d).expect("undecorated") {
                    let guess = if cfg.use_m {
                        slice::merge(&guess).expect("decorated")
                    } else {
                        guess
                    };
                    if cfg.use_r
                        && !guess.is_bottom()
                        && guess.is_doomed().expect("decorated")
                    {
                        continue;
                    }
                    let g_id = intern(guess, &mut slices, &mut queue)?;
                    transitions.push((src, sym, g_id));
                }
            } else {
                let Some(t) = slice::decorated_successor(a, &s, sym, cfg.use_d).expect("decorated")
                else {
                    continue; // C1 failed, no successor on this symbol
                };
                let t = if cfg.use_m {
                    slice::merge(&t).expect("decorated")
                } else {
                    t
                };
                if cfg.use_r && (t.is_bottom() || t.is_doomed().expect("decorated")) {
                    continue;
                }
                let t_id = intern(t, &mut slices, &mut queue)?;
                transitions.push((src, sym, t_id));
            }
        }
    }

    let accepting = slices
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_decorated() && s.is_reset().expect("decorated"))
        .map(|(id, _)| id)
        .collect();
    let mut automaton = Automaton::new(
        a.alphabet().to_vec(),
        slices.len(),
        0,
        Acceptance::Buchi(accepting),
    )
    .expect("well-formed complement");
    for (src, sym, dst) in transitions {
        automaton.add_transition(src, sym, dst).expect("in range");
    }
    Ok(SliceComplement {
        automaton,
        labels: slices.iter().map(|s| s.to_string()).collect(),
    })
}

fn slice_successor(a: &Automaton, s: &Slice, sym: usize) -> Slice {
    slice::slice_successor(a, s, sym).expect("undecorated")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::{a_fig1, universal1};
    use crate::automaton::{self, Acceptance, Automaton};
    use crate::oracle::{self, LassoWord};
    use std::collections::BTreeSet;

    fn word(prefix: &[&str], period: &[&str]) -> LassoWord {
        LassoWord::new(
            prefix.iter().map(|s| s.to_string()).collect(),
            period.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn fig1_complement_improved_accepts_rejected_words() {
        let a = a_fig1();
        let c = complement_slice(&a, SliceConfig::improved(), Limits::default()).unwrap();
        let c = &c.automaton;
        assert!(oracle::member_nbw(c, &word(&[], &["p", "!p"])).unwrap());
        assert!(oracle::member_nbw(c, &word(&[], &["!p"])).unwrap());
        assert!(!oracle::member_nbw(c, &word(&["p", "!p"], &["p"])).unwrap());
        assert!(!oracle::member_nbw(c, &word(&[], &["p"])).unwrap());
    }

    #[test]
    fn universal_complement_has_no_live_states() {
        let c = complement_slice(&universal1(), SliceConfig::basic(), Limits::default()).unwrap();
        assert!(automaton::live(&c.automaton).unwrap().is_empty());
        let c = complement_slice(&universal1(), SliceConfig::improved(), Limits::default()).unwrap();
        assert!(automaton::live(&c.automaton).unwrap().is_empty());
    }

    #[test]
    fn empty_language_complement_is_universal_on_lassos() {
        let mut a = Automaton::new(
            vec!["a".into(), "b".into()],
            2,
            0,
            Acceptance::Buchi(BTreeSet::new()),
        )
        .unwrap();
        a.add_transition(0, 0, 1).unwrap();
        a.add_transition(1, 1, 0).unwrap();
        let c = complement_slice(&a, SliceConfig::improved(), Limits::default()).unwrap();
        for w in oracle::enumerate_lassos(a.alphabet(), 2, 3) {
            assert!(oracle::member_nbw(&c.automaton, &w).unwrap(), "rejected {w}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let limits = Limits {
            max_states: 1,
            deadline: None,
        };
        let err = complement_slice(&a_fig1(), SliceConfig::basic(), limits).unwrap_err();
        assert!(matches!(err, ComplementError::BudgetExceeded(_)));
    }

    #[test]
    fn rejects_parity_input() {
        let a = Automaton::new(vec!["a".into()], 1, 0, Acceptance::Parity(vec![0])).unwrap();
        let err = complement_slice(&a, SliceConfig::basic(), Limits::default()).unwrap_err();
        assert_eq!(err, ComplementError::ExpectedBuchi);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = a_fig1();
        let c1 = complement_slice(&a, SliceConfig::basic(), Limits::default()).unwrap();
        let c2 = complement_slice(&a, SliceConfig::basic(), Limits::default()).unwrap();
        assert_eq!(c1.automaton, c2.automaton);
        assert_eq!(c1.labels, c2.labels);
    }
}
