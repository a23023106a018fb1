//! Core ω-automaton representation shared by all constructions.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph;

/// States are dense indices `0..num_states`.
pub type StateId = usize;

/// Büchi or parity acceptance. The parity map is total over the states; the
/// minimal priority seen infinitely often must be even for acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acceptance {
    Buchi(BTreeSet<StateId>),
    Parity(Vec<u32>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("initial state {0} out of range (num_states = {1})")]
    InitialOutOfRange(StateId, usize),
    #[error("transition endpoint {0} out of range (num_states = {1})")]
    StateOutOfRange(StateId, usize),
    #[error("symbol index {0} out of range (alphabet size = {1})")]
    SymbolOutOfRange(usize, usize),
    #[error("accepting state {0} out of range (num_states = {1})")]
    AcceptanceOutOfRange(StateId, usize),
    #[error("parity map covers {0} states but the automaton has {1}")]
    ParityMapSize(usize, usize),
    #[error("operation requires Büchi acceptance")]
    ExpectedBuchi,
    #[error("operation requires parity acceptance")]
    ExpectedParity,
    #[error("operation requires a deterministic automaton; state {0} has {2} successors on symbol index {1}")]
    NotDeterministic(StateId, usize, usize),
    #[error("automaton must have at least one state")]
    NoStates,
}

/// A nondeterministic ω-automaton with a total transition map; a missing
/// entry is the empty successor set, in which case runs die.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    alphabet: Vec<String>,
    num_states: usize,
    initial: StateId,
    /// Indexed `[state][symbol]`.
    transitions: Vec<Vec<BTreeSet<StateId>>>,
    acceptance: Acceptance,
}

impl Automaton {
    pub fn new(
        alphabet: Vec<String>,
        num_states: usize,
        initial: StateId,
        acceptance: Acceptance,
    ) -> Result<Self, AutomatonError> {
        if num_states == 0 {
            return Err(AutomatonError::NoStates);
        }
        if initial >= num_states {
            return Err(AutomatonError::InitialOutOfRange(initial, num_states));
        }
        match &acceptance {
            Acceptance::Buchi(set) => {
                if let Some(&q) = set.iter().find(|&&q| q >= num_states) {
                    return Err(AutomatonError::AcceptanceOutOfRange(q, num_states));
                }
            }
            Acceptance::Parity(map) => {
                if map.len() != num_states {
                    return Err(AutomatonError::ParityMapSize(map.len(), num_states));
                }
            }
        }
        let transitions = vec![vec![BTreeSet::new(); alphabet.len()]; num_states];
        Ok(Automaton {
            alphabet,
            num_states,
            initial,
            transitions,
            acceptance,
        })
    }

    pub fn add_transition(
        &mut self,
        src: StateId,
        sym: usize,
        dst: StateId,
    ) -> Result<(), AutomatonError> {
        if src >= self.num_states {
            return Err(AutomatonError::StateOutOfRange(src, self.num_states));
        }
        if dst >= self.num_states {
            return Err(AutomatonError::StateOutOfRange(dst, self.num_states));
        }
        if sym >= self.alphabet.len() {
            return Err(AutomatonError::SymbolOutOfRange(sym, self.alphabet.len()));
        }
        self.transitions[src][sym].insert(dst);
        Ok(())
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == name)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    pub fn set_acceptance(&mut self, acceptance: Acceptance) -> Result<(), AutomatonError> {
        match &acceptance {
            Acceptance::Buchi(set) => {
                if let Some(&q) = set.iter().find(|&&q| q >= self.num_states) {
                    return Err(AutomatonError::AcceptanceOutOfRange(q, self.num_states));
                }
            }
            Acceptance::Parity(map) => {
                if map.len() != self.num_states {
                    return Err(AutomatonError::ParityMapSize(map.len(), self.num_states));
                }
            }
        }
        self.acceptance = acceptance;
        Ok(())
    }

    pub fn successors(&self, state: StateId, sym: usize) -> &BTreeSet<StateId> {
        &self.transitions[state][sym]
    }

    pub fn buchi_states(&self) -> Result<&BTreeSet<StateId>, AutomatonError> {
        match &self.acceptance {
            Acceptance::Buchi(set) => Ok(set),
            Acceptance::Parity(_) => Err(AutomatonError::ExpectedBuchi),
        }
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        match &self.acceptance {
            Acceptance::Buchi(set) => set.contains(&state),
            Acceptance::Parity(_) => false,
        }
    }

    pub fn priorities(&self) -> Result<&[u32], AutomatonError> {
        match &self.acceptance {
            Acceptance::Parity(map) => Ok(map),
            Acceptance::Buchi(_) => Err(AutomatonError::ExpectedParity),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.transitions
            .iter()
            .all(|row| row.iter().all(|set| set.len() == 1))
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions
            .iter()
            .map(|row| row.iter().map(|set| set.len()).sum::<usize>())
            .sum()
    }

    /// All transitions as `(src, sym, dst)` triples in `(src, sym, dst)` order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, usize, StateId)> + '_ {
        self.transitions.iter().enumerate().flat_map(|(src, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(sym, set)| set.iter().map(move |&dst| (src, sym, dst)))
        })
    }

    /// Successor adjacency ignoring symbols, deduplicated.
    pub(crate) fn digraph(&self) -> Vec<Vec<usize>> {
        self.transitions
            .iter()
            .map(|row| {
                let mut succs: BTreeSet<usize> = BTreeSet::new();
                for set in row {
                    succs.extend(set.iter().copied());
                }
                succs.into_iter().collect()
            })
            .collect()
    }
}

/// Reachable and live state counts of an automaton (the S_R and S_L metrics).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateStats {
    pub reachable_count: usize,
    pub live_count: usize,
}

/// States reachable from the initial state.
pub fn reachable(a: &Automaton) -> BTreeSet<StateId> {
    let seen = graph::reachable_from(&a.digraph(), a.initial());
    seen.iter()
        .enumerate()
        .filter_map(|(q, &s)| s.then_some(q))
        .collect()
}

/// States occurring on some accepting run: reachable from the initial state
/// and able to reach an accepting state that lies on a cycle.
pub fn live(a: &Automaton) -> Result<BTreeSet<StateId>, AutomatonError> {
    let accepting = a.buchi_states()?.clone();
    let adj = a.digraph();
    let cyclic = graph::on_cycle(&adj);
    let good: Vec<usize> = accepting
        .iter()
        .copied()
        .filter(|&q| cyclic[q])
        .collect();
    let reach_good = graph::can_reach(&adj, &good);
    let from_init = graph::reachable_from(&adj, a.initial());
    Ok((0..a.num_states())
        .filter(|&q| from_init[q] && reach_good[q])
        .collect())
}

/// Reachable and live counts. Live count is 0 for empty-language automata,
/// independent of the initial state being retained by `prune_dead`.
pub fn state_stats(a: &Automaton) -> Result<StateStats, AutomatonError> {
    Ok(StateStats {
        reachable_count: reachable(a).len(),
        live_count: live(a)?.len(),
    })
}

/// Restriction of the automaton to its live states. The initial state is
/// retained even when dead so the result is well formed; the language is
/// preserved.
pub fn prune_dead(a: &Automaton) -> Result<Automaton, AutomatonError> {
    let mut keep = live(a)?;
    keep.insert(a.initial());
    let old_ids: Vec<StateId> = keep.iter().copied().collect();
    let mut new_id = vec![usize::MAX; a.num_states()];
    for (fresh, &old) in old_ids.iter().enumerate() {
        new_id[old] = fresh;
    }
    let accepting: BTreeSet<StateId> = a
        .buchi_states()?
        .iter()
        .filter(|q| keep.contains(q))
        .map(|&q| new_id[q])
        .collect();
    let mut pruned = Automaton::new(
        a.alphabet().to_vec(),
        old_ids.len(),
        new_id[a.initial()],
        Acceptance::Buchi(accepting),
    )?;
    for (src, sym, dst) in a.transitions() {
        if keep.contains(&src) && keep.contains(&dst) {
            pruned.add_transition(new_id[src], sym, new_id[dst])?;
        }
    }
    Ok(pruned)
}
