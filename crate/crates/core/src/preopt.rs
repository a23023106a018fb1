//! Input-side heuristics: acceptance-set maximization (+A) and
//! simulation-based simplification (+P for NBWs; the parity variant is
//! re-exported by the parity pipeline as +S).

use std::collections::BTreeSet;

use crate::automaton::{Acceptance, Automaton, AutomatonError, StateId};
use crate::graph;

/// Flavor of a simulation relation: forward transfer over successors, or
/// backward transfer over predecessors (which additionally respects the
/// initial state).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimKind {
    Direct,
    Reverse,
}

/// Set of ordered pairs (p, q) meaning "p is simulated by q"; a greatest
/// fixpoint, hence reflexive and transitive.
#[derive(Debug, Clone)]
pub struct SimulationRelation {
    pub kind: SimKind,
    rel: Vec<Vec<bool>>,
}

impl SimulationRelation {
    pub fn contains(&self, p: StateId, q: StateId) -> bool {
        self.rel[p][q]
    }

    pub fn equivalent(&self, p: StateId, q: StateId) -> bool {
        self.rel[p][q] && self.rel[q][p]
    }

    /// p strictly below q: p simulated by q but not conversely.
    pub fn strictly_below(&self, p: StateId, q: StateId) -> bool {
        self.rel[p][q] && !self.rel[q][p]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.rel.iter().enumerate().flat_map(|(p, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(q, &b)| b.then_some((p, q)))
        })
    }
}

fn local_condition(a: &Automaton, kind: SimKind, p: StateId, q: StateId) -> bool {
    let acc_ok = match a.acceptance() {
        Acceptance::Buchi(f) => !f.contains(&p) || f.contains(&q),
        Acceptance::Parity(pri) => pri[p] == pri[q],
    };
    let init_ok = kind == SimKind::Direct || p != a.initial() || q == a.initial();
    acc_ok && init_ok
}

/// Greatest simulation relation of the requested flavor, computed by
/// initializing with the local condition and deleting pairs that violate the
/// transfer condition until stable.
pub fn compute_simulation(a: &Automaton, kind: SimKind) -> SimulationRelation {
    let n = a.num_states();
    let num_syms = a.alphabet().len();
    // move function per direction: successors or predecessors
    let moves: Vec<Vec<Vec<StateId>>> = match kind {
        SimKind::Direct => (0..n)
            .map(|q| {
                (0..num_syms)
                    .map(|s| a.successors(q, s).iter().copied().collect())
                    .collect()
            })
            .collect(),
        SimKind::Reverse => {
            let mut pred = vec![vec![Vec::new(); num_syms]; n];
            for (src, sym, dst) in a.transitions() {
                pred[dst][sym].push(src);
            }
            pred
        }
    };
    let mut rel: Vec<Vec<bool>> = (0..n)
        .map(|p| (0..n).map(|q| local_condition(a, kind, p, q)).collect())
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for p in 0..n {
            for q in 0..n {
                if !rel[p][q] || p == q {
                    continue;
                }
                let transfer = (0..num_syms).all(|s| {
                    moves[p][s]
                        .iter()
                        .all(|&ps| moves[q][s].iter().any(|&qs| rel[ps][qs]))
                });
                if !transfer {
                    rel[p][q] = false;
                    changed = true;
                }
            }
        }
    }
    SimulationRelation { kind, rel }
}

/// +A: enlarge the Büchi acceptance set to G ⊇ F where a state joins G iff
/// it lies on no cycle of the transition digraph restricted to Q − F, i.e.
/// it cannot return to itself without passing an accepting state. Language,
/// states, and transitions are unchanged.
pub fn maximize_acceptance(a: &Automaton) -> Result<Automaton, AutomatonError> {
    let f = a.buchi_states()?.clone();
    let adj = a.digraph();
    let restricted: Vec<Vec<usize>> = adj
        .iter()
        .enumerate()
        .map(|(q, succs)| {
            if f.contains(&q) {
                Vec::new()
            } else {
                succs.iter().copied().filter(|t| !f.contains(t)).collect()
            }
        })
        .collect();
    let cyclic = graph::on_cycle(&restricted);
    let enlarged: BTreeSet<StateId> = (0..a.num_states())
        .filter(|&q| f.contains(&q) || !cyclic[q])
        .collect();
    let mut out = a.clone();
    out.set_acceptance(Acceptance::Buchi(enlarged))?;
    Ok(out)
}

/// Quotient by mutual direct simulation, then prune transitions dominated
/// under direct simulation, then under reverse simulation, then drop
/// unreachable states. Works for both Büchi and parity acceptance; the
/// local condition dispatches on the acceptance kind.
pub fn simplify(a: &Automaton) -> Automaton {
    let direct = compute_simulation(a, SimKind::Direct);
    let quotiented = quotient(a, &direct);

    let direct = compute_simulation(&quotiented, SimKind::Direct);
    let pruned = prune_transitions(&quotiented, &direct);

    let reverse = compute_simulation(&pruned, SimKind::Reverse);
    let pruned = prune_transitions(&pruned, &reverse);

    restrict_to_reachable(&pruned)
}

/// +P: simulation-based preminimization of an NBW.
pub fn simplify_nbw(a: &Automaton) -> Result<Automaton, AutomatonError> {
    a.buchi_states()?;
    Ok(simplify(a))
}

fn quotient(a: &Automaton, sim: &SimulationRelation) -> Automaton {
    let n = a.num_states();
    let mut class_of = vec![usize::MAX; n];
    let mut reps: Vec<StateId> = Vec::new();
    for q in 0..n {
        match (0..q).find(|&p| class_of[p] != usize::MAX && sim.equivalent(p, q)) {
            Some(p) => class_of[q] = class_of[p],
            None => {
                class_of[q] = reps.len();
                reps.push(q);
            }
        }
    }
    let acceptance = match a.acceptance() {
        Acceptance::Buchi(f) => {
            Acceptance::Buchi(reps.iter().enumerate().filter(|(_, r)| f.contains(r)).map(|(c, _)| c).collect())
        }
        Acceptance::Parity(pri) => Acceptance::Parity(reps.iter().map(|&r| pri[r]).collect()),
    };
    let mut out = Automaton::new(
        a.alphabet().to_vec(),
        reps.len(),
        class_of[a.initial()],
        acceptance,
    )
    .expect("quotient is well-formed");
    for (src, sym, dst) in a.transitions() {
        out.add_transition(class_of[src], sym, class_of[dst])
            .expect("in range");
    }
    out
}

/// Removes transitions dominated by a sibling. For direct simulation a
/// transition (p, a, r) is dropped when some (p, a, r') has r strictly below
/// r'; for reverse simulation (p, a, r) is dropped when some (p', a, r) has
/// p strictly below p'.
fn prune_transitions(a: &Automaton, sim: &SimulationRelation) -> Automaton {
    let mut out = Automaton::new(
        a.alphabet().to_vec(),
        a.num_states(),
        a.initial(),
        a.acceptance().clone(),
    )
    .expect("same shape");
    let num_syms = a.alphabet().len();
    match sim.kind {
        SimKind::Direct => {
            for p in 0..a.num_states() {
                for s in 0..num_syms {
                    let succs = a.successors(p, s);
                    for &r in succs {
                        let dominated = succs
                            .iter()
                            .any(|&r2| r2 != r && sim.strictly_below(r, r2));
                        if !dominated {
                            out.add_transition(p, s, r).expect("in range");
                        }
                    }
                }
            }
        }
        SimKind::Reverse => {
            let mut pred = vec![vec![Vec::new(); num_syms]; a.num_states()];
            for (src, sym, dst) in a.transitions() {
                pred[dst][sym].push(src);
            }
            for (p, sym, r) in a.transitions() {
                let dominated = pred[r][sym]
                    .iter()
                    .any(|&p2| p2 != p && sim.strictly_below(p, p2));
                if !dominated {
                    out.add_transition(p, sym, r).expect("in range");
                }
            }
        }
    }
    out
}

fn restrict_to_reachable(a: &Automaton) -> Automaton {
    let keep = crate::automaton::reachable(a);
    let old_ids: Vec<StateId> = keep.iter().copied().collect();
    let mut new_id = vec![usize::MAX; a.num_states()];
    for (fresh, &old) in old_ids.iter().enumerate() {
        new_id[old] = fresh;
    }
    let acceptance = match a.acceptance() {
        Acceptance::Buchi(f) => Acceptance::Buchi(
            f.iter()
                .filter(|q| keep.contains(q))
                .map(|&q| new_id[q])
                .collect(),
        ),
        Acceptance::Parity(pri) => {
            Acceptance::Parity(old_ids.iter().map(|&q| pri[q]).collect())
        }
    };
    let mut out = Automaton::new(
        a.alphabet().to_vec(),
        old_ids.len(),
        new_id[a.initial()],
        acceptance,
    )
    .expect("restriction is well-formed");
    for (src, sym, dst) in a.transitions() {
        if keep.contains(&src) && keep.contains(&dst) {
            out.add_transition(new_id[src], sym, new_id[dst])
                .expect("in range");
        }
    }
    out
}
