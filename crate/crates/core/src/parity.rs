//! Post-stages of the determinization pipeline: DPW complementation,
//! simulation-based NPW simplification (+S), and the typical and improved
//! (+E) parity-to-Büchi conversions.
//!
//! The NBW-to-DPW determinizer itself is out of scope; these stages consume
//! deterministic parity automata built elsewhere or loaded from files.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::automaton::{Acceptance, Automaton, AutomatonError, StateId};

/// Equivalence class of states with respect to an even pivot parity: all
/// members share every successor set and fall in the same band of
/// {F = pivot, F > pivot, F < pivot}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParityClass {
    pub members: BTreeSet<StateId>,
    pub pivot: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Band {
    Below,
    At,
    Above,
}

fn band(priority: u32, pivot: u32) -> Band {
    match priority.cmp(&pivot) {
        std::cmp::Ordering::Less => Band::Below,
        std::cmp::Ordering::Equal => Band::At,
        std::cmp::Ordering::Greater => Band::Above,
    }
}

/// Complements a DPW by incrementing every priority, flipping the min-even
/// acceptance. Structure is untouched; nondeterministic input is rejected.
pub fn complement_dpw(a: &Automaton) -> Result<Automaton, AutomatonError> {
    let priorities = a.priorities()?;
    if !a.is_deterministic() {
        for q in 0..a.num_states() {
            for s in 0..a.alphabet().len() {
                let n = a.successors(q, s).len();
                if n != 1 {
                    return Err(AutomatonError::NotDeterministic(q, s, n));
                }
            }
        }
    }
    let mut out = a.clone();
    let bumped: Vec<u32> = priorities.iter().map(|&p| p + 1).collect();
    out.set_acceptance(Acceptance::Parity(bumped))?;
    Ok(out)
}

/// +S: simulation-based simplification of an NPW (typically a complement
/// DPW). The result may be nondeterministic; the language is preserved.
pub fn simplify_npw(a: &Automaton) -> Result<Automaton, AutomatonError> {
    a.priorities()?;
    Ok(crate::preopt::simplify(a))
}

/// Number of even tracks {0, 2, ..., 2r} with r = ⌈maxP/2⌉.
fn track_bound(priorities: &[u32]) -> u32 {
    let max_p = priorities.iter().copied().max().unwrap_or(0);
    max_p.div_ceil(2)
}

/// Typical NPW→NBW conversion: guess the minimal even parity passed
/// infinitely often. States are (state, track) pairs; only the reachable
/// part is built.
pub fn parity_to_buchi_typical(p: &Automaton) -> Result<Automaton, AutomatonError> {
    let priorities = p.priorities()?.to_vec();
    let r = track_bound(&priorities);
    let num_syms = p.alphabet().len();

    let mut ids: HashMap<(StateId, u32), usize> = HashMap::new();
    let mut nodes: Vec<(StateId, u32)> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut transitions: Vec<(usize, usize, usize)> = Vec::new();
    let mut intern = |node: (StateId, u32),
                      nodes: &mut Vec<(StateId, u32)>,
                      queue: &mut VecDeque<usize>| {
        *ids.entry(node).or_insert_with(|| {
            let id = nodes.len();
            nodes.push(node);
            queue.push_back(id);
            id
        })
    };
    intern((p.initial(), 0), &mut nodes, &mut queue);

    while let Some(src) = queue.pop_front() {
        let (q, track) = nodes[src];
        for sym in 0..num_syms {
            for &succ in p.successors(q, sym) {
                if track == 0 {
                    // stay on track 0 (the priority bound is vacuous there)
                    let dst = intern((succ, 0), &mut nodes, &mut queue);
                    transitions.push((src, sym, dst));
                    // guess any even parity 2k, k > 0, with no restriction
                    // on the entry state
                    for k in 1..=r {
                        let dst = intern((succ, 2 * k), &mut nodes, &mut queue);
                        transitions.push((src, sym, dst));
                    }
                } else if priorities[succ] >= track {
                    let dst = intern((succ, track), &mut nodes, &mut queue);
                    transitions.push((src, sym, dst));
                }
            }
        }
    }

    let accepting: BTreeSet<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, &(q, track))| priorities[q] == track)
        .map(|(id, _)| id)
        .collect();
    let mut out = Automaton::new(
        p.alphabet().to_vec(),
        nodes.len(),
        0,
        Acceptance::Buchi(accepting),
    )?;
    for (src, sym, dst) in transitions {
        out.add_transition(src, sym, dst)?;
    }
    Ok(out)
}

/// Partition of the states by equivalence with respect to an even pivot.
pub fn parity_equiv_classes(
    p: &Automaton,
    pivot: u32,
) -> Result<Vec<ParityClass>, AutomatonError> {
    if pivot % 2 != 0 {
        return Err(AutomatonError::ExpectedParity);
    }
    let priorities = p.priorities()?;
    let num_syms = p.alphabet().len();
    let mut groups: BTreeMap<(Vec<BTreeSet<StateId>>, Band), BTreeSet<StateId>> = BTreeMap::new();
    for q in 0..p.num_states() {
        let succs: Vec<BTreeSet<StateId>> =
            (0..num_syms).map(|s| p.successors(q, s).clone()).collect();
        groups
            .entry((succs, band(priorities[q], pivot)))
            .or_default()
            .insert(q);
    }
    Ok(groups
        .into_values()
        .map(|members| ParityClass { members, pivot })
        .collect())
}

/// +E: improved NPW→NBW conversion over equivalence classes, with guesses
/// delayed to targets whose parity equals the guessed track.
pub fn parity_to_buchi_improved(p: &Automaton) -> Result<Automaton, AutomatonError> {
    let priorities = p.priorities()?.to_vec();
    let r = track_bound(&priorities);
    let num_syms = p.alphabet().len();

    // class id per state for every even pivot 0, 2, ..., 2r
    let mut class_of: Vec<Vec<usize>> = Vec::new(); // [k][state] -> class index
    let mut class_members: Vec<Vec<BTreeSet<StateId>>> = Vec::new();
    for k in 0..=r {
        let classes = parity_equiv_classes(p, 2 * k)?;
        let mut of = vec![usize::MAX; p.num_states()];
        for (i, class) in classes.iter().enumerate() {
            for &q in &class.members {
                of[q] = i;
            }
            // all members share every successor set
            debug_assert!({
                let rep = *class.members.iter().next().unwrap();
                class.members.iter().all(|&q| {
                    (0..num_syms).all(|s| p.successors(q, s) == p.successors(rep, s))
                })
            });
        }
        class_of.push(of);
        class_members.push(classes.into_iter().map(|c| c.members).collect());
    }

    // node: (class index at pivot `track`, track)
    let mut ids: HashMap<(usize, u32), usize> = HashMap::new();
    let mut nodes: Vec<(usize, u32)> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut transitions: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut intern = |node: (usize, u32),
                      nodes: &mut Vec<(usize, u32)>,
                      queue: &mut VecDeque<usize>| {
        *ids.entry(node).or_insert_with(|| {
            let id = nodes.len();
            nodes.push(node);
            queue.push_back(id);
            id
        })
    };
    intern((class_of[0][p.initial()], 0), &mut nodes, &mut queue);

    while let Some(src) = queue.pop_front() {
        let (class, track) = nodes[src];
        let k = (track / 2) as usize;
        let rep = *class_members[k][class].iter().next().unwrap();
        for sym in 0..num_syms {
            for &succ in p.successors(rep, sym) {
                if track == 0 {
                    // TR2 within track 0: F(succ) >= 0 always holds
                    let dst = intern((class_of[0][succ], 0), &mut nodes, &mut queue);
                    transitions.insert((src, sym, dst));
                    // TR1: delayed guess, only into states of parity 2k
                    for kk in 1..=r {
                        if priorities[succ] == 2 * kk {
                            let dst = intern(
                                (class_of[kk as usize][succ], 2 * kk),
                                &mut nodes,
                                &mut queue,
                            );
                            transitions.insert((src, sym, dst));
                        }
                    }
                } else if priorities[succ] >= track {
                    // TR2
                    let dst = intern((class_of[k][succ], track), &mut nodes, &mut queue);
                    transitions.insert((src, sym, dst));
                }
            }
        }
    }

    let accepting: BTreeSet<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, &(class, track))| {
            let k = (track / 2) as usize;
            let rep = *class_members[k][class].iter().next().unwrap();
            priorities[rep] == track
        })
        .map(|(id, _)| id)
        .collect();
    let mut out = Automaton::new(
        p.alphabet().to_vec(),
        nodes.len(),
        0,
        Acceptance::Buchi(accepting),
    )?;
    for (src, sym, dst) in transitions {
        out.add_transition(src, sym, dst)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, LassoWord};

    fn loop1(priority: u32) -> Automaton {
        let mut a =
            Automaton::new(vec!["a".into()], 1, 0, Acceptance::Parity(vec![priority])).unwrap();
        a.add_transition(0, 0, 0).unwrap();
        a
    }

    /// Two states x=0, y=1 with identical successor sets {x, y} on `a` and
    /// priorities 1 and 3.
    fn shared_successors() -> Automaton {
        let mut a =
            Automaton::new(vec!["a".into()], 2, 0, Acceptance::Parity(vec![1, 3])).unwrap();
        for q in 0..2 {
            a.add_transition(q, 0, 0).unwrap();
            a.add_transition(q, 0, 1).unwrap();
        }
        a
    }

    fn aw() -> LassoWord {
        LassoWord::new(vec![], vec!["a".into()]).unwrap()
    }

    #[test]
    fn complement_dpw_flips_acceptance() {
        let d = loop1(0);
        let c = complement_dpw(&d).unwrap();
        assert!(oracle::member_npw(&d, &aw()).unwrap());
        assert!(!oracle::member_npw(&c, &aw()).unwrap());
    }

    #[test]
    fn complement_dpw_twice_is_equivalent() {
        let mut d = Automaton::new(
            vec!["a".into(), "b".into()],
            2,
            0,
            Acceptance::Parity(vec![0, 1]),
        )
        .unwrap();
        d.add_transition(0, 0, 1).unwrap();
        d.add_transition(0, 1, 0).unwrap();
        d.add_transition(1, 0, 1).unwrap();
        d.add_transition(1, 1, 0).unwrap();
        let cc = complement_dpw(&complement_dpw(&d).unwrap()).unwrap();
        assert!(oracle::check_equivalent(&d, &cc, 2, 3).unwrap().passed());
        let c = complement_dpw(&d).unwrap();
        assert!(oracle::check_complement(&d, &c, 2, 3).unwrap().passed());
    }

    #[test]
    fn complement_dpw_rejects_nondeterministic() {
        let mut a =
            Automaton::new(vec!["a".into()], 2, 0, Acceptance::Parity(vec![0, 0])).unwrap();
        a.add_transition(0, 0, 0).unwrap();
        a.add_transition(0, 0, 1).unwrap();
        assert!(matches!(
            complement_dpw(&a),
            Err(AutomatonError::NotDeterministic(0, 0, 2))
        ));
    }

    #[test]
    fn simplify_npw_merges_priority_equal_duplicates() {
        let mut a = Automaton::new(
            vec!["a".into()],
            3,
            0,
            Acceptance::Parity(vec![1, 0, 0]),
        )
        .unwrap();
        a.add_transition(0, 0, 1).unwrap();
        a.add_transition(0, 0, 2).unwrap();
        a.add_transition(1, 0, 1).unwrap();
        a.add_transition(2, 0, 2).unwrap();
        let out = simplify_npw(&a).unwrap();
        assert_eq!(out.num_states(), 2);
        assert!(oracle::check_equivalent(&a, &out, 3, 4).unwrap().passed());
    }

    #[test]
    fn simplify_npw_idempotent() {
        let a = shared_successors();
        let once = simplify_npw(&a).unwrap();
        let twice = simplify_npw(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn typical_conversion_even_loop() {
        let nbw = parity_to_buchi_typical(&loop1(0)).unwrap();
        assert!(oracle::member_nbw(&nbw, &aw()).unwrap());
        assert_eq!(crate::automaton::reachable(&nbw).len(), 1);
    }

    #[test]
    fn typical_conversion_odd_loop_is_empty() {
        let nbw = parity_to_buchi_typical(&loop1(1)).unwrap();
        assert!(!oracle::member_nbw(&nbw, &aw()).unwrap());
    }

    #[test]
    fn equiv_classes_by_band() {
        let a = shared_successors();
        let classes = parity_equiv_classes(&a, 2).unwrap();
        let members: Vec<BTreeSet<StateId>> = classes.into_iter().map(|c| c.members).collect();
        assert_eq!(members, vec![BTreeSet::from([0]), BTreeSet::from([1])]);
        let classes = parity_equiv_classes(&a, 0).unwrap();
        let members: Vec<BTreeSet<StateId>> = classes.into_iter().map(|c| c.members).collect();
        assert_eq!(members, vec![BTreeSet::from([0, 1])]);
    }

    #[test]
    fn equiv_classes_distinct_successors_are_singletons() {
        let mut a =
            Automaton::new(vec!["a".into()], 2, 0, Acceptance::Parity(vec![0, 0])).unwrap();
        a.add_transition(0, 0, 0).unwrap();
        a.add_transition(1, 0, 1).unwrap();
        let classes = parity_equiv_classes(&a, 0).unwrap();
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn equiv_classes_reject_odd_pivot() {
        assert!(parity_equiv_classes(&shared_successors(), 1).is_err());
    }

    #[test]
    fn improved_conversion_merges_track0_class() {
        let a = shared_successors();
        let nbw = parity_to_buchi_improved(&a).unwrap();
        let typical = parity_to_buchi_typical(&a).unwrap();
        // track-0 states collapse to the single merged class
        assert!(nbw.num_states() <= typical.num_states());
        assert!(oracle::check_equivalent(&nbw, &typical, 3, 4).unwrap().passed());
    }

    #[test]
    fn improved_conversion_even_loop() {
        let nbw = parity_to_buchi_improved(&loop1(0)).unwrap();
        assert!(oracle::member_nbw(&nbw, &aw()).unwrap());
    }

    #[test]
    fn conversions_preserve_language_of_dpw_complement() {
        let mut d = Automaton::new(
            vec!["a".into(), "b".into()],
            2,
            0,
            Acceptance::Parity(vec![0, 1]),
        )
        .unwrap();
        d.add_transition(0, 0, 1).unwrap();
        d.add_transition(0, 1, 0).unwrap();
        d.add_transition(1, 0, 0).unwrap();
        d.add_transition(1, 1, 1).unwrap();
        let c = complement_dpw(&d).unwrap();
        for nbw in [
            parity_to_buchi_typical(&c).unwrap(),
            parity_to_buchi_improved(&simplify_npw(&c).unwrap()).unwrap(),
        ] {
            assert!(oracle::check_complement(&d, &nbw, 3, 4).unwrap().passed());
        }
    }
}
