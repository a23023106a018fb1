//! Slices of reduced split trees and their successor and merge operations.
//!
//! A slice is the level of a (reduced) split tree read left to right: an
//! ordered sequence of pairwise disjoint nonempty state sets, optionally
//! decorated with 0, * or 1. The empty slice ⊥ is a single distinguished
//! value considered both undecorated and decorated.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::automaton::{Automaton, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decoration {
    Zero,
    Star,
    One,
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decoration::Zero => write!(f, "0"),
            Decoration::Star => write!(f, "*"),
            Decoration::One => write!(f, "1"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SliceError {
    #[error("operation requires a decorated slice")]
    ExpectedDecorated,
    #[error("operation requires an undecorated slice")]
    ExpectedUndecorated,
    #[error("slice nodes must be nonempty")]
    EmptyNode,
    #[error("slice node state sets must be pairwise disjoint")]
    Overlap,
    #[error("decorations must be all present or all absent")]
    MixedDecorations,
}

/// Node order is significant and never normalized; equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slice {
    nodes: Vec<(BTreeSet<StateId>, Option<Decoration>)>,
}

impl Slice {
    /// The empty slice ⊥.
    pub fn bottom() -> Self {
        Slice { nodes: Vec::new() }
    }

    pub fn undecorated(sets: Vec<BTreeSet<StateId>>) -> Result<Self, SliceError> {
        Self::build(sets.into_iter().map(|s| (s, None)).collect())
    }

    pub fn decorated(nodes: Vec<(BTreeSet<StateId>, Decoration)>) -> Result<Self, SliceError> {
        Self::build(nodes.into_iter().map(|(s, d)| (s, Some(d))).collect())
    }

    fn build(nodes: Vec<(BTreeSet<StateId>, Option<Decoration>)>) -> Result<Self, SliceError> {
        let mut seen: BTreeSet<StateId> = BTreeSet::new();
        for (set, _) in &nodes {
            if set.is_empty() {
                return Err(SliceError::EmptyNode);
            }
            for &q in set {
                if !seen.insert(q) {
                    return Err(SliceError::Overlap);
                }
            }
        }
        let decorated = nodes.iter().filter(|(_, d)| d.is_some()).count();
        if decorated != 0 && decorated != nodes.len() {
            return Err(SliceError::MixedDecorations);
        }
        Ok(Slice { nodes })
    }

    /// A singleton undecorated slice, the initial state of the construction.
    pub fn initial(state: StateId) -> Self {
        Slice {
            nodes: vec![(BTreeSet::from([state]), None)],
        }
    }

    pub fn is_bottom(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ⊥ counts as decorated.
    pub fn is_decorated(&self) -> bool {
        self.nodes.iter().all(|(_, d)| d.is_some())
    }

    /// ⊥ counts as undecorated.
    pub fn is_undecorated(&self) -> bool {
        self.nodes.iter().all(|(_, d)| d.is_none())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[(BTreeSet<StateId>, Option<Decoration>)] {
        &self.nodes
    }

    /// Undecorated version (proj_Q).
    pub fn undecorate(&self) -> Slice {
        Slice {
            nodes: self
                .nodes
                .iter()
                .map(|(set, _)| (set.clone(), None))
                .collect(),
        }
    }

    pub fn decorations(&self) -> impl Iterator<Item = Decoration> + '_ {
        self.nodes.iter().filter_map(|(_, d)| *d)
    }

    /// Union of all node state sets.
    pub fn states(&self) -> BTreeSet<StateId> {
        self.nodes
            .iter()
            .flat_map(|(set, _)| set.iter().copied())
            .collect()
    }

    /// A decorated slice is a reset slice iff no node is decorated 0.
    /// ⊥ is a reset slice.
    pub fn is_reset(&self) -> Result<bool, SliceError> {
        if !self.is_decorated() {
            return Err(SliceError::ExpectedDecorated);
        }
        Ok(!self.decorations().any(|d| d == Decoration::Zero))
    }

    /// A decorated slice is doomed iff no node is decorated 1. ⊥ is doomed.
    pub fn is_doomed(&self) -> Result<bool, SliceError> {
        if !self.is_decorated() {
            return Err(SliceError::ExpectedDecorated);
        }
        Ok(!self.decorations().any(|d| d == Decoration::One))
    }
}

impl fmt::Display for Slice {
    /// Prints in the split-tree notation, e.g. `{q1}*|{q0}1`; ⊥ prints as `⊥`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bottom() {
            return write!(f, "⊥");
        }
        for (i, (set, deco)) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{{")?;
            for (j, q) in set.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "q{q}")?;
            }
            write!(f, "}}")?;
            if let Some(d) = deco {
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}

/// Children of every node before removal of empty sets: node `i` yields the
/// accepting child at position `2i` and the nonaccepting child at `2i+1`,
/// each stripped of states already placed further left.
fn raw_children(a: &Automaton, s: &Slice, sym: usize) -> Vec<BTreeSet<StateId>> {
    let accepting = match a.acceptance() {
        crate::automaton::Acceptance::Buchi(set) => set.clone(),
        crate::automaton::Acceptance::Parity(_) => BTreeSet::new(),
    };
    let mut used: BTreeSet<StateId> = BTreeSet::new();
    let mut children = Vec::with_capacity(2 * s.len());
    for (set, _) in s.nodes() {
        let mut succ: BTreeSet<StateId> = BTreeSet::new();
        for &q in set {
            succ.extend(a.successors(q, sym).iter().copied());
        }
        let acc: BTreeSet<StateId> = succ
            .iter()
            .copied()
            .filter(|q| accepting.contains(q) && !used.contains(q))
            .collect();
        used.extend(acc.iter().copied());
        let nonacc: BTreeSet<StateId> = succ
            .iter()
            .copied()
            .filter(|q| !accepting.contains(q) && !used.contains(q))
            .collect();
        used.extend(nonacc.iter().copied());
        children.push(acc);
        children.push(nonacc);
    }
    children
}

/// δ_u: the next level of the reduced split tree. δ_u(⊥, ·) = ⊥.
pub fn slice_successor(a: &Automaton, s: &Slice, sym: usize) -> Result<Slice, SliceError> {
    if !s.is_undecorated() {
        return Err(SliceError::ExpectedUndecorated);
    }
    let children = raw_children(a, s, sym);
    Ok(Slice {
        nodes: children
            .into_iter()
            .filter(|set| !set.is_empty())
            .map(|set| (set, None))
            .collect(),
    })
}

/// δ_g / δ_g': decorated guesses after an undecorated slice.
///
/// Without deterministic decoration this is every {0,1}-decoration of
/// δ_u(s, sym); with it, the single slice decorating accepting children 0 and
/// nonaccepting children 1 (before empty-node removal).
pub fn guess_decorations(
    a: &Automaton,
    s: &Slice,
    sym: usize,
    use_d: bool,
) -> Result<Vec<Slice>, SliceError> {
    if !s.is_undecorated() {
        return Err(SliceError::ExpectedUndecorated);
    }
    let children = raw_children(a, s, sym);
    if use_d {
        let nodes: Vec<(BTreeSet<StateId>, Option<Decoration>)> = children
            .into_iter()
            .enumerate()
            .filter(|(_, set)| !set.is_empty())
            .map(|(pos, set)| {
                let d = if pos % 2 == 0 {
                    Decoration::Zero
                } else {
                    Decoration::One
                };
                (set, Some(d))
            })
            .collect();
        return Ok(vec![Slice { nodes }]);
    }
    let sets: Vec<BTreeSet<StateId>> = children.into_iter().filter(|s| !s.is_empty()).collect();
    let k = sets.len();
    let mut guesses = Vec::with_capacity(1 << k);
    for mask in 0u64..(1u64 << k) {
        let nodes = sets
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let d = if mask >> i & 1 == 1 {
                    Decoration::One
                } else {
                    Decoration::Zero
                };
                (set.clone(), Some(d))
            })
            .collect();
        guesses.push(Slice { nodes });
    }
    Ok(guesses)
}

/// δ_d / δ_d': successor of a decorated slice, or `None` when condition C1
/// fails (only checked without deterministic decoration). δ of ⊥ is ⊥.
///
/// Decoration rules, applied before empty-node removal:
/// D1 non-reset, d=1 → (*, 1); D2 non-reset, d∈{0,*} → (d, d);
/// D3 reset, d=1 → (0, 1); D4 reset, d=* → (0, 0).
pub fn decorated_successor(
    a: &Automaton,
    s: &Slice,
    sym: usize,
    use_d: bool,
) -> Result<Option<Slice>, SliceError> {
    if !s.is_decorated() {
        return Err(SliceError::ExpectedDecorated);
    }
    if s.is_bottom() {
        return Ok(Some(Slice::bottom()));
    }
    let reset = s.is_reset()?;
    let children = raw_children(a, s, sym);
    let mut nodes = Vec::new();
    for (i, (_, deco)) in s.nodes().iter().enumerate() {
        let d = deco.expect("decorated slice");
        let (dl, dr) = match (reset, d) {
            (false, Decoration::One) => (Decoration::Star, Decoration::One),
            (false, other) => (other, other),
            (true, Decoration::One) => (Decoration::Zero, Decoration::One),
            (true, Decoration::Star) => (Decoration::Zero, Decoration::Zero),
            // reset slices contain no 0-nodes by definition
            (true, Decoration::Zero) => unreachable!("0-node in a reset slice"),
        };
        if !use_d && d == Decoration::One && children[2 * i + 1].is_empty() {
            return Ok(None); // C1 violated
        }
        if !children[2 * i].is_empty() {
            nodes.push((children[2 * i].clone(), Some(dl)));
        }
        if !children[2 * i + 1].is_empty() {
            nodes.push((children[2 * i + 1].clone(), Some(dr)));
        }
    }
    Ok(Some(Slice { nodes }))
}

/// merge: recursively union adjacent nodes decorated all by 0 or all by *.
pub fn merge(s: &Slice) -> Result<Slice, SliceError> {
    if !s.is_decorated() {
        return Err(SliceError::ExpectedDecorated);
    }
    let mut nodes: Vec<(BTreeSet<StateId>, Option<Decoration>)> = Vec::new();
    for (set, deco) in s.nodes() {
        match nodes.last_mut() {
            Some((prev_set, Some(prev_d)))
                if Some(*prev_d) == *deco && *prev_d != Decoration::One =>
            {
                prev_set.extend(set.iter().copied());
            }
            _ => nodes.push((set.clone(), *deco)),
        }
    }
    Ok(Slice { nodes })
}

/// merge_{i,j}: merge as many as possible and at most `j` consecutive
/// mergible nodes starting from the `i`-th mergible pair (1-based).
/// With fewer than `i` mergible pairs the slice is returned unchanged.
pub fn merge_ij(s: &Slice, i: usize, j: usize) -> Result<Slice, SliceError> {
    if !s.is_decorated() {
        return Err(SliceError::ExpectedDecorated);
    }
    if i == 0 || j < 2 {
        return Ok(s.clone());
    }
    let nodes = s.nodes();
    let mergible = |k: usize| {
        nodes[k].1 == nodes[k + 1].1 && nodes[k].1.map_or(false, |d| d != Decoration::One)
    };
    let mut pair = 0usize;
    let mut start = None;
    for k in 0..nodes.len().saturating_sub(1) {
        if mergible(k) {
            pair += 1;
            if pair == i {
                start = Some(k);
                break;
            }
        }
    }
    let Some(start) = start else {
        return Ok(s.clone());
    };
    let mut end = start + 1;
    while end + 1 < nodes.len() && end - start + 1 < j && mergible(end) {
        end += 1;
    }
    let mut out: Vec<(BTreeSet<StateId>, Option<Decoration>)> = nodes[..start].to_vec();
    let mut merged = nodes[start].0.clone();
    for (set, _) in &nodes[start + 1..=end] {
        merged.extend(set.iter().copied());
    }
    out.push((merged, nodes[start].1));
    out.extend_from_slice(&nodes[end + 1..]);
    Ok(Slice { nodes: out })
}
