//! Random NBW generation in the Tabakov–Vardi model: for each symbol,
//! ⌈rn⌉ distinct transition pairs sampled uniformly without replacement,
//! and ⌈fn⌉ accepting states. ChaCha8 keyed by the spec seed keeps corpora
//! reproducible across platforms and versions.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::{Acceptance, Automaton, AutomatonError};

/// Identifier of the PRNG algorithm, recorded in corpus metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub alphabet_size: usize,
    /// Transition density r: each symbol gets ⌈r·n⌉ transition pairs.
    pub transition_density: f64,
    /// Acceptance density f in (0, 1]: ⌈f·n⌉ accepting states.
    pub acceptance_density: f64,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("automaton must have at least one state")]
    NoStates,
    #[error("alphabet must have at least one symbol")]
    EmptyAlphabet,
    #[error("transition density asks for {requested} pairs but only {available} exist")]
    TooManyTransitions { requested: usize, available: usize },
    #[error("acceptance density must lie in (0, 1], got {0}")]
    AcceptanceDensityRange(f64),
    #[error("transition density must be nonnegative, got {0}")]
    NegativeTransitionDensity(f64),
}

impl GenSpec {
    pub fn transitions_per_symbol(&self) -> usize {
        (self.transition_density * self.n as f64).ceil() as usize
    }

    pub fn accepting_count(&self) -> usize {
        (self.acceptance_density * self.n as f64).ceil() as usize
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::NoStates);
        }
        if self.alphabet_size == 0 {
            return Err(GenError::EmptyAlphabet);
        }
        if self.transition_density < 0.0 || !self.transition_density.is_finite() {
            return Err(GenError::NegativeTransitionDensity(self.transition_density));
        }
        if !(self.acceptance_density > 0.0 && self.acceptance_density <= 1.0) {
            return Err(GenError::AcceptanceDensityRange(self.acceptance_density));
        }
        let requested = self.transitions_per_symbol();
        let available = self.n * self.n;
        if requested > available {
            return Err(GenError::TooManyTransitions { requested, available });
        }
        Ok(())
    }
}

/// Default symbol names: a0, a1, ...
pub fn default_alphabet(size: usize) -> Vec<String> {
    (0..size).map(|i| format!("a{i}")).collect()
}

pub fn generate(spec: &GenSpec) -> Result<Automaton, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;

    let per_symbol = spec.transitions_per_symbol();
    let all_pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).collect();
    let mut chosen: Vec<Vec<(usize, usize)>> = Vec::with_capacity(spec.alphabet_size);
    for _ in 0..spec.alphabet_size {
        chosen.push(
            all_pairs
                .choose_multiple(&mut rng, per_symbol)
                .copied()
                .collect(),
        );
    }

    let states: Vec<usize> = (0..n).collect();
    let accepting: BTreeSet<usize> = states
        .choose_multiple(&mut rng, spec.accepting_count())
        .copied()
        .collect();

    let mut a = Automaton::new(
        default_alphabet(spec.alphabet_size),
        n,
        0,
        Acceptance::Buchi(accepting),
    )
    .map_err(|e: AutomatonError| unreachable!("validated spec: {e}"))?;
    for (sym, pairs) in chosen.iter().enumerate() {
        for &(p, q) in pairs {
            a.add_transition(p, sym, q).unwrap();
        }
    }
    Ok(a)
}

/// One corpus manifest line: "id seed n |Σ| r f path".
pub fn manifest_line(id: &str, spec: &GenSpec, path: &str) -> String {
    format!(
        "{id} {} {} {} {} {} {path}",
        spec.seed, spec.n, spec.alphabet_size, spec.transition_density, spec.acceptance_density
    )
}
