//! Complementation of nondeterministic Büchi automata via the slice-based
//! construction, together with the post-stages of a determinization pipeline
//! (parity simplification and parity-to-Büchi conversion), input-side
//! heuristics, a lasso-word oracle, a random automaton generator, and a
//! benchmark harness.

pub mod automaton;
pub mod bench;
pub mod complement;
pub mod graph;
pub mod oaf;
pub mod oracle;
pub mod parity;
pub mod preopt;
pub mod randgen;
pub mod slice;

pub use automaton::{Acceptance, Automaton, StateId, StateStats};
pub use complement::{complement_slice, Limits, SliceConfig};
pub use oracle::{LassoWord, Verdict};
pub use slice::{Decoration, Slice};
