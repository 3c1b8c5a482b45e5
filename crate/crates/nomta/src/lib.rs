//! Orbit-finite nominal sets, deterministic bottom-up nominal tree
//! automata (DBNTA), and an observation-table learner that recovers the
//! minimum automaton for an unknown recognizable nominal tree language
//! from membership and equivalence queries.

pub mod automaton;
pub mod format;
pub mod learner;
pub mod nominal;
pub mod symmetry;
pub mod teacher;
pub mod trees;

pub use nominal::{Element, LocalSymmetry, OrbitFiniteSet, OrbitSpec};
pub use symmetry::{Atom, AtomSet, FinInjection, SymmetryKind};
