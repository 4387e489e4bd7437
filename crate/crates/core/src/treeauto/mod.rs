//! Automorphisms of the finite rooted binary tree `T_n`.

mod conjugacy;
mod portrait;

pub use conjugacy::{are_conjugate, class_invariant, ClassInvariant, ConjugacyOracle};
pub use portrait::{parse_vertex, CycleType, LevelProfile, Portrait, MAX_LEVEL};
