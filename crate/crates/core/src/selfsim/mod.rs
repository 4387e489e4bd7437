//! Wreath-recursion systems and exhaustive finite-level group computations.

pub mod cache;
mod geometric;
mod group;
mod recursion;
mod verify;

pub use geometric::{geometric_tower, GeometricLevel};
pub use group::{LevelGroup, DEFAULT_ORDER_CAP};
pub use recursion::{builtin_system_f, Letter, RecursionSystem, Rule, Word};
pub use verify::{
    geometric_claims, section_pair_count, verify_geometric_presentation, verify_presentation_of,
    verify_triple_theorem,
};
