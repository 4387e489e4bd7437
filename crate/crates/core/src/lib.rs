//! Exact computations for the geometric and arithmetic iterated monodromy
//! groups of `f(x) = 2/(x-1)^2`.

pub mod arithmodel;
pub mod constantfield;
pub mod error;
pub mod maximality;
pub mod polyarith;
pub mod report;
pub mod selfsim;
pub mod suite;
pub mod treeauto;

pub use error::{Error, Result};
