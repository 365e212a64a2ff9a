//! Linear programming: a dense simplex and the complex atomic-ℓ1 column
//! generation built on top of it.

mod atomic;
mod simplex;

pub(crate) use atomic::{inner, solve_atomic, AtomOracle, AtomicSolution};
pub use simplex::{LpError, Relation, Simplex};
