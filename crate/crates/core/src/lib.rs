//! Nevanlinna-Pick interpolation norms with certified brackets.
//!
//! For a commutative Banach algebra `A` and distinct characters
//! `φ_1, …, φ_n`, the NP norm of `(a_1, …, a_n)` is
//! `inf { ‖x‖ : φ_i(x) = a_i }`. Each backend returns an interval
//! `[lower, upper]` around that infimum together with the evidence for both
//! ends.

// NaN-rejecting range checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod finitemodel;
pub mod gleason;
pub mod hardy;
pub mod kernels;
pub mod linalg;
pub mod lp;
pub mod problem;
pub mod seqalg;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use problem::{
    compute_np_norm, sup_lower_bound, validate_problem, Backend, Certificate, InterpolationProblem,
    NormResult, Site,
};
