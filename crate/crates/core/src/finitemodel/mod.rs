//! Finite Gelfand-space models: algebras on `Cⁿ` under pointwise product
//! with weighted sup, weighted ℓ1 or ℓp norms, optionally restricted to a
//! subalgebra spanned by a basis. Sites are coordinate functionals.

mod coset;
mod npinfty;
mod scattered;
mod subspace;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use npinfty::{np_infty_test, witness_gap, NPInftyVerdict, Witness};
pub use scattered::{annihilating_functional, scattered_contradiction_check, ScatteredBranch, ScatteredReport};

pub(crate) use coset::{minimize_coset, NormSpec, Shape};
pub(crate) use subspace::{null_space, Vector};

use crate::error::{Error, Result};
use crate::problem::{Certificate, NormResult};
use subspace::{least_squares, norm2, orthonormal_span, projection_residual};

/// Relative residual allowed for products of basis vectors to stay in the span.
pub const CLOSURE_TOLERANCE: f64 = 1e-12;
/// Relative residual above which a coset counts as empty.
pub const COSET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum NormKind {
    WeightedSup,
    WeightedL1,
    Lp(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAlgebra {
    norm_kind: NormKind,
    weights: Vec<f64>,
    basis: Option<Vec<Vector>>,
    /// Orthonormal basis of the span when a proper subalgebra is given.
    span: Option<Vec<Vector>>,
}

impl FiniteAlgebra {
    pub fn new(norm_kind: NormKind, weights: Vec<f64>, basis: Option<Vec<Vec<C64>>>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidAlgebra("dimension must be at least 1".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite()) {
            return Err(Error::InvalidAlgebra(format!("weight {} is {w}", i + 1)));
        }
        match norm_kind {
            NormKind::WeightedSup | NormKind::WeightedL1 => {
                if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| **w < 1.0) {
                    return Err(Error::InvalidAlgebra(format!(
                        "weight {} = {w} < 1 breaks submultiplicativity",
                        i + 1
                    )));
                }
            }
            NormKind::Lp(p) => {
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(Error::InvalidAlgebra(format!("exponent p = {p} must be finite and >= 1")));
                }
                if weights.iter().any(|w| *w != 1.0) {
                    return Err(Error::InvalidAlgebra("ℓp algebras take unit weights".into()));
                }
            }
        }
        let span = match &basis {
            None => None,
            Some(vs) => {
                if vs.is_empty() {
                    return Err(Error::InvalidAlgebra("basis is empty".into()));
                }
                if let Some(v) = vs.iter().find(|v| v.len() != n) {
                    return Err(Error::InvalidAlgebra(format!(
                        "basis vector of length {} in dimension {n}",
                        v.len()
                    )));
                }
                if vs.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::InvalidAlgebra("basis entries must be finite".into()));
                }
                let q = orthonormal_span(n, vs);
                if q.is_empty() {
                    return Err(Error::InvalidAlgebra("basis spans the zero subspace".into()));
                }
                check_closure(vs, &q)?;
                if q.len() == n {
                    None
                } else {
                    Some(q)
                }
            }
        };
        Ok(FiniteAlgebra {
            norm_kind,
            weights,
            basis,
            span,
        })
    }

    pub fn weighted_sup(weights: Vec<f64>) -> Result<Self> {
        Self::new(NormKind::WeightedSup, weights, None)
    }

    pub fn weighted_l1(weights: Vec<f64>) -> Result<Self> {
        Self::new(NormKind::WeightedL1, weights, None)
    }

    pub fn lp(dimension: usize, p: f64) -> Result<Self> {
        Self::new(NormKind::Lp(p), vec![1.0; dimension], None)
    }

    /// Restricts to the subalgebra spanned by `basis`.
    pub fn with_basis(self, basis: Vec<Vec<C64>>) -> Result<Self> {
        Self::new(self.norm_kind, self.weights, Some(basis))
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis(&self) -> Option<&[Vec<C64>]> {
        self.basis.as_deref()
    }

    /// True when the algebra is all of `Cⁿ`.
    pub fn is_full(&self) -> bool {
        self.span.is_none()
    }

    pub fn norm(&self, x: &[C64]) -> f64 {
        self.spec().eval(x)
    }

    pub fn contains(&self, x: &[C64]) -> bool {
        match &self.span {
            None => x.len() == self.dimension(),
            Some(q) => projection_residual(q, x) <= CLOSURE_TOLERANCE * norm2(x).max(1.0),
        }
    }

    pub(crate) fn spec(&self) -> NormSpec {
        NormSpec {
            shape: match self.norm_kind {
                NormKind::WeightedSup => Shape::Sup,
                NormKind::WeightedL1 => Shape::L1,
                NormKind::Lp(p) => Shape::Lp(p),
            },
            weights: self.weights.clone(),
        }
    }

    /// Orthonormal basis of the algebra as a subspace of `Cⁿ`.
    pub(crate) fn orthonormal_basis(&self) -> Vec<Vector> {
        match &self.span {
            Some(q) => q.clone(),
            None => (0..self.dimension())
                .map(|i| {
                    (0..self.dimension())
                        .map(|k| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
                        .collect()
                })
                .collect(),
        }
    }
}

fn check_closure(basis: &[Vector], q: &[Vector]) -> Result<()> {
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate().skip(i) {
            let prod: Vector = u.iter().zip(v).map(|(a, b)| a * b).collect();
            let residual = projection_residual(q, &prod);
            if residual > CLOSURE_TOLERANCE * norm2(&prod).max(1.0) {
                return Err(Error::InvalidAlgebra(format!(
                    "product of basis vectors {} and {} leaves the span (residual {residual:e})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

fn check_subset(alg: &FiniteAlgebra, subset: &[usize], targets: &[C64]) -> Result<()> {
    if subset.len() != targets.len() {
        return Err(Error::LengthMismatch {
            sites: subset.len(),
            targets: targets.len(),
        });
    }
    if subset.is_empty() {
        return Err(Error::EmptyTargets);
    }
    for (i, s) in subset.iter().enumerate() {
        if *s >= alg.dimension() {
            return Err(Error::domain(
                i,
                format!("coordinate index {} outside 1..={}", s + 1, alg.dimension()),
            ));
        }
        if let Some(first) = subset[..i].iter().position(|t| t == s) {
            return Err(Error::DuplicateSite { first, index: i });
        }
    }
    Ok(())
}

/// Exact NP norm on the full algebra: free coordinates are set to zero.
/// `subset` holds 0-based coordinates.
pub fn np_norm_closed_form(alg: &FiniteAlgebra, subset: &[usize], targets: &[C64]) -> Result<NormResult> {
    check_subset(alg, subset, targets)?;
    if !alg.is_full() {
        return Err(Error::UnsupportedForSubalgebra);
    }
    let w = alg.weights();
    let (value, formula) = match alg.norm_kind() {
        NormKind::WeightedSup => (
            subset.iter().zip(targets).map(|(i, a)| w[*i] * a.norm()).fold(0.0, f64::max),
            "max_i w_i |a_i|",
        ),
        NormKind::WeightedL1 => (
            subset.iter().zip(targets).map(|(i, a)| w[*i] * a.norm()).sum(),
            "sum_i w_i |a_i|",
        ),
        NormKind::Lp(p) => (coset::lp_norm(targets, p), "(sum_i |a_i|^p)^(1/p)"),
    };
    Ok(NormResult::exact(
        value,
        Certificate::ClosedForm {
            formula: formula.to_string(),
        },
    ))
}

/// NP norm as the minimum of the algebra norm over the interpolating coset
/// `{x ∈ A : x_i = a_i, i ∈ S}`. `subset` holds 0-based coordinates.
pub fn np_norm_generic(alg: &FiniteAlgebra, subset: &[usize], targets: &[C64], tolerance: f64) -> Result<NormResult> {
    check_subset(alg, subset, targets)?;
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::NonpositiveTolerance(tolerance));
    }
    let q = alg.orthonormal_basis();
    let n = alg.dimension();
    let r = q.len();
    // x = Q y with (Q y)_S = a
    let rows: Vec<Vector> = subset.iter().map(|i| q.iter().map(|col| col[*i]).collect()).collect();
    let (y0, residual) = least_squares(r, &rows, targets);
    if residual > COSET_TOLERANCE * norm2(targets).max(1.0) {
        return Err(Error::InfeasibleCoset { residual });
    }
    let x0: Vector = (0..n).map(|i| q.iter().zip(&y0).map(|(col, yj)| col[i] * yj).sum()).collect();
    let kernel = subspace::null_space(r, &rows);
    let range: Vec<Vector> = kernel
        .iter()
        .map(|z| (0..n).map(|i| q.iter().zip(z).map(|(col, zj)| col[i] * zj).sum()).collect())
        .collect();

    let m = minimize_coset(&alg.spec(), &x0, &range, tolerance)?;
    let floor = targets.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let lower = m.lower.max(floor.min(m.upper));
    let result = NormResult {
        lower,
        upper: m.upper.max(lower),
        certificate: Certificate::Coset {
            interpolant: m.x,
            lower_from: m.lower_from.to_string(),
            refinements: m.refinements,
        },
        iterations: m.refinements,
    };
    if result.gap() > tolerance {
        return Err(Error::stall(
            format!("coset minimization left gap {:e}", result.gap()),
            Some(result),
        ));
    }
    Ok(result)
}
