//! The annihilating-measure argument on a finite space: a proper subalgebra
//! of `Cⁿ` is killed by some nonzero `μ`, and interpolating the signs of the
//! heaviest coordinates of `μ` with norm at most 2 would contradict that.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::subspace::{null_space, Vector};
use super::{np_norm_generic, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::problem::NormResult;

/// Head mass must exceed `2/3 · ‖μ‖₁` by this much.
const HEAD_MARGIN: f64 = 1e-12;
const NORM_BOUND: f64 = 2.0;

/// `μ ∈ Cⁿ` with `Σ_i μ_i x_i = 0` for every basis vector `x`, normalized to
/// `Σ|μ_i| = 1` with its largest entry (lowest index on ties) real positive;
/// `None` when the basis spans `Cⁿ`.
pub fn annihilating_functional(basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    let n = basis.first()?.len();
    let ns = null_space(n, basis);
    if ns.is_empty() {
        return None;
    }
    // project e_1, e_2, ... onto the null space and keep the first that survives
    let mu = (0..n).find_map(|k| {
        let v: Vector = (0..n)
            .map(|i| ns.iter().map(|z| z[i] * z[k].conj()).sum())
            .collect();
        (v.iter().map(|x| x.norm()).sum::<f64>() > 1e-8).then_some(v)
    })?;
    let mass: f64 = mu.iter().map(|x| x.norm()).sum();
    let lead = mu
        .iter()
        .enumerate()
        .fold(0, |best, (i, x)| if x.norm() > mu[best].norm() * (1.0 + 1e-12) { i } else { best });
    let phase = mu[lead].conj() / mu[lead].norm();
    Some(mu.iter().map(|x| x * phase / mass).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScatteredBranch {
    /// The algebra is all of `Cⁿ`: no annihilating measure exists.
    Dense,
    /// The sign targets cannot be interpolated inside the subalgebra at all.
    InterpolationImpossible,
    /// Every interpolant of the sign targets has norm above 2, as the
    /// pairing inequality forces.
    NormExceedsTwo,
    /// An interpolant of norm at most 2 was found; the pairing inequality
    /// and annihilation cannot both hold, so the computation is inconsistent.
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteredReport {
    pub branch: ScatteredBranch,
    pub mu: Option<Vec<C64>>,
    /// 1-based coordinates of the head, heaviest first.
    pub head: Vec<usize>,
    pub head_mass: f64,
    pub tail_mass: f64,
    /// `head_mass − 2 · tail_mass`, positive by the choice of `n_0`.
    pub pairing_lower_bound: f64,
    /// Sign targets `conj(μ_n) / |μ_n|` on the head.
    pub sign_targets: Vec<C64>,
    pub np: Option<NormResult>,
    /// `|Σ_n x_n μ_n|` for the interpolant found, which annihilation makes 0.
    pub pairing: Option<f64>,
}

pub fn scattered_contradiction_check(alg: &FiniteAlgebra, tolerance: f64) -> Result<ScatteredReport> {
    let mut report = ScatteredReport {
        branch: ScatteredBranch::Dense,
        mu: None,
        head: Vec::new(),
        head_mass: 0.0,
        tail_mass: 0.0,
        pairing_lower_bound: 0.0,
        sign_targets: Vec::new(),
        np: None,
        pairing: None,
    };
    let Some(basis) = alg.basis().filter(|_| !alg.is_full()) else {
        return Ok(report);
    };
    let Some(mu) = annihilating_functional(basis) else {
        return Ok(report);
    };
    let mut order: Vec<usize> = (0..mu.len()).collect();
    order.sort_by(|a, b| mu[*b].norm().total_cmp(&mu[*a].norm()).then(a.cmp(b)));
    let total: f64 = mu.iter().map(|x| x.norm()).sum();
    let mut head_mass = 0.0;
    let mut n0 = order.len();
    for (count, i) in order.iter().enumerate() {
        head_mass += mu[*i].norm();
        if head_mass > 2.0 / 3.0 * total + HEAD_MARGIN {
            n0 = count + 1;
            break;
        }
    }
    let head: Vec<usize> = order[..n0].to_vec();
    let head_mass: f64 = head.iter().map(|i| mu[*i].norm()).sum();
    let tail_mass = total - head_mass;
    let signs: Vec<C64> = head.iter().map(|i| mu[*i].conj() / mu[*i].norm()).collect();

    report.head = head.iter().map(|i| i + 1).collect();
    report.head_mass = head_mass;
    report.tail_mass = tail_mass;
    report.pairing_lower_bound = head_mass - NORM_BOUND * tail_mass;
    report.sign_targets = signs.clone();
    report.mu = Some(mu.clone());

    let np = match np_norm_generic(alg, &head, &signs, tolerance) {
        Ok(r) => r,
        Err(Error::InfeasibleCoset { .. }) => {
            report.branch = ScatteredBranch::InterpolationImpossible;
            return Ok(report);
        }
        Err(Error::SolverStall { partial: Some(p), .. }) => *p,
        Err(e) => return Err(e),
    };
    if let crate::problem::Certificate::Coset { interpolant, .. } = &np.certificate {
        let s: C64 = interpolant.iter().zip(&mu).map(|(x, m)| x * m).sum();
        report.pairing = Some(s.norm());
    }
    report.branch = if np.lower > NORM_BOUND {
        ScatteredBranch::NormExceedsTwo
    } else {
        ScatteredBranch::Contradiction
    };
    report.np = Some(np);
    Ok(report)
}
