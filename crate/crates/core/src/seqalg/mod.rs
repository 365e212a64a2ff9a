//! Sequence-algebra backends: `ℓ1(Z₊)`, `ℓ1(Z)` and `L¹(T)` at integer
//! characters.
//!
//! Each norm is the value of a complex atomic-ℓ1 problem
//! `min Σ|c_ℓ|` subject to `Σ c_ℓ v(ℓ) = a`, where the atoms `v(ℓ)` are the
//! Gelfand transforms of the monomials, characters or point masses. The
//! primal representation gives the upper bound. The dual vector `b` of the
//! final linear program is certified separately: a rigorous bound `S` on
//! `sup_ℓ |⟨b, v(ℓ)⟩|` turns `Re⟨b, a⟩ / S` into a lower bound by weak
//! duality.

mod analytic;
mod torus;
mod trig;
mod wiener;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use analytic::np_norm_analytic_wiener;
pub(crate) use analytic::{certified_sup as analytic_certified_sup, power as power_of};
pub use torus::np_norm_l1_torus;
pub use trig::{certify_trig_sup, TrigSupBound};
pub use wiener::{detect_period, np_norm_wiener};

use crate::error::{Error, Result};
use crate::lp::{inner, AtomicSolution};
use crate::problem::{AtomTerm, Backend, Certificate, InterpolationProblem, NormResult, Site};

/// Phases of the initial polygon around every starting atom.
pub const DEFAULT_PHASES: usize = 64;
/// Largest power or frequency index any backend will scan.
pub const MAX_DEGREE: u64 = 4096;
pub const DEFAULT_TAIL_MARGIN: f64 = 1e-3;
const MAX_ROUNDS: usize = 2000;
/// Slack allowed by [`dual_certificate_check`].
pub const CHECK_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub degree: u64,
    pub grid_size: usize,
    pub tail_margin: f64,
}

impl TruncationPlan {
    /// Degree `K` with `ρ^{K+1} / (1 − ρ) ≤ margin` for `ρ = max |λ_i| < 1`,
    /// and at least `n − 1` so that the monomials can interpolate.
    pub fn analytic(lambdas: &[C64], tail_margin: f64) -> Self {
        let rho = lambdas
            .iter()
            .map(|l| l.norm())
            .filter(|r| *r < 1.0)
            .fold(0.0, f64::max);
        let mut k: u64 = lambdas.len().saturating_sub(1) as u64;
        while k < MAX_DEGREE && rho.powi(k as i32 + 1) / (1.0 - rho) > tail_margin {
            k += 1;
        }
        TruncationPlan {
            degree: k,
            grid_size: (16 * k.max(1) as usize).next_power_of_two(),
            tail_margin,
        }
    }

    /// Degree `max |k_i|`, grid at least sixteen points per unit of degree.
    pub fn torus(ks: &[i64]) -> Self {
        let degree = ks.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0);
        TruncationPlan {
            degree,
            grid_size: (16 * degree.max(1) as usize).next_power_of_two(),
            tail_margin: DEFAULT_TAIL_MARGIN,
        }
    }
}

/// How `certified_sup` was established.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DualScope {
    /// Powers `0..degree` scanned, the rest bounded by the geometric tail.
    PowerScan { degree: u64, tail_bound: f64 },
    /// Angles commensurable with `2π/period`; every residue scanned.
    Periodic { period: u64 },
    /// Frequencies in `[−window, window]` scanned. `certified_sup` is the
    /// triangle bound `Σ|b_j|`; the window figures hold only for the
    /// truncated algebra.
    WindowLimited {
        window: u64,
        window_sup: f64,
        window_bound: f64,
    },
    /// Trigonometric sup certified on a grid of `grid` cells.
    TrigGrid { grid: usize, remainder: f64 },
    /// Supplied by a caller with `certified_sup = 1` asserted, not verified.
    Claimed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub b: Vec<C64>,
    pub certified_sup: f64,
    pub bound: f64,
    pub scope: DualScope,
}

impl DualCertificate {
    /// A caller-supplied dual vector asserted to satisfy the unit constraint.
    pub fn claimed(b: Vec<C64>, targets: &[C64]) -> Self {
        let bound = inner(&b, targets).re;
        DualCertificate {
            b,
            certified_sup: 1.0,
            bound,
            scope: DualScope::Claimed,
        }
    }
}

pub(crate) fn ratio_bound(b: &[C64], targets: &[C64], sup: f64) -> f64 {
    let value = inner(b, targets).re;
    if sup > 0.0 {
        (value / sup).max(0.0)
    } else {
        0.0
    }
}

/// Packs a converged atomic solution into a certified bracket.
pub(crate) fn assemble<L: Copy>(
    sol: &AtomicSolution<L>,
    targets: &[C64],
    dual: DualCertificate,
    position: impl Fn(L) -> f64,
    scanned_degree: Option<u64>,
) -> NormResult {
    let floor = targets.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let lower = dual.bound.max(floor);
    let upper = sol.primal_value.max(lower);
    NormResult {
        lower,
        upper,
        certificate: Certificate::Atomic {
            dual,
            primal: sol
                .atoms
                .iter()
                .map(|(l, c)| AtomTerm {
                    position: position(*l),
                    coefficient: *c,
                })
                .collect(),
            scanned_degree,
        },
        iterations: sol.rounds,
    }
}

pub(crate) fn zero_or_check(targets: &[C64], tolerance: f64) -> Result<Option<NormResult>> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::NonpositiveTolerance(tolerance));
    }
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    if targets.iter().all(|a| *a == C64::new(0.0, 0.0)) {
        return Ok(Some(NormResult::zero()));
    }
    Ok(None)
}

/// Independently re-verifies `cert.certified_sup` (on a finer grid or a longer
/// scan than the solver used) and returns the recomputed bound. Rejects when
/// the recomputed bound falls more than `1e-12` below `cert.bound`.
pub fn dual_certificate_check(cert: &DualCertificate, problem: &InterpolationProblem) -> Result<f64> {
    problem.validate()?;
    if cert.b.len() != problem.targets.len() {
        return Err(Error::LengthMismatch {
            sites: problem.targets.len(),
            targets: cert.b.len(),
        });
    }
    let (sup, location) = match &problem.backend {
        Backend::AnalyticWiener => {
            let lambdas = crate::problem::disc_points(&problem.sites);
            let (sup, k) = analytic::certified_sup(&lambdas, &cert.b, 2 * MAX_DEGREE);
            (sup, format!("power {k}"))
        }
        Backend::Wiener => {
            let thetas: Vec<f64> = problem
                .sites
                .iter()
                .map(|s| match s {
                    Site::CircleAngle(t) => *t,
                    _ => unreachable!("validated"),
                })
                .collect();
            let (sup, k) = wiener::certified_sup(&thetas, &cert.b);
            (sup, format!("frequency {k}"))
        }
        Backend::L1Torus => {
            let ks: Vec<i64> = problem
                .sites
                .iter()
                .map(|s| match s {
                    Site::IntegerCharacter(k) => *k,
                    _ => unreachable!("validated"),
                })
                .collect();
            let grid = match cert.scope {
                DualScope::TrigGrid { grid, .. } => grid,
                _ => TruncationPlan::torus(&ks).grid_size,
            };
            let s = certify_trig_sup(&ks, &cert.b, 4 * grid);
            (s.sup_bound, format!("angle {}", s.argmax))
        }
        other => return Err(Error::UnsupportedCertificate(other.name().to_string())),
    };
    let recomputed = ratio_bound(&cert.b, &problem.targets, sup);
    if cert.bound > recomputed + CHECK_SLACK {
        return Err(Error::CertificateRejected {
            location,
            claimed_sup: cert.certified_sup,
            recomputed_sup: sup,
        });
    }
    Ok(recomputed)
}
