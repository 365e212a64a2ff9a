//! Interpolation problems, certified results and backend dispatch.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finitemodel::{self, FiniteAlgebra, NormKind};
use crate::hardy;
use crate::seqalg::{self, DualCertificate};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Concrete representation of one multiplicative functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    /// Point evaluation at a point of the (closed) unit disc.
    DiscPoint(C64),
    /// Evaluation of an absolutely convergent Fourier series at an angle in `[0, 2π)`.
    CircleAngle(f64),
    /// The Fourier coefficient functional at an integer frequency.
    IntegerCharacter(i64),
    /// Coordinate functional on `Cⁿ`, 1-based.
    CoordinateIndex(usize),
}

impl Site {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Site::DiscPoint(_) => "disc_point",
            Site::CircleAngle(_) => "circle_angle",
            Site::IntegerCharacter(_) => "integer_character",
            Site::CoordinateIndex(_) => "coordinate_index",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    /// `H^∞(D)` with point evaluations in the open disc.
    Hardy,
    /// `ℓ1(Z₊)` (power series with summable coefficients) on the closed disc.
    AnalyticWiener,
    /// `ℓ1(Z)` under convolution, evaluated on the circle.
    Wiener,
    /// `L¹(T)` at integer characters.
    L1Torus,
    /// A finite Gelfand-space model algebra on `Cⁿ`.
    Finite(FiniteAlgebra),
}

pub const BACKEND_NAMES: [&str; 7] = [
    "hardy",
    "analytic_wiener",
    "wiener",
    "l1_torus",
    "finite_sup",
    "finite_l1",
    "finite_lp",
];

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Hardy => "hardy",
            Backend::AnalyticWiener => "analytic_wiener",
            Backend::Wiener => "wiener",
            Backend::L1Torus => "l1_torus",
            Backend::Finite(alg) => match alg.norm_kind() {
                NormKind::WeightedSup => "finite_sup",
                NormKind::WeightedL1 => "finite_l1",
                NormKind::Lp(_) => "finite_lp",
            },
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Backend identifiers without parameters, as they appear in problem files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Hardy,
    AnalyticWiener,
    Wiener,
    L1Torus,
    FiniteSup,
    FiniteL1,
    FiniteLp,
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hardy" => BackendKind::Hardy,
            "analytic_wiener" => BackendKind::AnalyticWiener,
            "wiener" => BackendKind::Wiener,
            "l1_torus" => BackendKind::L1Torus,
            "finite_sup" => BackendKind::FiniteSup,
            "finite_l1" => BackendKind::FiniteL1,
            "finite_lp" => BackendKind::FiniteLp,
            other => return Err(Error::UnknownBackend(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationProblem {
    pub backend: Backend,
    pub sites: Vec<Site>,
    pub targets: Vec<C64>,
    pub tolerance: f64,
}

impl InterpolationProblem {
    pub fn new(backend: Backend, sites: Vec<Site>, targets: Vec<C64>) -> Self {
        InterpolationProblem {
            backend,
            sites,
            targets,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_problem(self)
    }
}

/// One term `c · atom(position)` of a primal interpolant. `position` is the
/// power/frequency for sequence algebras and the angle for point masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomTerm {
    pub position: f64,
    pub coefficient: C64,
}

/// Evidence backing a [`NormResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    ZeroTargets,
    ClosedForm {
        formula: String,
    },
    Pick {
        /// Smallest Pick-matrix eigenvalue at the upper level.
        min_eigenvalue_at_upper: f64,
        /// Smallest eigenvalue one tolerance below the lower level, when probed.
        min_eigenvalue_below_lower: Option<f64>,
        psd_slack: f64,
    },
    Atomic {
        dual: DualCertificate,
        /// Primal interpolant achieving the upper bound.
        primal: Vec<AtomTerm>,
        /// Largest power/frequency index the pricing scanned.
        scanned_degree: Option<u64>,
    },
    Coset {
        /// Interpolating vector whose norm is the upper bound.
        interpolant: Vec<C64>,
        /// Which argument supplies the lower bound.
        lower_from: String,
        refinements: usize,
    },
}

/// Certified bracket `[lower, upper]` for a Nevanlinna-Pick norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub lower: f64,
    pub upper: f64,
    pub certificate: Certificate,
    pub iterations: usize,
}

impl NormResult {
    pub fn exact(value: f64, certificate: Certificate) -> Self {
        NormResult {
            lower: value,
            upper: value,
            certificate,
            iterations: 0,
        }
    }

    pub fn zero() -> Self {
        Self::exact(0.0, Certificate::ZeroTargets)
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Checks the result invariants against its problem data.
    pub fn satisfies_invariants(&self, targets: &[C64], tolerance: f64) -> bool {
        let floor = targets.iter().map(|a| a.norm()).fold(0.0, f64::max);
        self.lower >= 0.0
            && self.lower <= self.upper
            && self.gap() <= tolerance
            && self.lower >= floor - tolerance
    }
}

pub fn validate_problem(p: &InterpolationProblem) -> Result<()> {
    if !(p.tolerance > 0.0 && p.tolerance.is_finite()) {
        return Err(Error::NonpositiveTolerance(p.tolerance));
    }
    if p.sites.len() != p.targets.len() {
        return Err(Error::LengthMismatch {
            sites: p.sites.len(),
            targets: p.targets.len(),
        });
    }
    if p.sites.is_empty() {
        return Err(Error::EmptyTargets);
    }
    for (i, a) in p.targets.iter().enumerate() {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::domain(i, "target is not finite"));
        }
    }
    for (i, s) in p.sites.iter().enumerate() {
        if let Some(first) = p.sites[..i].iter().position(|t| t == s) {
            return Err(Error::DuplicateSite { first, index: i });
        }
        check_site(&p.backend, i, s)?;
    }
    Ok(())
}

fn check_site(backend: &Backend, i: usize, s: &Site) -> Result<()> {
    let wrong = || {
        Error::domain(
            i,
            format!("{} site not accepted by backend {}", s.kind_name(), backend.name()),
        )
    };
    match (backend, s) {
        (Backend::Hardy, Site::DiscPoint(z)) => {
            if !(z.norm() < 1.0) {
                return Err(Error::domain(i, format!("|λ| = {} must be < 1", z.norm())));
            }
        }
        (Backend::AnalyticWiener, Site::DiscPoint(z)) => {
            if !(z.norm() <= 1.0) {
                return Err(Error::domain(i, format!("|λ| = {} must be <= 1", z.norm())));
            }
        }
        (Backend::Wiener, Site::CircleAngle(t)) => {
            if !(*t >= 0.0 && *t < TAU) {
                return Err(Error::domain(i, format!("angle {t} outside [0, 2π)")));
            }
        }
        (Backend::L1Torus, Site::IntegerCharacter(_)) => {}
        (Backend::Finite(alg), Site::CoordinateIndex(k)) => {
            if *k == 0 || *k > alg.dimension() {
                return Err(Error::domain(
                    i,
                    format!("coordinate index {k} outside 1..={}", alg.dimension()),
                ));
            }
        }
        _ => return Err(wrong()),
    }
    Ok(())
}

/// The Remark-1 floor `max_i |a_i|`.
pub fn sup_lower_bound(targets: &[C64]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    Ok(targets.iter().map(|a| a.norm()).fold(0.0, f64::max))
}

pub fn compute_np_norm(p: &InterpolationProblem) -> Result<NormResult> {
    validate_problem(p)?;
    let tol = p.tolerance;
    match &p.backend {
        Backend::Hardy => hardy::np_norm_hardy(&disc_points(&p.sites), &p.targets, tol),
        Backend::AnalyticWiener => {
            seqalg::np_norm_analytic_wiener(&disc_points(&p.sites), &p.targets, tol)
        }
        Backend::Wiener => {
            let thetas: Vec<f64> = p
                .sites
                .iter()
                .map(|s| match s {
                    Site::CircleAngle(t) => *t,
                    _ => unreachable!("validated"),
                })
                .collect();
            seqalg::np_norm_wiener(&thetas, &p.targets, tol)
        }
        Backend::L1Torus => {
            let ks: Vec<i64> = p
                .sites
                .iter()
                .map(|s| match s {
                    Site::IntegerCharacter(k) => *k,
                    _ => unreachable!("validated"),
                })
                .collect();
            seqalg::np_norm_l1_torus(&ks, &p.targets, tol)
        }
        Backend::Finite(alg) => {
            let subset = coordinate_subset(&p.sites);
            if alg.is_full() {
                finitemodel::np_norm_closed_form(alg, &subset, &p.targets)
            } else {
                finitemodel::np_norm_generic(alg, &subset, &p.targets, tol)
            }
        }
    }
}

pub(crate) fn disc_points(sites: &[Site]) -> Vec<C64> {
    sites
        .iter()
        .map(|s| match s {
            Site::DiscPoint(z) => *z,
            _ => unreachable!("validated"),
        })
        .collect()
}

/// 0-based coordinate indices from validated `CoordinateIndex` sites.
pub(crate) fn coordinate_subset(sites: &[Site]) -> Vec<usize> {
    sites
        .iter()
        .map(|s| match s {
            Site::CoordinateIndex(k) => k - 1,
            _ => unreachable!("validated"),
        })
        .collect()
}
