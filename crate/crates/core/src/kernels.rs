//! Fejér and de la Vallée Poussin kernels, frequency-domain convolution of
//! measures on the circle, and the smoothing chain that turns a measure into
//! an `L¹` function with the same low Fourier coefficients.
//!
//! Measures use the normalized Haar measure `dθ / 2π`: `δ_θ` has mass 1, the
//! constant density 1 has mass 1, and `μ̂(k) = ∫ e^{−ikθ} dμ`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::NormResult;
use crate::seqalg::np_norm_l1_torus;

/// Largest grid [`kernel_l1_norm`] will refine to.
pub const MAX_GRID: usize = 1 << 22;
/// Richardson acceptance threshold for [`kernel_l1_norm`].
pub const L1_REFINEMENT_TOLERANCE: f64 = 1e-8;
/// Largest de la Vallée Poussin order tried by [`example1_chain`].
pub const CHAIN_MAX_ORDER: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Fejer,
    Dlvp,
}

/// An even kernel given by its Fourier coefficients; `profile[k]` is the
/// coefficient at `±k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub order: usize,
    pub profile: Vec<f64>,
}

impl KernelSpec {
    pub fn coeff(&self, k: i64) -> f64 {
        self.profile.get(k.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// Largest `|k|` with a nonzero coefficient.
    pub fn support(&self) -> usize {
        self.profile.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    /// Values `Σ_k coeff(k) e^{ikθ_m}` on `grid` uniform angles.
    pub fn samples(&self, grid: usize) -> Result<Vec<f64>> {
        let delta = TorusMeasure::point_mass(0.0, C64::new(1.0, 0.0));
        Ok(convolve(&delta, self, grid)?.samples.iter().map(|z| z.re).collect())
    }
}

pub fn kernel_coeffs(kind: KernelKind, order: usize) -> Result<KernelSpec> {
    if order == 0 {
        return Err(Error::domain(0, "kernel order must be at least 1"));
    }
    let profile = match kind {
        KernelKind::Fejer => (0..=order)
            .map(|k| (order + 1 - k) as f64 / (order + 1) as f64)
            .collect(),
        KernelKind::Dlvp => (0..=2 * order)
            .map(|k| if k <= order { 1.0 } else { (2 * order - k) as f64 / order as f64 })
            .collect(),
    };
    Ok(KernelSpec { kind, order, profile })
}

/// A measure on the circle: point masses plus an optional density sampled on
/// a uniform grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TorusMeasure {
    pub atoms: Vec<(f64, C64)>,
    pub density: Option<Vec<C64>>,
}

impl TorusMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn point_mass(angle: f64, weight: C64) -> Self {
        TorusMeasure {
            atoms: vec![(angle, weight)],
            density: None,
        }
    }

    pub fn from_density(samples: Vec<C64>) -> Self {
        TorusMeasure {
            atoms: Vec::new(),
            density: Some(samples),
        }
    }

    /// Samples `f(2πm/grid)` as a density.
    pub fn from_density_fn(grid: usize, f: impl Fn(f64) -> C64) -> Self {
        Self::from_density((0..grid).map(|m| f(TAU * m as f64 / grid as f64)).collect())
    }

    /// `Σ|w_a| + (1/M) Σ|f_m|`.
    pub fn total_variation(&self) -> f64 {
        let atomic: f64 = self.atoms.iter().map(|(_, w)| w.norm()).sum();
        let dense = match &self.density {
            Some(d) if !d.is_empty() => d.iter().map(|z| z.norm()).sum::<f64>() / d.len() as f64,
            _ => 0.0,
        };
        atomic + dense
    }

    /// `μ̂(k)` for `k ∈ -kmax..=kmax`: exact on atoms, trapezoid rule on the density.
    pub fn fourier_coeffs(&self, kmax: usize) -> Vec<C64> {
        let mut out: Vec<C64> = (-(kmax as i64)..=kmax as i64)
            .map(|k| {
                self.atoms
                    .iter()
                    .map(|(t, w)| w * C64::from_polar(1.0, -(k as f64) * t))
                    .sum()
            })
            .collect();
        if let Some(d) = self.density.as_ref().filter(|d| !d.is_empty()) {
            let m = d.len();
            let mut buf = d.clone();
            FftPlanner::new().plan_fft_forward(m).process(&mut buf);
            for (j, k) in (-(kmax as i64)..=kmax as i64).enumerate() {
                out[j] += buf[k.rem_euclid(m as i64) as usize] / m as f64;
            }
        }
        out
    }
}

/// Samples of `μ ∗ V` and their discrete `L¹` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convolution {
    pub grid: usize,
    pub samples: Vec<C64>,
    /// `(1/M) Σ |samples|`.
    pub l1_norm: f64,
}

impl Convolution {
    /// Fourier coefficient of the sampled output, by the trapezoid rule.
    pub fn coefficient(&self, k: i64) -> C64 {
        let m = self.grid as i64;
        self.samples
            .iter()
            .enumerate()
            .map(|(j, s)| s * C64::from_polar(1.0, -TAU * ((k * j as i64).rem_euclid(m)) as f64 / m as f64))
            .sum::<C64>()
            / m as f64
    }
}

/// Synthesizes `Σ_k coeff(k) μ̂(k) e^{ikθ_m}` on `grid` points.
pub fn convolve(mu: &TorusMeasure, kernel: &KernelSpec, grid: usize) -> Result<Convolution> {
    let support = kernel.support();
    let required = 8 * support.max(1);
    if grid < required {
        return Err(Error::GridTooCoarse { grid, required });
    }
    let hat = mu.fourier_coeffs(support);
    let mut buf = vec![C64::new(0.0, 0.0); grid];
    for (j, k) in (-(support as i64)..=support as i64).enumerate() {
        buf[k.rem_euclid(grid as i64) as usize] += hat[j] * kernel.coeff(k);
    }
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    let l1_norm = buf.iter().map(|z| z.norm()).sum::<f64>() / grid as f64;
    Ok(Convolution {
        grid,
        samples: buf,
        l1_norm,
    })
}

/// `(1/2π) ∫ |V|`, doubling the grid. The kinks of `|V|` make the trapezoid
/// error O(m⁻²), so each doubling is Richardson-extrapolated and the value is
/// accepted once two successive extrapolations agree to
/// [`L1_REFINEMENT_TOLERANCE`].
pub fn kernel_l1_norm(kernel: &KernelSpec, grid: usize) -> Result<f64> {
    let required = 64 * kernel.order;
    if grid < required {
        return Err(Error::GridTooCoarse { grid, required });
    }
    let norm = |m: usize| -> Result<f64> {
        Ok(kernel.samples(m)?.iter().map(|v| v.abs()).sum::<f64>() / m as f64)
    };
    let mut m = grid;
    let mut prev = norm(m)?;
    let mut prev_extrapolated = None;
    while 2 * m <= MAX_GRID {
        m *= 2;
        let next = norm(m)?;
        let extrapolated = next + (next - prev) / 3.0;
        if prev_extrapolated.is_some_and(|e: f64| (extrapolated - e).abs() < L1_REFINEMENT_TOLERANCE) {
            return Ok(extrapolated);
        }
        prev = next;
        prev_extrapolated = Some(extrapolated);
    }
    Err(Error::GridTooCoarse {
        grid: m,
        required: 2 * m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub order: usize,
    pub grid: usize,
    /// `‖μ ∗ V_l‖₁`.
    pub f_norm: f64,
    /// `max_i |f̂(k_i) − a_i|`.
    pub coefficient_error: f64,
    /// `‖f‖₁ − NP lower bound`; nonnegative because `f` interpolates.
    pub np_slack: f64,
    /// `‖μ‖ − ‖f‖₁ + ε/2`; the chain needs this positive at the chosen order.
    pub mu_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Report {
    pub ks: Vec<i64>,
    pub coefficients: Vec<C64>,
    pub mu_norm: f64,
    pub np: NormResult,
    pub steps: Vec<ChainStep>,
    /// First order at which `‖μ‖ > ‖f‖₁ − ε/2`, if reached.
    pub chosen_order: Option<usize>,
    /// `‖f‖₁` at the last order computed.
    pub limit: f64,
    pub limit_at_least_np: bool,
}

/// Smooths `μ` with `V_l` for `l = l₀, 2l₀, …` (`l₀ > max|k_i|`) and records
/// each link of `NP(a) ≤ ‖μ ∗ V_l‖₁ < ‖μ‖ + ε/2`.
pub fn example1_chain(mu: &TorusMeasure, ks: &[i64], epsilon: f64) -> Result<Example1Report> {
    if !(epsilon > 0.0) {
        return Err(Error::NonpositiveTolerance(epsilon));
    }
    let kmax = ks.iter().map(|k| k.unsigned_abs() as usize).max().ok_or(Error::EmptyTargets)?;
    let hat = mu.fourier_coeffs(kmax);
    let coefficients: Vec<C64> = ks.iter().map(|k| hat[(*k + kmax as i64) as usize]).collect();
    let np = np_norm_l1_torus(ks, &coefficients, crate::problem::DEFAULT_TOLERANCE)?;
    let mu_norm = mu.total_variation();
    let density_grid = mu.density.as_ref().map_or(0, |d| d.len());

    let mut steps = Vec::new();
    let mut chosen_order = None;
    let mut order = kmax + 1;
    while order <= CHAIN_MAX_ORDER {
        let kernel = kernel_coeffs(KernelKind::Dlvp, order)?;
        let grid = (16 * order).max(density_grid).next_power_of_two();
        let f = convolve(mu, &kernel, grid)?;
        let coefficient_error = ks
            .iter()
            .zip(&coefficients)
            .map(|(k, a)| (f.coefficient(*k) - a).norm())
            .fold(0.0, f64::max);
        let step = ChainStep {
            order,
            grid,
            f_norm: f.l1_norm,
            coefficient_error,
            np_slack: f.l1_norm - np.lower,
            mu_slack: mu_norm - f.l1_norm + 0.5 * epsilon,
        };
        if chosen_order.is_none() && step.mu_slack > 0.0 {
            chosen_order = Some(order);
        }
        let settled = steps
            .last()
            .is_some_and(|p: &ChainStep| (p.f_norm - step.f_norm).abs() < 0.25 * epsilon);
        steps.push(step);
        if chosen_order.is_some() && settled {
            break;
        }
        order *= 2;
    }
    let limit = steps.last().map_or(0.0, |s| s.f_norm);
    Ok(Example1Report {
        ks: ks.to_vec(),
        coefficients,
        mu_norm,
        limit_at_least_np: limit >= np.lower - crate::problem::DEFAULT_TOLERANCE,
        np,
        steps,
        chosen_order,
        limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn dlvp_two() {
        let v = kernel_coeffs(KernelKind::Dlvp, 2).unwrap();
        for k in -2..=2 {
            assert_eq!(v.coeff(k), 1.0);
        }
        assert_eq!(v.coeff(3), 0.5);
        assert_eq!(v.coeff(-3), 0.5);
        assert_eq!(v.coeff(4), 0.0);
        assert_eq!(v.coeff(17), 0.0);
        assert_eq!(v.support(), 3);
    }

    #[test]
    fn fejer_one() {
        let k = kernel_coeffs(KernelKind::Fejer, 1).unwrap();
        assert_eq!((k.coeff(0), k.coeff(1), k.coeff(-1), k.coeff(2)), (1.0, 0.5, 0.5, 0.0));
    }

    #[test]
    fn order_zero_is_rejected() {
        assert!(kernel_coeffs(KernelKind::Dlvp, 0).is_err());
    }

    #[test]
    fn constant_density_is_fixed() {
        let mu = TorusMeasure::from_density(vec![c(1.0); 256]);
        let v = kernel_coeffs(KernelKind::Dlvp, 8).unwrap();
        let f = convolve(&mu, &v, 256).unwrap();
        assert!(f.samples.iter().all(|s| (s - c(1.0)).norm() < 1e-12));
        assert!((f.l1_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_reproduces_the_kernel() {
        let v = kernel_coeffs(KernelKind::Dlvp, 3).unwrap();
        let f = convolve(&TorusMeasure::point_mass(0.0, c(1.0)), &v, 64).unwrap();
        for (m, s) in f.samples.iter().enumerate() {
            let t = TAU * m as f64 / 64.0;
            let direct: f64 = (-6i64..=6).map(|k| v.coeff(k) * (k as f64 * t).cos()).sum();
            assert!((s - c(direct)).norm() < 1e-12);
        }
    }

    #[test]
    fn fejer_density_is_reproduced() {
        let k4 = kernel_coeffs(KernelKind::Fejer, 4).unwrap();
        let samples: Vec<C64> = k4.samples(512).unwrap().into_iter().map(c).collect();
        let v = kernel_coeffs(KernelKind::Dlvp, 8).unwrap();
        let f = convolve(&TorusMeasure::from_density(samples.clone()), &v, 512).unwrap();
        for (a, b) in f.samples.iter().zip(&samples) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let v = kernel_coeffs(KernelKind::Dlvp, 4).unwrap();
        assert_eq!(
            convolve(&TorusMeasure::zero(), &v, 40),
            Err(Error::GridTooCoarse { grid: 40, required: 56 })
        );
        assert!(matches!(kernel_l1_norm(&v, 128), Err(Error::GridTooCoarse { required: 256, .. })));
    }

    #[test]
    fn kernel_norms() {
        let v1 = kernel_l1_norm(&kernel_coeffs(KernelKind::Dlvp, 1).unwrap(), 64).unwrap();
        // V_1 = 1 + 2 cos θ: (1/2π)∫|1 + 2cos θ| = (1/3) + (2√3)/π
        let exact = 1.0 / 3.0 + 2.0 * 3f64.sqrt() / std::f64::consts::PI;
        assert!((v1 - exact).abs() < 1e-7, "{v1} vs {exact}");
        for n in [1, 5, 32] {
            let k = kernel_l1_norm(&kernel_coeffs(KernelKind::Fejer, n).unwrap(), 64 * n).unwrap();
            assert!((k - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn smoothing_converges_for_a_continuous_density() {
        let grid = 8192;
        let mu = TorusMeasure::from_density_fn(grid, |t| c(t.cos().max(0.0)));
        let base = mu.density.clone().unwrap();
        let mut prev = f64::INFINITY;
        for l in [16, 32, 64, 128, 256] {
            let f = convolve(&mu, &kernel_coeffs(KernelKind::Dlvp, l).unwrap(), grid).unwrap();
            let err: f64 = f.samples.iter().zip(&base).map(|(a, b)| (a - b).norm()).sum::<f64>() / grid as f64;
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn chain_for_a_smooth_density() {
        let k8 = kernel_coeffs(KernelKind::Fejer, 8).unwrap();
        let mu = TorusMeasure::from_density(k8.samples(256).unwrap().into_iter().map(c).collect());
        let r = example1_chain(&mu, &[0, 1], 1e-3).unwrap();
        assert!((r.coefficients[0] - c(1.0)).norm() < 1e-12);
        assert!((r.coefficients[1] - c(8.0 / 9.0)).norm() < 1e-12);
        assert!((r.mu_norm - 1.0).abs() < 1e-12);
        for s in &r.steps {
            assert!(s.coefficient_error < 1e-10);
            assert!(s.np_slack >= -1e-9);
        }
        assert!((r.limit - 1.0).abs() < 1e-9);
        assert!(r.chosen_order.is_some() && r.limit_at_least_np);
    }

    #[test]
    fn chain_for_a_point_mass() {
        let r = example1_chain(&TorusMeasure::point_mass(0.0, c(1.0)), &[0, 1], 1e-2).unwrap();
        assert_eq!(r.coefficients, vec![c(1.0), c(1.0)]);
        assert!((r.np.lower - 1.0).abs() < 1e-9);
        assert!(r.steps.iter().all(|s| s.coefficient_error < 1e-10 && s.f_norm >= 1.0));
        assert!(r.limit_at_least_np);
    }

    #[test]
    fn chain_for_zero() {
        let r = example1_chain(&TorusMeasure::zero(), &[0, 3], 1e-3).unwrap();
        assert_eq!(r.np.upper, 0.0);
        assert!(r.steps.iter().all(|s| s.f_norm == 0.0 && s.coefficient_error == 0.0));
        assert_eq!(r.limit, 0.0);
    }

    #[test]
    fn dlvp_reproduces_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for l in [1usize, 4, 16] {
            let grid = (16 * l).next_power_of_two();
            let coeffs: Vec<C64> = (0..=2 * l)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let p = |t: f64| -> C64 {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * C64::from_polar(1.0, (j as f64 - l as f64) * t))
                    .sum()
            };
            let mu = TorusMeasure::from_density_fn(grid, p);
            let f = convolve(&mu, &kernel_coeffs(KernelKind::Dlvp, l).unwrap(), grid).unwrap();
            for (a, b) in f.samples.iter().zip(mu.density.as_ref().unwrap()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn dlvp_is_one_on_the_low_band(l in 1usize..200) {
            let v = kernel_coeffs(KernelKind::Dlvp, l).unwrap();
            for k in -(l as i64)..=l as i64 {
                prop_assert_eq!(v.coeff(k), 1.0);
            }
            prop_assert_eq!(v.coeff(2 * l as i64), 0.0);
            prop_assert!(v.support() < 2 * l);
        }

        #[test]
        fn fejer_samples_are_nonnegative(n in 1usize..64) {
            let k = kernel_coeffs(KernelKind::Fejer, n).unwrap();
            prop_assert!(k.samples(16 * n).unwrap().iter().all(|v| *v >= -1e-12));
        }
    }
}
