//! `L¹(T)` at integer characters, with normalized Haar measure so that
//! `f̂(k) = ∫ f e^{−ikθ} dθ/2π`.
//!
//! Atoms are point masses `δ_θ` with coefficients `(e^{−i k_i θ})_i`, so the
//! primal value is the total variation of a discrete measure `μ` with
//! `μ̂(k_i) = a_i`. That is an upper bound for the `L¹` infimum: the Fejér
//! means `μ ∗ K_N` have norm at most `‖μ‖` and coefficients
//! `(1 − |k_i|/(N+1)) a_i`, and the trigonometric correction
//! `Σ a_i |k_i|/(N+1) e^{i k_i θ}` has norm tending to zero.
//!
//! The dual polynomial is `p(θ) = Σ b_i e^{i k_i θ}`; pricing looks for its
//! peaks by a grid search refined with Newton steps.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use super::trig::{certify_trig_sup, derivatives};
use super::{
    assemble, ratio_bound, zero_or_check, DualCertificate, DualScope, TruncationPlan, MAX_ROUNDS,
};
use crate::error::{Error, Result};
use crate::lp::{solve_atomic, AtomOracle};
use crate::problem::NormResult;

const TORUS_PHASES: usize = 16;
const NEWTON_STEPS: usize = 30;

struct PointMasses {
    ks: Vec<i64>,
    /// Pricing grid size.
    grid: usize,
}

impl PointMasses {
    fn new(ks: &[i64]) -> Self {
        let spread = (ks.iter().max().unwrap() - ks.iter().min().unwrap()) as usize;
        PointMasses {
            ks: ks.to_vec(),
            grid: (16 * (spread + 1)).max(64).next_power_of_two(),
        }
    }

    /// `|p|²` and its first two derivatives.
    fn q(&self, b: &[C64], theta: f64) -> (f64, f64, f64) {
        let [p0, p1, p2, _] = derivatives(&self.ks, b, theta);
        (
            p0.norm_sqr(),
            2.0 * (p0.conj() * p1).re,
            2.0 * p1.norm_sqr() + 2.0 * (p0.conj() * p2).re,
        )
    }

    fn refine(&self, b: &[C64], theta: f64) -> f64 {
        let h = TAU / self.grid as f64;
        let (mut t, mut best) = (theta, self.q(b, theta).0);
        let mut x = theta;
        for _ in 0..NEWTON_STEPS {
            let (_, d1, d2) = self.q(b, x);
            if d2 >= 0.0 {
                break;
            }
            let step = (-d1 / d2).clamp(-h, h);
            x += step;
            let v = self.q(b, x).0;
            if v > best {
                best = v;
                t = x;
            }
            if step.abs() < 1e-15 {
                break;
            }
        }
        t.rem_euclid(TAU)
    }
}

impl AtomOracle for PointMasses {
    type Label = f64;

    fn atom(&self, theta: f64) -> Vec<C64> {
        self.ks
            .iter()
            .map(|k| C64::from_polar(1.0, -(*k as f64) * theta))
            .collect()
    }

    fn price(&self, b: &[C64], threshold: f64) -> Result<Vec<(f64, C64)>> {
        let m = self.grid;
        let vals: Vec<f64> = (0..m)
            .map(|j| derivatives(&self.ks, b, TAU * j as f64 / m as f64)[0].norm_sqr())
            .collect();
        let mut found: Vec<(f64, C64)> = Vec::new();
        for j in 0..m {
            let (prev, next) = (vals[(j + m - 1) % m], vals[(j + 1) % m]);
            if vals[j] < prev || vals[j] < next {
                continue;
            }
            let theta = self.refine(b, TAU * j as f64 / m as f64);
            let p = derivatives(&self.ks, b, theta)[0].conj();
            if p.norm() > threshold && !found.iter().any(|(t, _)| (t - theta).abs() < 1e-12) {
                found.push((theta, p));
            }
        }
        found.sort_by(|x, y| y.1.norm().total_cmp(&x.1.norm()).then(x.0.total_cmp(&y.0)));
        found.truncate(2 * b.len() + 2);
        Ok(found)
    }
}

pub fn np_norm_l1_torus(ks: &[i64], targets: &[C64], tolerance: f64) -> Result<NormResult> {
    if ks.len() != targets.len() {
        return Err(Error::LengthMismatch {
            sites: ks.len(),
            targets: targets.len(),
        });
    }
    for (i, k) in ks.iter().enumerate() {
        if let Some(first) = ks[..i].iter().position(|j| j == k) {
            return Err(Error::DuplicateSite { first, index: i });
        }
    }
    if let Some(zero) = zero_or_check(targets, tolerance)? {
        return Ok(zero);
    }

    let oracle = PointMasses::new(ks);
    let plan = TruncationPlan::torus(ks);
    let spread = (ks.iter().max().unwrap() - ks.iter().min().unwrap()) as usize;
    let start = (4 * (spread + 1)).max(8).next_power_of_two();
    let initial: Vec<f64> = (0..start).map(|j| TAU * j as f64 / start as f64).collect();
    let sol = solve_atomic(&oracle, targets, &initial, TORUS_PHASES, MAX_ROUNDS, 0.5 * tolerance)?;

    let cert = certify_trig_sup(ks, &sol.b, plan.grid_size);
    let dual = DualCertificate {
        bound: ratio_bound(&sol.b, targets, cert.sup_bound),
        certified_sup: cert.sup_bound,
        scope: DualScope::TrigGrid {
            grid: cert.grid,
            remainder: cert.remainder,
        },
        b: sol.b.clone(),
    };
    let result = assemble(&sol, targets, dual, |t| t, Some(plan.degree));
    if result.gap() > tolerance {
        return Err(Error::stall(
            format!("gap {:e} above tolerance after column generation", result.gap()),
            Some(result),
        ));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Certificate;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn constant_function() {
        let res = np_norm_l1_torus(&[0], &[c(1.0)], 1e-9).unwrap();
        assert!((res.lower - 1.0).abs() < 1e-6 && (res.upper - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_characters() {
        let res = np_norm_l1_torus(&[0, 1], &[c(1.0), c(1.0)], 1e-9).unwrap();
        assert!((res.lower - 1.0).abs() < 1e-5 && (res.upper - 1.0).abs() < 1e-5);
    }

    #[test]
    fn three_characters_beat_the_hand_certificate() {
        let res = np_norm_l1_torus(&[0, 1, 2], &[c(1.0), c(1.0), c(-1.0)], 1e-9).unwrap();
        assert!(res.lower >= 3.0 / 5f64.sqrt() - 1e-6);
        assert!(res.gap() <= 1e-9);
    }

    #[test]
    fn primal_measure_interpolates() {
        let ks = [-2, 1, 3];
        let a = [C64::new(0.2, 0.5), c(-0.7), C64::new(0.1, 0.1)];
        let res = np_norm_l1_torus(&ks, &a, 1e-9).unwrap();
        let Certificate::Atomic { primal, .. } = &res.certificate else {
            panic!("atomic certificate expected")
        };
        for (k, ai) in ks.iter().zip(&a) {
            let coef: C64 = primal
                .iter()
                .map(|t| t.coefficient * C64::from_polar(1.0, -(*k as f64) * t.position))
                .sum();
            assert!((coef - ai).norm() < 1e-10);
        }
        let mass: f64 = primal.iter().map(|t| t.coefficient.norm()).sum();
        assert!((mass - res.upper).abs() < 1e-12);
    }
}
