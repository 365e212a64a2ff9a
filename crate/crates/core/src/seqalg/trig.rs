//! Rigorous upper bounds for `sup_θ |p(θ)|` of a trigonometric polynomial
//! `p(θ) = Σ c_j e^{i k_j θ}`.
//!
//! `q = |p|²` is expanded to third order about the midpoint of every cell of
//! a uniform grid. The cubic is maximized exactly on the cell and the fourth
//! derivative is bounded by `D⁴ (Σ|c_j|)²` with `D = max k − min k`, because
//! `q` only carries frequencies in `[−D, D]`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fourth-order remainder aimed for, relative to `(Σ|c_j|)²`.
const REMAINDER_TARGET: f64 = 1e-14;
const MAX_GRID: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigSupBound {
    /// Certified upper bound on `sup |p|`.
    pub sup_bound: f64,
    /// Angle of the cell that produced the bound.
    pub argmax: f64,
    /// Number of cells.
    pub grid: usize,
    /// Taylor remainder added to the squared bound.
    pub remainder: f64,
}

/// Values of `p, p', p'', p'''` at `theta`.
pub(crate) fn derivatives(freqs: &[i64], coeffs: &[C64], theta: f64) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    for (&k, &c) in freqs.iter().zip(coeffs) {
        let kf = k as f64;
        let mut term = c * C64::from_polar(1.0, kf * theta);
        for d in out.iter_mut() {
            *d += term;
            term *= C64::new(0.0, kf);
        }
    }
    out
}

/// Smallest admissible power-of-two grid for a spread `d` and mass `s0`.
fn grid_for(d: f64, min_grid: usize) -> usize {
    let need = PI * d * (1.0 / (24.0 * REMAINDER_TARGET)).powf(0.25);
    let need = if need.is_finite() { need.ceil() as usize } else { MAX_GRID };
    need.max(min_grid).max(8).next_power_of_two().min(MAX_GRID)
}

fn cubic_max(q: [f64; 4], half: f64) -> f64 {
    let g = |s: f64| q[0] + s * (q[1] + s * (q[2] / 2.0 + s * q[3] / 6.0));
    let mut best = g(-half).max(g(half));
    // g'(s) = q1 + q2 s + q3 s²/2
    let (a, b, c) = (q[3] / 2.0, q[2], q[1]);
    let mut consider = |s: f64| {
        if s.is_finite() && s.abs() <= half {
            best = best.max(g(s));
        }
    };
    if a == 0.0 {
        if b != 0.0 {
            consider(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            let t = -0.5 * (b + b.signum() * r);
            if t != 0.0 {
                consider(t / a);
                consider(c / t);
            } else {
                consider(0.0);
            }
        }
    }
    best
}

/// Certified bound on `sup_θ |Σ c_j e^{i k_j θ}|` on a grid of at least
/// `min_grid` cells.
pub fn certify_trig_sup(freqs: &[i64], coeffs: &[C64], min_grid: usize) -> TrigSupBound {
    let mass: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let (kmin, kmax) = match (freqs.iter().min(), freqs.iter().max()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => {
            return TrigSupBound {
                sup_bound: 0.0,
                argmax: 0.0,
                grid: 1,
                remainder: 0.0,
            }
        }
    };
    if kmin == kmax {
        let total: C64 = coeffs.iter().sum();
        return TrigSupBound {
            sup_bound: total.norm(),
            argmax: 0.0,
            grid: 1,
            remainder: 0.0,
        };
    }
    let centre = kmin + (kmax - kmin) / 2;
    let shifted: Vec<i64> = freqs.iter().map(|k| k - centre).collect();
    let d = (kmax - kmin) as f64;
    let s0 = mass * mass;
    let grid = grid_for(d, min_grid);
    let h = TAU / grid as f64;
    let remainder = (h / 2.0).powi(4) / 24.0 * d.powi(4) * s0;
    let rounding = 64.0 * f64::EPSILON * s0 * (1.0 + freqs.len() as f64);

    let (qmax, cell) = (0..grid)
        .into_par_iter()
        .map(|m| {
            let mid = (m as f64 + 0.5) * h;
            let [p0, p1, p2, p3] = derivatives(&shifted, coeffs, mid);
            let q = [
                p0.norm_sqr(),
                2.0 * (p0.conj() * p1).re,
                2.0 * p1.norm_sqr() + 2.0 * (p0.conj() * p2).re,
                6.0 * (p1.conj() * p2).re + 2.0 * (p0.conj() * p3).re,
            ];
            (cubic_max(q, h / 2.0), m)
        })
        .reduce(
            || (f64::NEG_INFINITY, 0),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    TrigSupBound {
        sup_bound: (qmax + remainder + rounding).max(0.0).sqrt(),
        argmax: (cell as f64 + 0.5) * h,
        grid,
        remainder,
    }
}
