//! `ℓ1(Z₊)`: power series with summable coefficients, evaluated on the
//! closed disc. Atoms are the monomials `z^k`, with transforms `(λ_i^k)_i`.

use std::cell::Cell;

use num_complex::Complex64 as C64;

use super::{
    assemble, ratio_bound, zero_or_check, DualCertificate, DualScope, TruncationPlan,
    DEFAULT_PHASES, DEFAULT_TAIL_MARGIN, MAX_DEGREE, MAX_ROUNDS,
};
use crate::error::{Error, Result};
use crate::lp::{inner, solve_atomic, AtomOracle};
use crate::problem::NormResult;

pub(crate) fn power(l: C64, k: u64) -> C64 {
    if k == 0 {
        return C64::new(1.0, 0.0);
    }
    C64::from_polar(l.norm().powi(k as i32), l.arg() * k as f64)
}

fn powers(lambdas: &[C64], k: u64) -> Vec<C64> {
    lambdas.iter().map(|l| power(*l, k)).collect()
}

/// Bound on `|⟨b, v(k')⟩|` valid for every `k' ≥ k`.
fn tail(lambdas: &[C64], b: &[C64], k: u64) -> f64 {
    lambdas
        .iter()
        .zip(b)
        .map(|(l, bi)| {
            let r = l.norm();
            if r >= 1.0 {
                bi.norm()
            } else {
                bi.norm() * r.powi(k as i32)
            }
        })
        .sum()
}

fn boundary_mass(lambdas: &[C64], b: &[C64]) -> f64 {
    lambdas
        .iter()
        .zip(b)
        .filter(|(l, _)| l.norm() >= 1.0)
        .map(|(_, bi)| bi.norm())
        .sum()
}

/// `(S, k*)`: a certified bound `S ≥ sup_k |⟨b, v(k)⟩|` from an exact scan
/// followed by the geometric tail, and the power attaining the scanned maximum.
pub(crate) fn certified_sup(lambdas: &[C64], b: &[C64], cap: u64) -> (f64, u64) {
    let mut best = 0.0;
    let mut argmax = 0;
    let mut k = 0;
    while k < cap {
        if k > 0 && tail(lambdas, b, k) <= best {
            break;
        }
        let v = inner(b, &powers(lambdas, k)).norm();
        if v > best {
            best = v;
            argmax = k;
        }
        k += 1;
    }
    (best.max(tail(lambdas, b, k)), argmax)
}

struct Monomials<'a> {
    lambdas: &'a [C64],
    scanned: Cell<u64>,
}

impl AtomOracle for Monomials<'_> {
    type Label = u64;

    fn atom(&self, k: u64) -> Vec<C64> {
        powers(self.lambdas, k)
    }

    fn price(&self, b: &[C64], threshold: f64) -> Result<Vec<(u64, C64)>> {
        let mut found = Vec::new();
        let mut k = 0;
        while k <= MAX_DEGREE && tail(self.lambdas, b, k) > threshold {
            let p = inner(b, &self.atom(k));
            if p.norm() > threshold {
                found.push((k, p));
            }
            k += 1;
        }
        self.scanned.set(self.scanned.get().max(k));
        if found.is_empty() && k > MAX_DEGREE {
            let mass = boundary_mass(self.lambdas, b);
            if mass > threshold {
                return Err(Error::TailBoundFailure { boundary_mass: mass });
            }
            return Err(Error::stall(
                format!("dual tail not certified within degree {MAX_DEGREE}"),
                None,
            ));
        }
        found.sort_by(|x, y| y.1.norm().total_cmp(&x.1.norm()).then(x.0.cmp(&y.0)));
        found.truncate(self.lambdas.len().max(4));
        Ok(found)
    }
}

pub fn np_norm_analytic_wiener(lambdas: &[C64], targets: &[C64], tolerance: f64) -> Result<NormResult> {
    if lambdas.len() != targets.len() {
        return Err(Error::LengthMismatch {
            sites: lambdas.len(),
            targets: targets.len(),
        });
    }
    for (i, l) in lambdas.iter().enumerate() {
        if !(l.norm() <= 1.0) {
            return Err(Error::domain(i, format!("|λ| = {} must be <= 1", l.norm())));
        }
        if let Some(first) = lambdas[..i].iter().position(|m| m == l) {
            return Err(Error::DuplicateSite { first, index: i });
        }
    }
    if let Some(zero) = zero_or_check(targets, tolerance)? {
        return Ok(zero);
    }

    let plan = TruncationPlan::analytic(lambdas, DEFAULT_TAIL_MARGIN);
    let start = plan.degree.min((lambdas.len() as u64 + 4).max(16));
    let initial: Vec<u64> = (0..=start).collect();
    let oracle = Monomials {
        lambdas,
        scanned: Cell::new(0),
    };
    let sol = solve_atomic(&oracle, targets, &initial, DEFAULT_PHASES, MAX_ROUNDS, 0.5 * tolerance)?;

    let (sup, _) = certified_sup(lambdas, &sol.b, 2 * MAX_DEGREE);
    let degree = oracle.scanned.get();
    let dual = DualCertificate {
        bound: ratio_bound(&sol.b, targets, sup),
        certified_sup: sup,
        scope: DualScope::PowerScan {
            degree,
            tail_bound: tail(lambdas, &sol.b, degree),
        },
        b: sol.b.clone(),
    };
    let result = assemble(&sol, targets, dual, |k| k as f64, Some(degree));
    if result.gap() > tolerance {
        return Err(Error::stall(
            format!("gap {:e} above tolerance after column generation", result.gap()),
            Some(result),
        ));
    }
    Ok(result)
}
