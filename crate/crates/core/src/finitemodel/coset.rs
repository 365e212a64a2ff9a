//! Minimum norm over an affine coset `x0 + range(W)` in `Cⁿ`.
//!
//! Weighted ℓ1 is an atomic-ℓ1 problem over the coordinate atoms
//! `e^{iφ} e_i / w_i`, mapped by `Tᴴ` with `T` an orthonormal basis of
//! `range(W)^⊥`. Weighted sup goes through its dual: `min Σ|y_i|/w_i` over
//! `y ⊥ range(W)` with `⟨x0, y⟩ = 1`, again over finitely many coordinate
//! atoms; the LP dual of that problem is the minimizing coset element. Both
//! pricing steps are finite scans, so column generation ends exactly. For
//! `ℓp` the primal is found by iteratively reweighted least squares and the
//! lower bound comes from the projected gradient `|x_i|^{p−1} sgn x_i`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::subspace::{hdot, null_space, Vector};
use crate::error::{Error, Result};
use crate::lp::{solve_atomic, AtomOracle};

const PHASES: usize = 16;
const MAX_ROUNDS: usize = 500;
const IRLS_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Shape {
    Sup,
    L1,
    Lp(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NormSpec {
    pub shape: Shape,
    pub weights: Vec<f64>,
}

impl NormSpec {
    pub fn eval(&self, x: &[C64]) -> f64 {
        match self.shape {
            Shape::Sup => x
                .iter()
                .zip(&self.weights)
                .map(|(z, w)| w * z.norm())
                .fold(0.0, f64::max),
            Shape::L1 => x.iter().zip(&self.weights).map(|(z, w)| w * z.norm()).sum(),
            Shape::Lp(p) => lp_norm(x, p),
        }
    }

    /// The norm dual to `self` under the bilinear pairing `Σ y_i x_i`.
    pub fn dual(&self) -> NormSpec {
        let inv: Vec<f64> = self.weights.iter().map(|w| 1.0 / w).collect();
        match self.shape {
            Shape::Sup => NormSpec {
                shape: Shape::L1,
                weights: inv,
            },
            Shape::L1 => NormSpec {
                shape: Shape::Sup,
                weights: inv,
            },
            Shape::Lp(1.0) => NormSpec {
                shape: Shape::Sup,
                weights: inv,
            },
            Shape::Lp(p) => NormSpec {
                shape: Shape::Lp(p / (p - 1.0)),
                weights: inv,
            },
        }
    }
}

pub(crate) fn lp_norm(x: &[C64], p: f64) -> f64 {
    let m = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|z| (z.norm() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CosetMin {
    pub lower: f64,
    pub upper: f64,
    /// Coset element attaining `upper`.
    pub x: Vec<C64>,
    pub refinements: usize,
    pub lower_from: &'static str,
}

/// `x0 + Σ_j w_j ⟨w_j, v − x0⟩`: snaps `v` onto the coset.
fn snap(x0: &[C64], range: &[Vector], v: &[C64]) -> Vec<C64> {
    let d: Vec<C64> = v.iter().zip(x0).map(|(a, b)| a - b).collect();
    let mut x = x0.to_vec();
    for w in range {
        let c = hdot(w, &d);
        for (xi, wi) in x.iter_mut().zip(w) {
            *xi += c * wi;
        }
    }
    x
}

struct CoordinateAtoms<'a> {
    comp: &'a [Vector],
    weights: &'a [f64],
}

impl CoordinateAtoms<'_> {
    fn lift(&self, b: &[C64]) -> Vec<C64> {
        lift(self.comp, b, self.weights.len())
    }
}

fn lift(comp: &[Vector], b: &[C64], n: usize) -> Vec<C64> {
    (0..n).map(|i| comp.iter().zip(b).map(|(t, bk)| t[i] * bk).sum()).collect()
}

impl AtomOracle for CoordinateAtoms<'_> {
    type Label = usize;

    fn atom(&self, i: usize) -> Vec<C64> {
        self.comp.iter().map(|t| t[i].conj() / self.weights[i]).collect()
    }

    fn price(&self, b: &[C64], threshold: f64) -> Result<Vec<(usize, C64)>> {
        let y = self.lift(b);
        let mut found: Vec<(usize, C64)> = y
            .iter()
            .enumerate()
            .map(|(i, yi)| (i, yi.conj() / self.weights[i]))
            .filter(|(_, p)| p.norm() > threshold)
            .collect();
        found.sort_by(|x, y| y.1.norm().total_cmp(&x.1.norm()).then(x.0.cmp(&y.0)));
        Ok(found)
    }
}

/// Coordinate atoms `w_i · (conj(r_1)_i, …, conj(r_d)_i, conj(x0_i))` of the
/// dual problem `min Σ |y_i| / w_i` over `y ⊥ range`, `⟨x0, y⟩ = 1`. A dual
/// vector `b` of that problem yields `z = b_d x0 + Σ_k b_k r_k` with
/// `max_i w_i |z_i| ≤ 1`, so `z / b_d` lies on the coset.
struct SupDualAtoms<'a> {
    rows: Vec<&'a [C64]>,
    weights: &'a [f64],
}

impl SupDualAtoms<'_> {
    fn combine(&self, b: &[C64]) -> Vec<C64> {
        (0..self.weights.len())
            .map(|i| self.rows.iter().zip(b).map(|(r, bk)| bk * r[i]).sum())
            .collect()
    }
}

impl AtomOracle for SupDualAtoms<'_> {
    type Label = usize;

    fn atom(&self, i: usize) -> Vec<C64> {
        self.rows.iter().map(|r| r[i].conj() * self.weights[i]).collect()
    }

    fn price(&self, b: &[C64], threshold: f64) -> Result<Vec<(usize, C64)>> {
        let z = self.combine(b);
        let mut found: Vec<(usize, C64)> = z
            .iter()
            .enumerate()
            .map(|(i, zi)| (i, zi.conj() * self.weights[i]))
            .filter(|(_, p)| p.norm() > threshold)
            .collect();
        found.sort_by(|x, y| y.1.norm().total_cmp(&x.1.norm()).then(x.0.cmp(&y.0)));
        Ok(found)
    }
}

pub(crate) fn minimize_coset(spec: &NormSpec, x0: &[C64], range: &[Vector], tol: f64) -> Result<CosetMin> {
    let n = x0.len();
    let comp: Vec<Vector> = null_space(n, &range.iter().map(|w| w.iter().map(|z| z.conj()).collect()).collect::<Vec<_>>());
    let target: Vec<C64> = comp.iter().map(|t| hdot(t, x0)).collect();
    if comp.is_empty() || target.iter().all(|z| z.norm() == 0.0) {
        return Ok(CosetMin {
            lower: 0.0,
            upper: 0.0,
            x: vec![C64::new(0.0, 0.0); n],
            refinements: 0,
            lower_from: "coset contains zero",
        });
    }
    if range.is_empty() {
        let v = spec.eval(x0);
        return Ok(CosetMin {
            lower: v,
            upper: v,
            x: x0.to_vec(),
            refinements: 0,
            lower_from: "interpolant is unique",
        });
    }
    match spec.shape {
        Shape::L1 => {
            let oracle = CoordinateAtoms {
                comp: &comp,
                weights: &spec.weights,
            };
            let initial: Vec<usize> = (0..n).collect();
            let sol = solve_atomic(&oracle, &target, &initial, PHASES, MAX_ROUNDS, 0.0)?;
            let mut v = vec![C64::new(0.0, 0.0); n];
            for (i, c) in &sol.atoms {
                v[*i] += c / spec.weights[*i];
            }
            let y = oracle.lift(&sol.b);
            let dual_norm = y
                .iter()
                .zip(&spec.weights)
                .map(|(yi, w)| yi.norm() / w)
                .fold(0.0, f64::max);
            Ok(finish_atomic(spec, x0, range, &v, hdot(&y, x0).re, dual_norm, sol.rounds))
        }
        Shape::Sup => {
            let oracle = SupDualAtoms {
                rows: range.iter().map(|r| r.as_slice()).chain(std::iter::once(x0)).collect(),
                weights: &spec.weights,
            };
            let mut goal = vec![C64::new(0.0, 0.0); range.len() + 1];
            goal[range.len()] = C64::new(1.0, 0.0);
            let initial: Vec<usize> = (0..n).collect();
            let sol = solve_atomic(&oracle, &goal, &initial, PHASES, MAX_ROUNDS, 0.0)?;
            let mut y = vec![C64::new(0.0, 0.0); n];
            for (i, c) in &sol.atoms {
                y[*i] += c * spec.weights[*i];
            }
            let lead = sol.b[range.len()];
            if lead.norm() == 0.0 {
                return Err(Error::stall("degenerate dual for the sup-norm coset", None));
            }
            let z: Vec<C64> = oracle.combine(&sol.b).iter().map(|zi| zi / lead).collect();
            let dual_norm: f64 = y.iter().zip(&spec.weights).map(|(yi, w)| yi.norm() / w).sum();
            Ok(finish_atomic(spec, x0, range, &z, hdot(&y, x0).re, dual_norm, sol.rounds))
        }
        Shape::Lp(1.0) => minimize_coset(
            &NormSpec {
                shape: Shape::L1,
                weights: vec![1.0; n],
            },
            x0,
            range,
            tol,
        ),
        Shape::Lp(p) => irls(p, x0, range, tol),
    }
}

fn finish_atomic(
    spec: &NormSpec,
    x0: &[C64],
    range: &[Vector],
    v: &[C64],
    dual_value: f64,
    dual_norm: f64,
    rounds: usize,
) -> CosetMin {
    let x = snap(x0, range, v);
    let upper = spec.eval(&x);
    let lower = if dual_norm > 0.0 { (dual_value / dual_norm).max(0.0) } else { 0.0 };
    CosetMin {
        lower: lower.min(upper),
        upper,
        x,
        refinements: rounds,
        lower_from: "dual vector annihilating the coset direction",
    }
}

fn irls(p: f64, x0: &[C64], range: &[Vector], tol: f64) -> Result<CosetMin> {
    let n = x0.len();
    let d = range.len();
    let q = p / (p - 1.0);
    let wmat = DMatrix::from_fn(n, d, |i, j| range[j][i]);
    let x0v = DVector::from_column_slice(x0);
    let f = |x: &DVector<C64>| x.iter().map(|z| z.norm().powf(p)).sum::<f64>();
    let scale = x0.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut z = DVector::<C64>::zeros(d);
    let mut x = x0v.clone();
    let mut fx = f(&x);
    let mut eps = 1e-2 * scale;
    let mut best_lower: f64 = 0.0;
    for step in 0..IRLS_STEPS {
        let upper = lp_norm(x.as_slice(), p);
        // projected gradient as dual vector
        let mut y: Vec<C64> = x
            .iter()
            .map(|xi| {
                let r = xi.norm();
                if r == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    xi / r * r.powf(p - 1.0)
                }
            })
            .collect();
        for w in range {
            let c = hdot(w, &y);
            for (yi, wi) in y.iter_mut().zip(w) {
                *yi -= c * wi;
            }
        }
        let yn = lp_norm(&y, q);
        if yn > 0.0 {
            best_lower = best_lower.max(hdot(&y, x0).re / yn);
        }
        if upper - best_lower <= 0.5 * tol {
            return Ok(CosetMin {
                lower: best_lower.min(upper),
                upper,
                x: x.iter().copied().collect(),
                refinements: step,
                lower_from: "projected norm gradient",
            });
        }

        let omega: Vec<f64> = x
            .iter()
            .map(|xi| (xi.norm_sqr() + eps * eps).powf((p - 2.0) / 2.0))
            .collect();
        let wo = DMatrix::from_fn(n, d, |i, j| wmat[(i, j)] * omega[i]);
        let lhs = wmat.adjoint() * &wo;
        let rhs = -(wo.adjoint() * &x0v);
        let Some(z_new) = lhs.lu().solve(&rhs) else {
            eps *= 10.0;
            continue;
        };
        let mut s = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let zt = &z + (&z_new - &z) * C64::new(s, 0.0);
            let xt = &x0v + &wmat * &zt;
            let ft = f(&xt);
            if ft < fx {
                z = zt;
                x = xt;
                fx = ft;
                improved = true;
                break;
            }
            s *= 0.5;
        }
        if !improved || step % 4 == 3 {
            eps = (eps * 0.1).max(1e-15 * scale);
        }
    }
    let upper = lp_norm(x.as_slice(), p);
    Err(Error::stall(
        format!("ℓp reweighting left gap {:e}", upper - best_lower),
        None,
    ))
}
