//! Small dense complex linear algebra.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == self.get(j, i).conj()))
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    fn off_diagonal(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

pub const JACOBI_MAX_SWEEPS: usize = 100;
pub const JACOBI_REL_THRESHOLD: f64 = 1e-14;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations, in
/// ascending order. Only the upper triangle of `a` is read.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut m = CMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(a.get(i, i).re, 0.0)
        } else if i < j {
            a.get(i, j)
        } else {
            a.get(j, i).conj()
        }
    });
    let threshold = JACOBI_REL_THRESHOLD * m.frobenius();
    let mut sweeps = 0;
    while m.off_diagonal() > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigensolveFailure { sweeps });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, p, q);
            }
        }
        sweeps += 1;
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Annihilates entry `(p, q)` with the unitary `U = diag(1, e^{-iφ}) R(θ)`
/// acting on the `(p, q)` plane, replacing `m` by `U^H m U`.
fn rotate(m: &mut CMatrix, p: usize, q: usize) {
    let apq = m.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let phase = apq / g;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U columns: u_p = (c, -s e^{-iφ}) ... expressed on rows p, q.
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;
    let n = m.dim();
    for k in 0..n {
        let mkp = m.get(k, p);
        let mkq = m.get(k, q);
        m.set(k, p, mkp * upp + mkq * uqp);
        m.set(k, q, mkp * upq + mkq * uqq);
    }
    for k in 0..n {
        let mpk = m.get(p, k);
        let mqk = m.get(q, k);
        m.set(p, k, upp.conj() * mpk + uqp.conj() * mqk);
        m.set(q, k, upq.conj() * mpk + uqq.conj() * mqk);
    }
    m.set(p, q, C64::new(0.0, 0.0));
    m.set(q, p, C64::new(0.0, 0.0));
    m.set(p, p, C64::new(app - t * g, 0.0));
    m.set(q, q, C64::new(aqq + t * g, 0.0));
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_by_two_real() {
        let m = CMatrix::from_fn(2, |i, j| [[c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(1.25, 0.0)]][i][j]);
        let ev = hermitian_eigenvalues(&m).unwrap();
        let disc = (0.0625f64 + 4.0).sqrt();
        assert!((ev[0] - (2.25 - disc) / 2.0).abs() < 1e-15);
        assert!((ev[1] - (2.25 + disc) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn complex_off_diagonal() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = CMatrix::from_fn(2, |i, j| [[c(2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]][i][j]);
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    fn random_hermitian(n: usize, vals: &[f64]) -> CMatrix {
        let mut k = 0;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, c(vals[k], 0.0));
            k += 1;
            for j in i + 1..n {
                let z = c(vals[k], vals[k + 1]);
                k += 2;
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    proptest! {
        // Independent route: the real symmetric embedding [[Re, -Im], [Im, Re]]
        // solved by nalgebra has every eigenvalue doubled.
        #[test]
        fn matches_real_embedding(n in 1usize..7, seed in proptest::collection::vec(-2.0f64..2.0, 49)) {
            let m = random_hermitian(n, &seed);
            let ev = hermitian_eigenvalues(&m).unwrap();
            let big = DMatrix::from_fn(2 * n, 2 * n, |r, s| {
                let z = m.get(r % n, s % n);
                match (r < n, s < n) {
                    (true, true) | (false, false) => z.re,
                    (true, false) => -z.im,
                    (false, true) => z.im,
                }
            });
            let mut reference: Vec<f64> = big.symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            for (i, v) in ev.iter().enumerate() {
                prop_assert!((v - reference[2 * i]).abs() < 1e-10 * (1.0 + m.frobenius()));
            }
        }
    }
}
