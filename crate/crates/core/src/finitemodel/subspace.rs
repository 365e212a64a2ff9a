//! Subspaces of `Cⁿ` through the complex SVD: orthonormal spans, null
//! spaces and least-squares solutions.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub(crate) type Vector = Vec<C64>;

const RANK_REL_TOL: f64 = 1e-10;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub(crate) fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn rank_tol(sv: &[f64]) -> f64 {
    RANK_REL_TOL * sv.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// Orthonormal basis of `span(vectors)` in `Cⁿ`.
pub(crate) fn orthonormal_span(n: usize, vectors: &[Vector]) -> Vec<Vector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
    let svd = m.svd(true, false);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let tol = rank_tol(&sv);
    let u = svd.u.expect("left vectors requested");
    sv.iter()
        .enumerate()
        .filter(|(_, s)| **s > tol && **s > 0.0)
        .map(|(k, _)| (0..n).map(|i| u[(i, k)]).collect())
        .collect()
}

/// Orthonormal basis (Hermitian inner product) of `{v : Σ_j rows[i][j] v_j = 0 ∀i}`.
pub(crate) fn null_space(n: usize, rows: &[Vector]) -> Vec<Vector> {
    let m = rows.len().max(n);
    let a = DMatrix::from_fn(m, n, |i, j| if i < rows.len() { rows[i][j] } else { zero() });
    let svd = a.svd(false, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let tol = if rows.iter().all(|r| r.iter().all(|z| *z == zero())) {
        f64::INFINITY
    } else {
        rank_tol(&sv)
    };
    let vt = svd.v_t.expect("right vectors requested");
    sv.iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol)
        .map(|(k, _)| (0..n).map(|j| vt[(k, j)].conj()).collect())
        .collect()
}

/// Minimum-norm least-squares solution `y` of `Σ_j rows[i][j] y_j ≈ rhs_i`,
/// with its residual `‖A y − rhs‖`.
pub(crate) fn least_squares(cols: usize, rows: &[Vector], rhs: &[C64]) -> (Vector, f64) {
    let m = rows.len().max(cols);
    let a = DMatrix::from_fn(m, cols, |i, j| if i < rows.len() { rows[i][j] } else { zero() });
    let svd = a.clone().svd(true, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let tol = rank_tol(&sv);
    let u = svd.u.expect("left vectors requested");
    let vt = svd.v_t.expect("right vectors requested");
    let mut y = vec![zero(); cols];
    for (k, s) in sv.iter().enumerate() {
        if *s <= tol || *s == 0.0 {
            continue;
        }
        let coef: C64 = (0..rows.len()).map(|i| u[(i, k)].conj() * rhs[i]).sum::<C64>() / *s;
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += coef * vt[(k, j)].conj();
        }
    }
    let residual = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| (r.iter().zip(&y).map(|(x, yj)| x * yj).sum::<C64>() - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (y, residual)
}

/// `‖v − P v‖` for the orthogonal projector `P` onto the span of orthonormal `q`.
pub(crate) fn projection_residual(q: &[Vector], v: &[C64]) -> f64 {
    let mut r = v.to_vec();
    for col in q {
        let c = hdot(col, v);
        for (ri, qi) in r.iter_mut().zip(col) {
            *ri -= c * qi;
        }
    }
    norm2(&r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn span_and_null_space_are_complementary() {
        let v = vec![vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], vec![c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]];
        let q = orthonormal_span(3, &v);
        assert_eq!(q.len(), 1);
        let ns = null_space(3, &v);
        assert_eq!(ns.len(), 2);
        for z in &ns {
            for row in &v {
                let s: C64 = row.iter().zip(z).map(|(a, b)| a * b).sum();
                assert!(s.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn least_squares_solves_consistent_system() {
        let rows = vec![vec![c(1.0, 0.0), c(0.0, 1.0)]];
        let (y, res) = least_squares(2, &rows, &[c(2.0, 0.0)]);
        assert!(res < 1e-14);
        assert!((y[0] - c(1.0, 0.0)).norm() < 1e-14 && (y[1] - c(0.0, -1.0)).norm() < 1e-14);
        let rows = vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]];
        let (_, res) = least_squares(1, &rows, &[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!((res - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_rows_give_full_null_space() {
        assert_eq!(null_space(3, &[]).len(), 3);
    }
}
