//! `H^∞(D)`: the Pick matrix, its positive-semidefiniteness test, and the
//! Nevanlinna-Pick norm as the least feasible level.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::problem::{Certificate, NormResult};

/// Doubling may grow the upper bracket to at most `2^60` times its start.
const MAX_DOUBLINGS: u32 = 60;

/// The Hermitian matrix `[(1 - t^-2 conj(z_j) z_i) / (1 - conj(λ_j) λ_i)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PickMatrix {
    pub entries: CMatrix,
    pub level: f64,
    pub lambdas: Vec<C64>,
    pub zs: Vec<C64>,
}

impl PickMatrix {
    pub fn default_psd_slack(&self) -> f64 {
        1e-12 * self.entries.frobenius().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub min_eigenvalue: f64,
    pub psd_slack: f64,
}

fn check_points(lambdas: &[C64], zs: &[C64]) -> Result<()> {
    if lambdas.len() != zs.len() {
        return Err(Error::LengthMismatch {
            sites: lambdas.len(),
            targets: zs.len(),
        });
    }
    for (i, l) in lambdas.iter().enumerate() {
        if !(l.norm() < 1.0) {
            return Err(Error::domain(i, format!("|λ| = {} must be < 1", l.norm())));
        }
        if let Some(first) = lambdas[..i].iter().position(|m| m == l) {
            return Err(Error::DuplicateSite { first, index: i });
        }
    }
    Ok(())
}

pub fn build_pick_matrix(lambdas: &[C64], zs: &[C64], t: f64) -> Result<PickMatrix> {
    check_points(lambdas, zs)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonpositiveLevel(t));
    }
    let n = lambdas.len();
    let inv_t2 = 1.0 / (t * t);
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let num = C64::new(1.0, 0.0) - zs[j].conj() * zs[i] * inv_t2;
            let den = C64::new(1.0, 0.0) - lambdas[j].conj() * lambdas[i];
            let v = num / den;
            if i == j {
                m.set(i, i, C64::new(v.re, 0.0));
            } else {
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
    }
    Ok(PickMatrix {
        entries: m,
        level: t,
        lambdas: lambdas.to_vec(),
        zs: zs.to_vec(),
    })
}

/// Tests positive semidefiniteness of the Pick matrix at level `t`.
/// `psd_slack = None` selects `1e-12 · max(1, ‖P‖_F)`.
pub fn is_feasible(
    lambdas: &[C64],
    zs: &[C64],
    t: f64,
    psd_slack: Option<f64>,
) -> Result<FeasibilityVerdict> {
    let pick = build_pick_matrix(lambdas, zs, t)?;
    let slack = psd_slack.unwrap_or_else(|| pick.default_psd_slack());
    let min_eigenvalue = hermitian_eigenvalues(&pick.entries)?[0];
    Ok(FeasibilityVerdict {
        feasible: min_eigenvalue >= -slack,
        min_eigenvalue,
        psd_slack: slack,
    })
}

/// Bisection on the level `t` between the sup-norm floor and a doubled
/// feasible level, until the bracket is at most `tolerance` wide.
pub fn np_norm_hardy(lambdas: &[C64], zs: &[C64], tolerance: f64) -> Result<NormResult> {
    check_points(lambdas, zs)?;
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::NonpositiveTolerance(tolerance));
    }
    if lambdas.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let floor = zs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if floor == 0.0 {
        return Ok(NormResult::zero());
    }
    let probe = |t: f64| is_feasible(lambdas, zs, t, None);

    let at_floor = probe(floor)?;
    if at_floor.feasible {
        return Ok(NormResult {
            lower: floor,
            upper: floor,
            certificate: Certificate::Pick {
                min_eigenvalue_at_upper: at_floor.min_eigenvalue,
                min_eigenvalue_below_lower: None,
                psd_slack: at_floor.psd_slack,
            },
            iterations: 1,
        });
    }

    let mut iterations = 1;
    let mut lo = floor;
    let mut lo_eig = at_floor.min_eigenvalue;
    let start = floor.max(tolerance);
    let mut hi = start;
    let mut doublings = 0;
    let mut hi_verdict = loop {
        if hi > floor {
            let v = probe(hi)?;
            iterations += 1;
            if v.feasible {
                break v;
            }
            lo = hi;
            lo_eig = v.min_eigenvalue;
        }
        if doublings == MAX_DOUBLINGS {
            return Err(Error::BracketFailure {
                limit: start * 2f64.powi(MAX_DOUBLINGS as i32),
            });
        }
        hi *= 2.0;
        doublings += 1;
    };

    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = probe(mid)?;
        iterations += 1;
        if v.feasible {
            hi = mid;
            hi_verdict = v;
        } else {
            lo = mid;
            lo_eig = v.min_eigenvalue;
        }
    }

    Ok(NormResult {
        lower: lo,
        upper: hi,
        certificate: Certificate::Pick {
            min_eigenvalue_at_upper: hi_verdict.min_eigenvalue,
            min_eigenvalue_below_lower: Some(lo_eig),
            psd_slack: hi_verdict.psd_slack,
        },
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|x| C64::new(*x, 0.0)).collect()
    }

    #[test]
    fn pick_matrix_hand_values() {
        let p = build_pick_matrix(&r(&[0.0]), &r(&[0.5]), 1.0).unwrap();
        assert_eq!(p.entries.get(0, 0), C64::new(0.75, 0.0));

        let p = build_pick_matrix(&r(&[0.0, 0.5]), &r(&[0.0, 0.25]), 1.0).unwrap();
        let expect = [[1.0, 1.0], [1.0, 1.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.entries.get(i, j) - C64::new(expect[i][j], 0.0)).norm() < 1e-15);
            }
        }

        let p = build_pick_matrix(&r(&[0.5]), &r(&[0.0]), 1.0).unwrap();
        assert!((p.entries.get(0, 0).re - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pick_matrix_errors() {
        assert!(matches!(
            build_pick_matrix(&r(&[1.0]), &r(&[0.5]), 1.0),
            Err(Error::DomainViolation { .. })
        ));
        assert_eq!(
            build_pick_matrix(&r(&[0.1]), &r(&[0.5]), 0.0),
            Err(Error::NonpositiveLevel(0.0))
        );
        assert_eq!(
            build_pick_matrix(&r(&[0.1]), &r(&[0.5]), -2.0),
            Err(Error::NonpositiveLevel(-2.0))
        );
    }

    #[test]
    fn feasibility_examples() {
        let v = is_feasible(&r(&[0.0, 0.5]), &r(&[0.0, 0.25]), 1.0, None).unwrap();
        assert!(v.feasible);
        let expected = (2.25 - (0.0625f64 + 4.0).sqrt()) / 2.0;
        assert!((v.min_eigenvalue - expected).abs() < 1e-14);

        let v = is_feasible(&r(&[0.0, 0.5]), &r(&[0.0, 0.25]), 0.4, None).unwrap();
        assert!(!v.feasible);

        let v = is_feasible(&r(&[0.3]), &r(&[0.7]), 0.7, None).unwrap();
        assert!(v.feasible);
        assert!(v.min_eigenvalue.abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        let res = np_norm_hardy(&r(&[0.3]), &r(&[0.7]), 1e-9).unwrap();
        assert_eq!((res.lower, res.upper), (0.7, 0.7));

        let res = np_norm_hardy(&r(&[0.0, 0.5]), &r(&[0.0, 0.25]), 1e-9).unwrap();
        assert!(res.upper - res.lower <= 1e-9);
        assert!((res.lower - 0.5).abs() <= 1e-9 && (res.upper - 0.5).abs() <= 1e-9);

        let res = np_norm_hardy(&r(&[0.0, 0.5]), &r(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!((res.lower, res.upper), (0.0, 0.0));
    }

    #[test]
    fn bracket_endpoints_are_certified() {
        let lambdas = vec![C64::new(0.1, 0.2), C64::new(-0.4, 0.3), C64::new(0.6, -0.1)];
        let zs = vec![C64::new(0.2, 0.1), C64::new(-0.5, 0.0), C64::new(0.3, 0.4)];
        let res = np_norm_hardy(&lambdas, &zs, 1e-9).unwrap();
        assert!(is_feasible(&lambdas, &zs, res.upper, None).unwrap().feasible);
        assert!(!is_feasible(&lambdas, &zs, res.lower, None).unwrap().feasible);
        assert!(res.gap() <= 1e-9);
    }

    fn disc_point() -> impl Strategy<Value = C64> {
        (0.0f64..0.9, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| C64::from_polar(r, a))
    }

    proptest! {
        #[test]
        fn hermitian_by_construction(
            ls in proptest::collection::vec(disc_point(), 1..6),
            zs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
            t in 0.1f64..3.0,
        ) {
            let zs: Vec<C64> = zs.iter().take(ls.len()).map(|(a, b)| C64::new(*a, *b)).collect();
            prop_assume!(ls.iter().enumerate().all(|(i, l)| !ls[..i].contains(l)));
            let p = build_pick_matrix(&ls, &zs, t).unwrap();
            prop_assert!(p.entries.is_hermitian());
        }

        #[test]
        fn single_site_norm_is_modulus(l in disc_point(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let z = C64::new(re, im);
            let res = np_norm_hardy(&[l], &[z], 1e-9).unwrap();
            prop_assert!((res.lower - z.norm()).abs() <= 1e-9);
            prop_assert!((res.upper - z.norm()).abs() <= 1e-9);
        }

        #[test]
        fn unimodular_rotation_leaves_norm_unchanged(
            ls in proptest::collection::vec(disc_point(), 2..5),
            zs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
            angle in 0.0f64..std::f64::consts::TAU,
        ) {
            prop_assume!(ls.iter().enumerate().all(|(i, l)| !ls[..i].contains(l)));
            let zs: Vec<C64> = zs.iter().take(ls.len()).map(|(a, b)| C64::new(*a, *b)).collect();
            let u = C64::from_polar(1.0, angle);
            let rotated: Vec<C64> = zs.iter().map(|z| z * u).collect();
            let a = np_norm_hardy(&ls, &zs, 1e-9).unwrap();
            let b = np_norm_hardy(&ls, &rotated, 1e-9).unwrap();
            prop_assert!((a.midpoint() - b.midpoint()).abs() <= 2e-9);
        }
    }
}
