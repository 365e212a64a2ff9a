//! Search for NP norms that exceed the supremum norm of their targets.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{np_norm_closed_form, np_norm_generic, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::problem::NormResult;

pub const WITNESS_TOLERANCE: f64 = 1e-9;
const MAX_SUBSET: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// 1-based coordinates.
    pub subset: Vec<usize>,
    pub targets: Vec<C64>,
    pub np_value: f64,
    pub sup_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NPInftyVerdict {
    pub is_np_infty: bool,
    pub witness: Option<Witness>,
    /// True on the full algebra, where the closed forms make the sign patterns
    /// and indicators exhaustive; false when the verdict rests on samples.
    pub exact: bool,
    pub problems_checked: usize,
}

/// All subsets of `0..n` of size `1..=k`, by size then lexicographically.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 1..=k.min(n) {
        extend(n, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn patterns(size: usize, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let one = C64::new(1.0, 0.0);
    let mut out: Vec<Vec<C64>> = (0..1usize << size)
        .map(|mask| (0..size).map(|i| if mask >> i & 1 == 1 { -one } else { one }).collect())
        .collect();
    for j in 0..size {
        out.push((0..size).map(|i| if i == j { one } else { C64::new(0.0, 0.0) }).collect());
    }
    for _ in 0..samples {
        out.push(
            (0..size)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
    }
    out
}

fn norm_of(alg: &FiniteAlgebra, subset: &[usize], targets: &[C64]) -> Result<Option<NormResult>> {
    let r = if alg.is_full() {
        np_norm_closed_form(alg, subset, targets)
    } else {
        np_norm_generic(alg, subset, targets, WITNESS_TOLERANCE)
    };
    match r {
        Ok(r) => Ok(Some(r)),
        Err(Error::InfeasibleCoset { .. }) => Ok(None),
        Err(Error::SolverStall { partial: Some(p), .. }) => Ok(Some(*p)),
        Err(e) => Err(e),
    }
}

/// Scans coordinate subsets of size up to `min(n, 4)` with sign patterns,
/// coordinate indicators and `sample_budget` random targets each; the first
/// tuple whose certified NP lower bound exceeds its sup norm by more than
/// `1e-9` is the witness.
pub fn np_infty_test(alg: &FiniteAlgebra, sample_budget: usize, seed: u64) -> Result<NPInftyVerdict> {
    let all = subsets(alg.dimension(), MAX_SUBSET);
    let per_subset: Vec<Result<(usize, Option<Witness>)>> = all
        .par_iter()
        .enumerate()
        .map(|(idx, subset)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
            let mut checked = 0;
            for targets in patterns(subset.len(), sample_budget, &mut rng) {
                let sup = targets.iter().map(|a| a.norm()).fold(0.0, f64::max);
                checked += 1;
                let Some(np) = norm_of(alg, subset, &targets)? else {
                    continue;
                };
                if np.lower > sup + WITNESS_TOLERANCE {
                    return Ok((
                        checked,
                        Some(Witness {
                            subset: subset.iter().map(|i| i + 1).collect(),
                            targets,
                            np_value: np.lower,
                            sup_value: sup,
                        }),
                    ));
                }
            }
            Ok((checked, None))
        })
        .collect();

    let mut problems_checked = 0;
    for r in per_subset {
        let (checked, witness) = r?;
        problems_checked += checked;
        if witness.is_some() {
            return Ok(NPInftyVerdict {
                is_np_infty: false,
                witness,
                exact: true,
                problems_checked,
            });
        }
    }
    Ok(NPInftyVerdict {
        is_np_infty: true,
        witness: None,
        exact: alg.is_full(),
        problems_checked,
    })
}

/// Recomputes a witness gap `np − sup`.
pub fn witness_gap(alg: &FiniteAlgebra, w: &Witness) -> Result<f64> {
    let subset: Vec<usize> = w.subset.iter().map(|i| i - 1).collect();
    let np = norm_of(alg, &subset, &w.targets)?.ok_or(Error::InfeasibleCoset { residual: f64::NAN })?;
    Ok(np.lower - w.sup_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        let s = subsets(3, 4);
        assert_eq!(s.len(), 7);
        assert_eq!(s[0], vec![0]);
        assert_eq!(s[3], vec![0, 1]);
        assert_eq!(s[6], vec![0, 1, 2]);
    }

    #[test]
    fn unit_sup_is_np_infty() {
        let alg = FiniteAlgebra::weighted_sup(vec![1.0; 3]).unwrap();
        let v = np_infty_test(&alg, 20, 3).unwrap();
        assert!(v.is_np_infty && v.witness.is_none() && v.exact);
    }

    #[test]
    fn l1_witness() {
        let alg = FiniteAlgebra::weighted_l1(vec![1.0; 2]).unwrap();
        let v = np_infty_test(&alg, 20, 3).unwrap();
        assert!(!v.is_np_infty);
        let w = v.witness.unwrap();
        assert_eq!(w.subset, vec![1, 2]);
        assert_eq!(w.targets, vec![C64::new(1.0, 0.0); 2]);
        assert_eq!((w.np_value, w.sup_value), (2.0, 1.0));
        assert!((witness_gap(&alg, &w).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn weighted_sup_witness() {
        let alg = FiniteAlgebra::weighted_sup(vec![2.0, 1.0]).unwrap();
        let w = np_infty_test(&alg, 20, 3).unwrap().witness.unwrap();
        assert_eq!(w.subset, vec![1]);
        assert_eq!(w.targets, vec![C64::new(1.0, 0.0)]);
        assert_eq!((w.np_value, w.sup_value), (2.0, 1.0));
    }
}
