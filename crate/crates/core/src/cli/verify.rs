//! Property suites behind `picknorm verify`. Every random item draws from
//! its own generator seeded by `(seed, item index)`, so results do not depend
//! on scheduling.

use std::f64::consts::TAU;

use clap::ValueEnum;
use num_complex::Complex64 as C64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::finitemodel::{np_infty_test, np_norm_closed_form, np_norm_generic, FiniteAlgebra, NormKind};
use crate::gleason::{self, DEFAULT_PART_SLACK, RANGE_SLACK};
use crate::hardy;
use crate::kernels::{self, KernelKind, TorusMeasure};
use crate::problem::{compute_np_norm, Backend, InterpolationProblem, NormResult, Site, BACKEND_NAMES};

pub const REMARK1_PER_BACKEND: usize = 1000;
pub const REMARK1_SLACK: f64 = 1e-7;
pub const MONOTONE_INSTANCES: usize = 1000;
pub const ORACLE_PER_KIND: usize = 500;
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Suite {
    Remark1,
    MonotoneFeasibility,
    OracleEquivalence,
    Kernels,
    Gleason,
    NpInfty,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Remark1,
        Suite::MonotoneFeasibility,
        Suite::OracleEquivalence,
        Suite::Kernels,
        Suite::Gleason,
        Suite::NpInfty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Remark1 => "remark1",
            Suite::MonotoneFeasibility => "monotone_feasibility",
            Suite::OracleEquivalence => "oracle_equivalence",
            Suite::Kernels => "kernels",
            Suite::Gleason => "gleason",
            Suite::NpInfty => "np_infty",
            Suite::All => "all",
        }
    }
}

/// Outcome of one property: `worst_slack` is the smallest margin by which
/// an instance satisfied it (negative for a violation).
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub property: String,
    pub checked: usize,
    pub violations: usize,
    pub worst_slack: f64,
    pub note: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }

    fn from_slacks(suite: &'static str, property: impl Into<String>, slacks: &[f64]) -> Self {
        PropertyResult {
            suite,
            property: property.into(),
            checked: slacks.len(),
            violations: slacks.iter().filter(|s| !(**s >= 0.0)).count(),
            worst_slack: slacks.iter().copied().fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NEG_INFINITY } else { a.min(b) }),
            note: None,
        }
    }

    fn check(suite: &'static str, property: impl Into<String>, ok: bool) -> Self {
        Self::from_slacks(suite, property, &[if ok { 0.0 } else { -1.0 }])
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "{:<44} {}  checked={} violations={} worst_slack={:.3e}",
            format!("{}/{}", self.suite, self.property),
            if self.passed() { "PASS" } else { "FAIL" },
            self.checked,
            self.violations,
            self.worst_slack
        );
        if let Some(n) = &self.note {
            s.push_str("  ");
            s.push_str(n);
        }
        s
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<PropertyResult> {
    match suite {
        Suite::Remark1 => remark1(seed),
        Suite::MonotoneFeasibility => vec![monotone_feasibility(seed)],
        Suite::OracleEquivalence => oracle_equivalence(seed),
        Suite::Kernels => kernel_suite(seed),
        Suite::Gleason => gleason_suite(seed),
        Suite::NpInfty => np_infty_suite(seed),
        Suite::All => Suite::EACH.iter().flat_map(|s| run_suite(*s, seed)).collect(),
    }
}

pub fn render(results: &[PropertyResult]) -> String {
    let mut out: String = results.iter().map(|r| r.line() + "\n").collect();
    let failed = results.iter().filter(|r| !r.passed()).count();
    out.push_str(&format!(
        "summary: {} properties, {} failed: {}\n",
        results.len(),
        failed,
        if failed == 0 { "PASS" } else { "FAIL" }
    ));
    out
}

fn rng_for(seed: u64, stream: u64, item: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.set_word_pos((item as u128) << 20);
    r
}

fn complex_in(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>())
}

fn targets(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_in(rng, 1.5)).collect()
}

fn distinct_disc(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<C64> {
    let mut pts: Vec<C64> = Vec::with_capacity(n);
    while pts.len() < n {
        let z = complex_in(rng, radius);
        if pts.iter().all(|p| (p - z).norm() > 1e-3) {
            pts.push(z);
        }
    }
    pts
}

/// Weighted algebra on `Cᵈ`, half the time restricted to the block
/// subalgebra of a random coordinate partition; returns a problem whose
/// targets come from an element of the algebra.
fn finite_problem(rng: &mut ChaCha8Rng, kind: NormKind) -> InterpolationProblem {
    let dim = rng.random_range(1..=6usize);
    let weights = match kind {
        NormKind::Lp(_) => vec![1.0; dim],
        _ => (0..dim).map(|_| rng.random_range(1.0..3.0)).collect(),
    };
    let blocks: Option<Vec<usize>> = rng.random_bool(0.5).then(|| (0..dim).map(|_| rng.random_range(0..dim)).collect());
    let x: Vec<C64> = match &blocks {
        Some(b) => {
            let vals: Vec<C64> = (0..dim).map(|_| complex_in(rng, 1.5)).collect();
            b.iter().map(|k| vals[*k]).collect()
        }
        None => targets(rng, dim),
    };
    let basis = blocks.map(|b| {
        let mut labels: Vec<usize> = b.clone();
        labels.sort_unstable();
        labels.dedup();
        labels
            .iter()
            .map(|l| b.iter().map(|k| C64::new(if k == l { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect()
    });
    let alg = FiniteAlgebra::new(kind, weights, basis).expect("block algebras are valid");
    let size = rng.random_range(1..=dim);
    let subset = sample(rng, dim, size).into_vec();
    InterpolationProblem::new(
        Backend::Finite(alg),
        subset.iter().map(|i| Site::CoordinateIndex(i + 1)).collect(),
        subset.iter().map(|i| x[*i]).collect(),
    )
}

fn random_problem(rng: &mut ChaCha8Rng, backend: &str) -> InterpolationProblem {
    let (b, sites): (Backend, Vec<Site>) = match backend {
        "hardy" => {
            let n = rng.random_range(1..=5);
            (Backend::Hardy, distinct_disc(rng, n, 0.95).into_iter().map(Site::DiscPoint).collect())
        }
        "analytic_wiener" => {
            let n = rng.random_range(1..=4);
            (Backend::AnalyticWiener, distinct_disc(rng, n, 0.9).into_iter().map(Site::DiscPoint).collect())
        }
        "wiener" => {
            let n = rng.random_range(1..=4usize);
            let q = rng.random_range(n..=12);
            let nums = sample(rng, q, n).into_vec();
            (
                Backend::Wiener,
                nums.iter().map(|p| Site::CircleAngle(TAU * *p as f64 / q as f64)).collect(),
            )
        }
        "l1_torus" => {
            let n = rng.random_range(1..=4usize);
            let ks = sample(rng, 13, n).into_vec();
            (Backend::L1Torus, ks.iter().map(|k| Site::IntegerCharacter(*k as i64 - 6)).collect())
        }
        "finite_sup" => return finite_problem(rng, NormKind::WeightedSup),
        "finite_l1" => return finite_problem(rng, NormKind::WeightedL1),
        "finite_lp" => {
            let p = rng.random_range(1.2..4.0);
            return finite_problem(rng, NormKind::Lp(p));
        }
        other => unreachable!("unknown backend {other}"),
    };
    let n = sites.len();
    InterpolationProblem::new(b, sites, targets(rng, n))
}

fn bracket(p: &InterpolationProblem) -> Result<(NormResult, bool), Error> {
    match compute_np_norm(p) {
        Ok(r) => Ok((r, false)),
        Err(Error::SolverStall { partial: Some(r), .. }) => Ok((*r, true)),
        Err(e) => Err(e),
    }
}

fn remark1(seed: u64) -> Vec<PropertyResult> {
    BACKEND_NAMES
        .iter()
        .enumerate()
        .map(|(bi, name)| {
            let outcomes: Vec<(f64, bool, Option<String>)> = (0..REMARK1_PER_BACKEND)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(seed, 1 + bi as u64, i);
                    let p = random_problem(&mut rng, name).with_tolerance(1e-6);
                    let floor = p.targets.iter().map(|a| a.norm()).fold(0.0, f64::max);
                    match bracket(&p) {
                        Ok((r, stalled)) => (r.lower - (floor - REMARK1_SLACK), stalled, None),
                        Err(e) => (f64::NEG_INFINITY, false, Some(format!("item {i}: {e}"))),
                    }
                })
                .collect();
            let slacks: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
            let stalls = outcomes.iter().filter(|o| o.1).count();
            let r = PropertyResult::from_slacks("remark1", format!("floor/{name}"), &slacks);
            let mut notes = Vec::new();
            if stalls > 0 {
                notes.push(format!("stalled_partials={stalls}"));
            }
            if let Some(e) = outcomes.iter().find_map(|o| o.2.clone()) {
                notes.push(format!("first_error=\"{e}\""));
            }
            if notes.is_empty() {
                r
            } else {
                r.with_note(notes.join(" "))
            }
        })
        .collect()
}

fn monotone_feasibility(seed: u64) -> PropertyResult {
    let slacks: Vec<Option<f64>> = (0..MONOTONE_INSTANCES)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 10, i);
            let n = rng.random_range(1..=6);
            let lambdas = distinct_disc(&mut rng, n, 0.95);
            let zs = targets(&mut rng, n);
            let floor = zs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(0.05);
            let t = floor * rng.random_range(0.3..3.0);
            let at_t = hardy::is_feasible(&lambdas, &zs, t, None).ok()?;
            if !at_t.feasible {
                return Some(f64::INFINITY);
            }
            let at_2t = hardy::is_feasible(&lambdas, &zs, 2.0 * t, None).ok()?;
            Some(at_2t.min_eigenvalue + at_2t.psd_slack)
        })
        .collect();
    let slacks: Vec<f64> = slacks.into_iter().map(|s| s.unwrap_or(f64::NEG_INFINITY)).collect();
    let implied = slacks.iter().filter(|s| s.is_finite()).count();
    PropertyResult::from_slacks("monotone_feasibility", "feasible_at_t_implies_2t", &slacks)
        .with_note(format!("feasible_at_t={implied}"))
}

fn oracle_equivalence(seed: u64) -> Vec<PropertyResult> {
    let kinds: [(&str, fn(&mut ChaCha8Rng) -> NormKind); 3] = [
        ("weighted_sup", |_| NormKind::WeightedSup),
        ("weighted_l1", |_| NormKind::WeightedL1),
        ("lp", |r| NormKind::Lp(r.random_range(1.0..4.0))),
    ];
    kinds
        .iter()
        .enumerate()
        .map(|(ki, (name, kind))| {
            let slacks: Vec<f64> = (0..ORACLE_PER_KIND)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(seed, 20 + ki as u64, i);
                    let k = kind(&mut rng);
                    let dim = rng.random_range(1..=6usize);
                    let weights = match k {
                        NormKind::Lp(_) => vec![1.0; dim],
                        _ => (0..dim).map(|_| rng.random_range(1.0..3.0)).collect(),
                    };
                    let alg = FiniteAlgebra::new(k, weights, None).expect("valid weights");
                    let size = rng.random_range(1..=dim);
                    let subset = sample(&mut rng, dim, size).into_vec();
                    let a = targets(&mut rng, size);
                    let exact = np_norm_closed_form(&alg, &subset, &a).map(|r| r.upper);
                    let generic = match np_norm_generic(&alg, &subset, &a, 1e-10) {
                        Err(Error::SolverStall { partial: Some(r), .. }) => Ok(*r),
                        other => other,
                    };
                    match (exact, generic) {
                        (Ok(v), Ok(g)) => ORACLE_TOLERANCE - (g.lower - v).abs().max((g.upper - v).abs()),
                        _ => f64::NEG_INFINITY,
                    }
                })
                .collect();
            PropertyResult::from_slacks("oracle_equivalence", format!("generic_vs_closed_form/{name}"), &slacks)
        })
        .collect()
}

fn kernel_suite(seed: u64) -> Vec<PropertyResult> {
    const S: &str = "kernels";
    let mut out = Vec::new();

    let exact: Vec<f64> = (1..=64usize)
        .map(|l| {
            let v = kernels::kernel_coeffs(KernelKind::Dlvp, l).expect("order >= 1");
            let low = (-(l as i64)..=l as i64).all(|k| v.coeff(k).to_bits() == 1.0f64.to_bits());
            let support = (2 * l as i64..=4 * l as i64).all(|k| v.coeff(k) == 0.0 && v.coeff(-k) == 0.0);
            if low && support {
                0.0
            } else {
                -1.0
            }
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "dlvp_low_band_bit_exact", &exact));

    let repro: Vec<f64> = (1..=64usize)
        .into_par_iter()
        .map(|l| {
            let mut rng = rng_for(seed, 30, l);
            let degree = rng.random_range(0..=l);
            let coeffs: Vec<C64> = (0..=2 * degree).map(|_| complex_in(&mut rng, 1.0)).collect();
            let grid = (16 * l).next_power_of_two();
            let mu = TorusMeasure::from_density_fn(grid, |t| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * C64::from_polar(1.0, (j as f64 - degree as f64) * t))
                    .sum()
            });
            let v = kernels::kernel_coeffs(KernelKind::Dlvp, l).expect("order >= 1");
            match kernels::convolve(&mu, &v, grid) {
                Ok(f) => {
                    let err = f
                        .samples
                        .iter()
                        .zip(mu.density.as_ref().expect("density"))
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    1e-10 - err
                }
                Err(_) => f64::NEG_INFINITY,
            }
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "dlvp_reproduces_polynomials", &repro));

    let fejer: Vec<f64> = (1..=32usize)
        .into_par_iter()
        .map(|n| {
            let k = kernels::kernel_coeffs(KernelKind::Fejer, n).expect("order >= 1");
            let min = k.samples(16 * n).map_or(f64::NEG_INFINITY, |s| s.iter().copied().fold(f64::INFINITY, f64::min));
            let norm = kernels::kernel_l1_norm(&k, 64 * n).unwrap_or(f64::INFINITY);
            (min + 1e-12).min(1e-10 - (norm - 1.0).abs())
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "fejer_positive_unit_mass", &fejer));

    let dlvp_mass: Vec<f64> = [1usize, 2, 4, 8, 16, 32, 64]
        .par_iter()
        .map(|l| {
            let v = kernels::kernel_coeffs(KernelKind::Dlvp, *l).expect("order >= 1");
            kernels::kernel_l1_norm(&v, 64 * l).map_or(f64::NEG_INFINITY, |m| m - 1.0)
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "dlvp_l1_norm_at_least_one", &dlvp_mass));

    let grid = 8192;
    let mu = TorusMeasure::from_density_fn(grid, |t| C64::new(t.cos().max(0.0), 0.0));
    let base = mu.density.clone().expect("density");
    let errs: Vec<f64> = [16usize, 32, 64, 128, 256]
        .par_iter()
        .map(|l| {
            let v = kernels::kernel_coeffs(KernelKind::Dlvp, *l).expect("order >= 1");
            kernels::convolve(&mu, &v, grid).map_or(f64::INFINITY, |f| {
                f.samples.iter().zip(&base).map(|(a, b)| (a - b).norm()).sum::<f64>() / grid as f64
            })
        })
        .collect();
    let mut smooth: Vec<f64> = errs.windows(2).map(|w| w[0] - w[1]).collect();
    smooth.push(0.01 - errs[errs.len() - 1]);
    out.push(
        PropertyResult::from_slacks(S, "smoothing_converges", &smooth)
            .with_note(format!("err_at_256={:.3e}", errs[errs.len() - 1])),
    );
    out
}

fn hardy_oracle(l: C64, m: C64) -> f64 {
    let rho = ((l - m) / (C64::new(1.0, 0.0) - m.conj() * l)).norm();
    2.0 * (1.0 - (1.0 - rho * rho).sqrt()) / rho
}

fn gleason_suite(seed: u64) -> Vec<PropertyResult> {
    const S: &str = "gleason";
    let mut out = Vec::new();
    let c = |x: f64| C64::new(x, 0.0);

    let finite: Vec<f64> = [
        (FiniteAlgebra::weighted_l1(vec![1.0, 1.0]), 1.0),
        (FiniteAlgebra::weighted_sup(vec![1.0, 1.0]), 2.0),
        (FiniteAlgebra::weighted_sup(vec![2.0, 1.0]), 1.5),
    ]
    .into_iter()
    .map(|(alg, want)| {
        alg.and_then(|a| gleason::gleason_distance_finite(&a, 0, 1))
            .map_or(f64::NEG_INFINITY, |d| 1e-8 - (d.lower - want).abs().max((d.upper - want).abs()))
    })
    .collect();
    out.push(PropertyResult::from_slacks(S, "finite_exact_values", &finite));

    let exact = 4.0 - 2.0 * 3f64.sqrt();
    let hardy = gleason::gleason_distance_hardy(c(0.0), c(0.5), 1e-6)
        .map_or(f64::NEG_INFINITY, |d| (1e-4 - (d.lower - exact).abs()).min(d.upper - exact + 1e-12));
    out.push(PropertyResult::from_slacks(S, "hardy_exact_value", &[hardy]));

    let seq: Vec<f64> = [0.3, 0.5, 0.7, 0.9, 0.99]
        .iter()
        .map(|r| gleason::gleason_distance_hardy(c(0.0), c(*r), 1e-6).map_or(f64::NAN, |d| d.lower))
        .collect();
    let mut mono: Vec<f64> = seq.windows(2).map(|w| w[1] - w[0]).collect();
    mono.push(2.0 - seq[seq.len() - 1]);
    out.push(PropertyResult::from_slacks(S, "hardy_monotone_toward_two", &mono));

    let formula: Vec<f64> = (0..64usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 40, i);
            let pts = distinct_disc(&mut rng, 2, 0.9);
            let want = hardy_oracle(pts[0], pts[1]);
            gleason::gleason_distance_hardy(pts[0], pts[1], 1e-6).map_or(f64::NEG_INFINITY, |d| {
                (want - d.lower + 1e-12).min(d.upper - want + 1e-12).min(1e-6 - (want - d.lower))
            })
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "hardy_matches_extremal_formula", &formula));

    let reports: Vec<f64> = (0..16usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 41, i);
            let n = rng.random_range(2..=4);
            let (backend, sites): (Backend, Vec<Site>) = if i % 2 == 0 {
                (Backend::Hardy, distinct_disc(&mut rng, n, 0.9).into_iter().map(Site::DiscPoint).collect())
            } else {
                let w: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
                (
                    Backend::Finite(FiniteAlgebra::weighted_l1(w).expect("weights >= 1")),
                    (1..=n).map(Site::CoordinateIndex).collect(),
                )
            };
            gleason::part_partition(&backend, &sites, DEFAULT_PART_SLACK, 1e-6).map_or(f64::NEG_INFINITY, |r| {
                let mut slack = f64::INFINITY;
                for i in 0..n {
                    for j in 0..n {
                        let d = r.distances[i][j];
                        if d != r.distances[j][i] {
                            return -1.0;
                        }
                        slack = slack.min(d.lower).min(2.0 + RANGE_SLACK - d.upper).min(d.upper - d.lower);
                    }
                }
                slack
            })
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "symmetric_and_in_range", &reports));

    let sites3: Vec<Site> = (1..=3).map(Site::CoordinateIndex).collect();
    let sup = Backend::Finite(FiniteAlgebra::weighted_sup(vec![1.0; 3]).expect("unit weights"));
    let t4_sup = gleason::theorem4_check(&sup, &sites3, 1e-9).is_ok_and(|r| {
        r.passes
            && r.all_parts_trivial_claimed
            && r.pairs.iter().all(|p| (p.np_upper - 1.0).abs() <= 1e-12 && p.distance_lower == Some(2.0))
    });
    out.push(PropertyResult::check(S, "theorem4_unit_sup_all_trivial", t4_sup));

    let witness_backends: Vec<(Backend, Vec<Site>)> = vec![
        (
            Backend::Finite(FiniteAlgebra::weighted_l1(vec![1.0, 1.0]).expect("unit weights")),
            sites3[..2].to_vec(),
        ),
        (
            Backend::Finite(FiniteAlgebra::weighted_sup(vec![2.0, 1.0]).expect("weights >= 1")),
            sites3[..2].to_vec(),
        ),
        (Backend::Hardy, vec![Site::DiscPoint(c(0.0)), Site::DiscPoint(c(0.5))]),
    ];
    let t4_w: Vec<f64> = witness_backends
        .iter()
        .map(|(b, s)| {
            let ok = gleason::theorem4_check(b, s, 1e-9).is_ok_and(|r| r.passes && !r.all_parts_trivial_claimed);
            if ok {
                0.0
            } else {
                -1.0
            }
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "theorem4_no_claim_with_witness", &t4_w));

    let algs = [
        FiniteAlgebra::weighted_sup(vec![2.0, 1.0, 1.5]),
        FiniteAlgebra::weighted_l1(vec![1.0, 3.0, 1.0]),
        FiniteAlgebra::lp(3, 3.0),
    ];
    let duality: Vec<f64> = algs
        .iter()
        .enumerate()
        .flat_map(|(ai, alg)| {
            let alg = alg.as_ref().expect("valid algebra");
            let d = gleason::gleason_distance_finite(alg, 0, 1);
            (0..100usize)
                .map(|i| {
                    let mut rng = rng_for(seed, 42 + ai as u64, i);
                    let a = vec![complex_in(&mut rng, 1.0), complex_in(&mut rng, 1.0)];
                    match (&d, np_norm_closed_form(alg, &[0, 1], &a)) {
                        (Ok(d), Ok(np)) => d.upper + 1e-8 - (a[0] - a[1]).norm() / np.upper,
                        _ => f64::NEG_INFINITY,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "finite_duality", &duality));
    out
}

fn np_infty_suite(seed: u64) -> Vec<PropertyResult> {
    const S: &str = "np_infty";
    let mut out = Vec::new();
    let one = C64::new(1.0, 0.0);
    let witness_case = |alg: FiniteAlgebra, subset: Vec<usize>, targets: Vec<C64>, gap: (f64, f64)| {
        let a = np_infty_test(&alg, 20, seed);
        let b = np_infty_test(&alg, 20, seed);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                a == b
                    && a.witness.as_ref().is_some_and(|w| {
                        w.subset == subset && w.targets == targets && (w.np_value, w.sup_value) == gap
                    })
            }
            _ => false,
        }
    };
    out.push(PropertyResult::check(
        S,
        "l1_witness_reproduces",
        witness_case(FiniteAlgebra::weighted_l1(vec![1.0, 1.0]).expect("unit weights"), vec![1, 2], vec![one, one], (2.0, 1.0)),
    ));
    out.push(PropertyResult::check(
        S,
        "weighted_sup_witness_reproduces",
        witness_case(FiniteAlgebra::weighted_sup(vec![2.0, 1.0]).expect("weights >= 1"), vec![1], vec![one], (2.0, 1.0)),
    ));

    let random: Vec<f64> = (0..24usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 50, i);
            let dim = rng.random_range(1..=4usize);
            let unit = i % 2 == 0;
            let weights: Vec<f64> = if unit {
                vec![1.0; dim]
            } else {
                let mut w = vec![1.0; dim];
                w[rng.random_range(0..dim)] = rng.random_range(1.5..3.0);
                w
            };
            let alg = FiniteAlgebra::weighted_sup(weights).expect("weights >= 1");
            match np_infty_test(&alg, 8, seed) {
                Ok(v) if v.is_np_infty == unit && v.exact => 0.0,
                _ => -1.0,
            }
        })
        .collect();
    out.push(PropertyResult::from_slacks(S, "weighted_sup_classification", &random));
    out
}
