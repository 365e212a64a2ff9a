//! Gleason parts: distances `‖φ − ψ‖` between characters in the dual of the
//! algebra, the part partition, and the trivial-part check that runs the
//! interpolation argument `‖φ − ψ‖ ≥ |φ(x) − ψ(x)| / ‖x‖` with targets
//! `(1, −1)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finitemodel::{minimize_coset, np_infty_test, null_space, FiniteAlgebra, Witness};
use crate::hardy;
use crate::problem::{compute_np_norm, validate_problem, Backend, InterpolationProblem, NormResult, Site};
use crate::seqalg::{analytic_certified_sup, detect_period, MAX_DEGREE};

pub const DEFAULT_PART_SLACK: f64 = 1e-6;
pub const DEFAULT_DISTANCE_TOLERANCE: f64 = 1e-6;
/// Characters have norm 1, so no distance exceeds 2 by more than this.
pub const RANGE_SLACK: f64 = 1e-9;

const GRID: usize = 64;
const SEARCH_STEPS: usize = 200;
const SCAN_CAP: u64 = 2 * MAX_DEGREE;
const NP_INFTY_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Identical,
    /// Minimum dual norm over the functional plus the annihilator.
    DualNorm,
    /// Möbius search below, two-point Pick test above.
    MobiusSearch,
    /// Supremum of `|χ(φ) − χ(ψ)|` over the generating characters.
    CharacterScan,
}

/// Certified interval for `‖φ − ψ‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub lower: f64,
    pub upper: f64,
    pub method: DistanceMethod,
    /// The search did not close the interval to the requested tolerance.
    pub flagged: bool,
}

impl Distance {
    fn exact(value: f64, method: DistanceMethod) -> Self {
        Distance {
            lower: value,
            upper: value,
            method,
            flagged: false,
        }
    }
}

/// `sup{|x_i − x_j| : ‖x‖ ≤ 1}` on a finite model (0-based coordinates).
pub fn gleason_distance_finite(alg: &FiniteAlgebra, i: usize, j: usize) -> Result<Distance> {
    let n = alg.dimension();
    for (idx, k) in [i, j].into_iter().enumerate() {
        if k >= n {
            return Err(Error::domain(idx, format!("coordinate index {} outside 1..={n}", k + 1)));
        }
    }
    if i == j {
        return Err(Error::DuplicateSite { first: 0, index: 1 });
    }
    let mut f = vec![C64::new(0.0, 0.0); n];
    f[i] = C64::new(1.0, 0.0);
    f[j] = C64::new(-1.0, 0.0);
    let annihilator = match alg.basis().filter(|_| !alg.is_full()) {
        Some(basis) => null_space(n, basis),
        None => Vec::new(),
    };
    let m = minimize_coset(&alg.spec().dual(), &f, &annihilator, 1e-10)?;
    Ok(Distance {
        lower: m.lower,
        upper: m.upper,
        method: DistanceMethod::DualNorm,
        flagged: false,
    })
}

fn mobius(c: C64, z: C64) -> C64 {
    (z - c) / (C64::new(1.0, 0.0) - c.conj() * z)
}

/// Distance between point evaluations on `H^∞`. Every disc automorphism
/// `f_c` gives the lower bound `|f_c(λ₁) − f_c(λ₂)|`; `c` is scanned on a
/// polar grid and refined by a shrinking compass search. The bound
/// `U = lower + tolerance` is certified when the targets `(U/2, −U/2)` fail
/// the Pick test at level 1, since among target pairs of a given
/// pseudohyperbolic separation the symmetric one has the largest gap.
pub fn gleason_distance_hardy(lambda1: C64, lambda2: C64, tolerance: f64) -> Result<Distance> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::NonpositiveTolerance(tolerance));
    }
    for (idx, l) in [lambda1, lambda2].into_iter().enumerate() {
        if !(l.norm() < 1.0) {
            return Err(Error::domain(idx, format!("|λ| = {} must be < 1", l.norm())));
        }
    }
    if lambda1 == lambda2 {
        return Err(Error::DuplicateSite { first: 0, index: 1 });
    }
    let gap = |c: C64| (mobius(c, lambda1) - mobius(c, lambda2)).norm();

    let (mut best_c, mut best) = (0..GRID)
        .flat_map(|a| (0..GRID).map(move |b| C64::from_polar(a as f64 / GRID as f64, TAU * b as f64 / GRID as f64)))
        .map(|c| (c, gap(c)))
        .fold((C64::new(0.0, 0.0), f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut step = 1.0 / GRID as f64;
    for _ in 0..SEARCH_STEPS {
        let moves = [C64::new(step, 0.0), C64::new(-step, 0.0), C64::new(0.0, step), C64::new(0.0, -step)];
        let improved = moves
            .iter()
            .map(|d| best_c + d)
            .filter(|c| c.norm() < 1.0)
            .map(|c| (c, gap(c)))
            .filter(|(_, v)| *v > best)
            .fold(None, |acc: Option<(C64, f64)>, x| match acc {
                Some(a) if a.1 >= x.1 => Some(a),
                _ => Some(x),
            });
        match improved {
            Some((c, v)) => {
                best_c = c;
                best = v;
            }
            None => step *= 0.5,
        }
    }
    let lower = (best - 8.0 * f64::EPSILON).max(0.0);
    let candidate = lower + tolerance;
    let certified = candidate < 2.0 && {
        let half = C64::new(0.5 * candidate, 0.0);
        !hardy::is_feasible(&[lambda1, lambda2], &[half, -half], 1.0, None)?.feasible
    };
    Ok(Distance {
        lower,
        upper: if certified { candidate } else { 2.0 },
        method: DistanceMethod::MobiusSearch,
        flagged: !certified,
    })
}

/// `sup_{k ∈ Z} |1 − e^{ikα}|`: exact when `α` is a rational multiple of
/// `2π` with denominator at most 4096, otherwise `[scan maximum, 2]`.
fn circle_distance(alpha: f64) -> Distance {
    let alpha = alpha.rem_euclid(TAU);
    if let Some((q, nums)) = detect_period(&[alpha]) {
        let v = (0..q)
            .map(|k| 2.0 * (PI * ((k * nums[0]) % q) as f64 / q as f64).sin())
            .fold(0.0, f64::max);
        return Distance::exact(v, DistanceMethod::CharacterScan);
    }
    let lower = (0..=SCAN_CAP)
        .map(|k| (C64::new(1.0, 0.0) - C64::from_polar(1.0, k as f64 * alpha)).norm())
        .fold(0.0, f64::max);
    Distance {
        lower,
        upper: 2.0,
        method: DistanceMethod::CharacterScan,
        flagged: true,
    }
}

/// `sup_{k ≥ 0} |λ^k − μ^k|` on `ℓ1(Z₊)`.
fn analytic_distance(l: C64, m: C64) -> Distance {
    if l.norm() >= 1.0 && m.norm() >= 1.0 {
        return circle_distance(m.arg() - l.arg());
    }
    let b = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
    let (upper, k) = analytic_certified_sup(&[l, m], &b, SCAN_CAP);
    let lower = (crate::seqalg::power_of(l, k) - crate::seqalg::power_of(m, k)).norm();
    Distance {
        lower: lower.min(upper),
        upper,
        method: DistanceMethod::CharacterScan,
        flagged: upper - lower > DEFAULT_DISTANCE_TOLERANCE,
    }
}

/// `‖φ − ψ‖` for two validated sites of `backend`.
pub fn gleason_distance(backend: &Backend, a: &Site, b: &Site, tolerance: f64) -> Result<Distance> {
    if a == b {
        return Ok(Distance::exact(0.0, DistanceMethod::Identical));
    }
    match (backend, a, b) {
        (Backend::Hardy, Site::DiscPoint(l), Site::DiscPoint(m)) => gleason_distance_hardy(*l, *m, tolerance),
        (Backend::AnalyticWiener, Site::DiscPoint(l), Site::DiscPoint(m)) => Ok(analytic_distance(*l, *m)),
        (Backend::Wiener, Site::CircleAngle(s), Site::CircleAngle(t)) => Ok(circle_distance(t - s)),
        (Backend::L1Torus, Site::IntegerCharacter(_), Site::IntegerCharacter(_)) => {
            Ok(Distance::exact(2.0, DistanceMethod::CharacterScan))
        }
        (Backend::Finite(alg), Site::CoordinateIndex(i), Site::CoordinateIndex(j)) => {
            gleason_distance_finite(alg, i - 1, j - 1)
        }
        _ => Err(Error::domain(
            0,
            format!("sites {} / {} not accepted by backend {}", a.kind_name(), b.kind_name(), backend.name()),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartRelation {
    Same,
    Different,
    Undecided,
}

impl PartRelation {
    fn classify(d: &Distance, slack: f64) -> Self {
        if d.upper < 2.0 - slack {
            PartRelation::Same
        } else if d.lower >= 2.0 - slack {
            PartRelation::Different
        } else {
            PartRelation::Undecided
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GleasonReport {
    pub backend: String,
    pub sites: Vec<Site>,
    pub distances: Vec<Vec<Distance>>,
    pub relations: Vec<Vec<PartRelation>>,
    /// Groups of 1-based site indices.
    pub partition: Vec<Vec<usize>>,
    /// 1-based pairs whose relation could not be decided.
    pub undecided: Vec<[usize; 2]>,
    pub part_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem4: Option<Theorem4Report>,
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn check_sites(backend: &Backend, sites: &[Site]) -> Result<()> {
    if sites.len() < 2 {
        return Err(Error::domain(sites.len(), "at least two sites are required"));
    }
    let zeros = vec![C64::new(0.0, 0.0); sites.len()];
    validate_problem(&InterpolationProblem::new(backend.clone(), sites.to_vec(), zeros))
}

/// Distance matrix and the partition generated by the same-part edges.
pub fn part_partition(backend: &Backend, sites: &[Site], part_slack: f64, tolerance: f64) -> Result<GleasonReport> {
    check_sites(backend, sites)?;
    if !(0.0..2.0).contains(&part_slack) {
        return Err(Error::NonpositiveTolerance(part_slack));
    }
    let n = sites.len();
    let ps = pairs(n);
    let computed: Vec<Distance> = ps
        .par_iter()
        .map(|(i, j)| gleason_distance(backend, &sites[*i], &sites[*j], tolerance))
        .collect::<Result<_>>()?;

    let mut distances = vec![vec![Distance::exact(0.0, DistanceMethod::Identical); n]; n];
    let mut relations = vec![vec![PartRelation::Same; n]; n];
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut undecided = Vec::new();
    for ((i, j), d) in ps.iter().zip(computed) {
        let rel = PartRelation::classify(&d, part_slack);
        distances[*i][*j] = d;
        distances[*j][*i] = d;
        relations[*i][*j] = rel;
        relations[*j][*i] = rel;
        match rel {
            PartRelation::Same => {
                let (a, b) = (root(&mut parent, *i), root(&mut parent, *j));
                parent[a.max(b)] = a.min(b);
            }
            PartRelation::Undecided => undecided.push([i + 1, j + 1]),
            PartRelation::Different => {}
        }
    }
    let mut partition: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = partition.len();
            partition.push(Vec::new());
        }
        partition[slot[r]].push(i + 1);
    }
    Ok(GleasonReport {
        backend: backend.name().to_string(),
        sites: sites.to_vec(),
        distances,
        relations,
        partition,
        undecided,
        part_slack,
        theorem4: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Pair {
    /// 1-based site indices.
    pub sites: [usize; 2],
    /// NP-norm bracket of the targets `(1, −1)`.
    pub np_lower: f64,
    pub np_upper: f64,
    /// `NP(1, −1) ≤ 1 + tolerance`, so the distance is at least `2 / NP`.
    pub certified: bool,
    pub distance_lower: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Report {
    pub pairs: Vec<Theorem4Pair>,
    /// Finite models: the NP_∞ search found no witness. Other backends: every
    /// pair had `NP(1, −1) ≤ 1 + tolerance`.
    pub np_infty_claimed: bool,
    pub witness: Option<Witness>,
    pub certified_pairs: usize,
    /// NP_∞ was claimed and every pair was certified trivial.
    pub all_parts_trivial_claimed: bool,
    pub passes: bool,
}

fn np_of(problem: &InterpolationProblem) -> Result<NormResult> {
    match compute_np_norm(problem) {
        Err(Error::SolverStall { partial: Some(p), .. }) => Ok(*p),
        other => other,
    }
}

/// For each pair, the NP norm of `(1, −1)`; when it is 1 the pair is in
/// different parts. Passes iff a claimed NP_∞ backend certifies every pair
/// and every certified distance is at least `2 / (1 + tolerance)`.
pub fn theorem4_check(backend: &Backend, sites: &[Site], tolerance: f64) -> Result<Theorem4Report> {
    check_sites(backend, sites)?;
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::NonpositiveTolerance(tolerance));
    }
    let targets = vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
    let computed: Vec<Theorem4Pair> = pairs(sites.len())
        .par_iter()
        .map(|(i, j)| {
            let p = InterpolationProblem::new(backend.clone(), vec![sites[*i], sites[*j]], targets.clone())
                .with_tolerance(tolerance);
            let np = np_of(&p)?;
            let certified = np.upper <= 1.0 + tolerance;
            Ok(Theorem4Pair {
                sites: [i + 1, j + 1],
                np_lower: np.lower,
                np_upper: np.upper,
                certified,
                distance_lower: certified.then(|| (2.0 / np.upper).min(2.0)),
            })
        })
        .collect::<Result<_>>()?;
    let certified_pairs = computed.iter().filter(|p| p.certified).count();
    let (np_infty_claimed, witness) = match backend {
        Backend::Finite(alg) => {
            let v = np_infty_test(alg, NP_INFTY_SAMPLES, 0)?;
            (v.is_np_infty, v.witness)
        }
        _ => (certified_pairs == computed.len(), None),
    };
    let all_certified = certified_pairs == computed.len();
    let bounds_hold = computed
        .iter()
        .filter_map(|p| p.distance_lower)
        .all(|d| d >= 2.0 / (1.0 + tolerance));
    Ok(Theorem4Report {
        passes: (!np_infty_claimed || all_certified) && bounds_hold,
        all_parts_trivial_claimed: np_infty_claimed && all_certified,
        pairs: computed,
        np_infty_claimed,
        witness,
        certified_pairs,
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

    /// Two-point extremal value `2(1 − √(1 − ρ²))/ρ`, `ρ` pseudohyperbolic.
    fn hardy_oracle(l: C64, m: C64) -> f64 {
        let rho = ((l - m) / (c(1.0) - m.conj() * l)).norm();
        2.0 * (1.0 - (1.0 - rho * rho).sqrt()) / rho
    }

    #[test]
    fn finite_examples() {
        let sup = FiniteAlgebra::weighted_sup(vec![1.0, 1.0]).unwrap();
        let d = gleason_distance_finite(&sup, 0, 1).unwrap();
        assert!((d.lower - 2.0).abs() < 1e-8 && (d.upper - 2.0).abs() < 1e-8);
        let l1 = FiniteAlgebra::weighted_l1(vec![1.0, 1.0]).unwrap();
        let d = gleason_distance_finite(&l1, 0, 1).unwrap();
        assert!((d.lower - 1.0).abs() < 1e-8 && (d.upper - 1.0).abs() < 1e-8);
        let w = FiniteAlgebra::weighted_sup(vec![2.0, 1.0]).unwrap();
        let d = gleason_distance_finite(&w, 0, 1).unwrap();
        assert!((d.lower - 1.5).abs() < 1e-8 && (d.upper - 1.5).abs() < 1e-8);
    }

    #[test]
    fn finite_subalgebra_distances() {
        // A = {(s, s, t)}: the first two characters coincide on A
        let basis = vec![vec![c(1.0), c(1.0), c(0.0)], vec![c(0.0), c(0.0), c(1.0)]];
        let alg = FiniteAlgebra::weighted_sup(vec![1.0; 3]).unwrap().with_basis(basis).unwrap();
        let d = gleason_distance_finite(&alg, 0, 1).unwrap();
        assert!(d.upper < 1e-12);
        let d = gleason_distance_finite(&alg, 0, 2).unwrap();
        assert!((d.lower - 2.0).abs() < 1e-8 && (d.upper - 2.0).abs() < 1e-8);
    }

    #[test]
    fn lp_distance_is_a_dual_norm() {
        let alg = FiniteAlgebra::lp(3, 2.0).unwrap();
        let d = gleason_distance_finite(&alg, 0, 2).unwrap();
        assert!((d.lower - 2f64.sqrt()).abs() < 1e-12 && (d.upper - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn finite_duality_against_np_unit_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for alg in [
            FiniteAlgebra::weighted_sup(vec![2.0, 1.0, 1.5]).unwrap(),
            FiniteAlgebra::weighted_l1(vec![1.0, 3.0, 1.0]).unwrap(),
            FiniteAlgebra::lp(3, 3.0).unwrap(),
        ] {
            let d = gleason_distance_finite(&alg, 0, 1).unwrap();
            for _ in 0..100 {
                let a: Vec<C64> = (0..2)
                    .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let np = crate::finitemodel::np_norm_closed_form(&alg, &[0, 1], &a).unwrap();
                let diff = (a[0] - a[1]).norm() / np.upper;
                assert!(diff <= d.upper + 1e-8);
            }
        }
    }

    #[test]
    fn hardy_reference_values() {
        let d = gleason_distance_hardy(c(0.0), c(0.5), 1e-6).unwrap();
        let exact = 4.0 - 2.0 * 3f64.sqrt();
        assert!((d.lower - exact).abs() < 1e-5, "{}", d.lower);
        assert!(d.lower <= exact + 1e-12 && d.upper >= exact);
        assert!(!d.flagged && d.upper - d.lower <= 1e-6 + 1e-15);
        let d = gleason_distance_hardy(c(0.0), c(0.99), 1e-6).unwrap();
        assert!((d.lower - hardy_oracle(c(0.0), c(0.99))).abs() < 1e-4);
    }

    #[test]
    fn hardy_distances_grow_toward_two() {
        let mut prev = 0.0;
        for r in [0.3, 0.5, 0.7, 0.9, 0.99, 0.999] {
            let d = gleason_distance_hardy(c(0.0), c(r), 1e-6).unwrap();
            assert!(d.lower >= prev && d.lower < 2.0);
            prev = d.lower;
        }
    }

    #[test]
    fn hardy_rejects_bad_sites() {
        assert!(matches!(gleason_distance_hardy(c(0.5), c(0.5), 1e-6), Err(Error::DuplicateSite { .. })));
        assert!(matches!(gleason_distance_hardy(c(0.5), c(1.0), 1e-6), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn character_scans() {
        // third roots: |1 − ω| = √3
        let d = circle_distance(TAU / 3.0);
        assert!((d.lower - 3f64.sqrt()).abs() < 1e-12 && d.upper == d.lower);
        assert_eq!(circle_distance(PI).lower, 2.0);
        let d = analytic_distance(c(0.0), c(0.5));
        assert!((d.lower - 0.5).abs() < 1e-15 && (d.upper - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partitions() {
        let sites: Vec<Site> = [0.0, 0.3, 0.6].iter().map(|r| Site::DiscPoint(c(*r))).collect();
        let r = part_partition(&Backend::Hardy, &sites, DEFAULT_PART_SLACK, 1e-6).unwrap();
        assert_eq!(r.partition, vec![vec![1, 2, 3]]);
        for i in 0..3 {
            assert_eq!(r.distances[i][i].upper, 0.0);
            for j in 0..3 {
                assert_eq!(r.distances[i][j], r.distances[j][i]);
            }
        }
        let sup = Backend::Finite(FiniteAlgebra::weighted_sup(vec![1.0, 1.0]).unwrap());
        let sites = vec![Site::CoordinateIndex(1), Site::CoordinateIndex(2)];
        assert_eq!(part_partition(&sup, &sites, DEFAULT_PART_SLACK, 1e-6).unwrap().partition, vec![vec![1], vec![2]]);
        let l1 = Backend::Finite(FiniteAlgebra::weighted_l1(vec![1.0, 1.0]).unwrap());
        assert_eq!(part_partition(&l1, &sites, DEFAULT_PART_SLACK, 1e-6).unwrap().partition, vec![vec![1, 2]]);
        assert!(part_partition(&l1, &sites[..1], DEFAULT_PART_SLACK, 1e-6).is_err());
    }

    #[test]
    fn theorem4_examples() {
        let sites: Vec<Site> = (1..=3).map(Site::CoordinateIndex).collect();
        let sup = Backend::Finite(FiniteAlgebra::weighted_sup(vec![1.0; 3]).unwrap());
        let r = theorem4_check(&sup, &sites, 1e-9).unwrap();
        assert!(r.passes && r.np_infty_claimed && r.all_parts_trivial_claimed);
        assert!(r.pairs.iter().all(|p| p.np_upper == 1.0 && p.distance_lower == Some(2.0)));

        let l1 = Backend::Finite(FiniteAlgebra::weighted_l1(vec![1.0, 1.0]).unwrap());
        let r = theorem4_check(&l1, &sites[..2], 1e-9).unwrap();
        assert!(r.passes && !r.np_infty_claimed && r.certified_pairs == 0 && r.witness.is_some());

        let hardy = vec![Site::DiscPoint(c(0.0)), Site::DiscPoint(c(0.5))];
        let r = theorem4_check(&Backend::Hardy, &hardy, 1e-9).unwrap();
        assert!(r.passes && !r.np_infty_claimed && r.pairs[0].np_lower > 1.0);
    }

    proptest! {
        #[test]
        fn hardy_search_matches_the_extremal_formula(
            a in 0.0f64..0.9, t in 0.0f64..TAU, b in 0.0f64..0.9, s in 0.0f64..TAU,
        ) {
            let (l, m) = (C64::from_polar(a, t), C64::from_polar(b, s));
            prop_assume!((l - m).norm() > 1e-3);
            let d = gleason_distance_hardy(l, m, 1e-6).unwrap();
            let exact = hardy_oracle(l, m);
            prop_assert!(d.lower <= exact + 1e-12);
            prop_assert!(d.upper >= exact - 1e-12);
            prop_assert!(d.lower >= exact - 1e-6);
            prop_assert!(d.upper <= 2.0 + RANGE_SLACK);
        }
    }
}
