use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use picknorm::cli::{run_with, ResultDocument};
use picknorm::finitemodel::{annihilating_functional, np_norm_closed_form, np_norm_generic, FiniteAlgebra, NormKind};
use picknorm::seqalg::np_norm_analytic_wiener;
use picknorm::{compute_np_norm, Backend, Certificate, Error, InterpolationProblem, NormResult, Site};
use proptest::prelude::*;

const TOL: f64 = 1e-6;

fn bracket(p: &InterpolationProblem) -> NormResult {
    match compute_np_norm(p) {
        Ok(r) => r,
        Err(Error::SolverStall { partial: Some(r), .. }) => *r,
        Err(e) => panic!("{e}"),
    }
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| C64::new(a, b))
}

fn disc(radius: f64) -> impl Strategy<Value = C64> {
    (0.0f64..radius, 0.0f64..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

/// A backend with `n` distinct sites.
fn sites(n: usize) -> impl Strategy<Value = (Backend, Vec<Site>)> {
    let hardy = proptest::collection::vec(disc(0.9), n).prop_map(|v| (Backend::Hardy, v.into_iter().map(Site::DiscPoint).collect()));
    let analytic = proptest::collection::vec(disc(0.8), n)
        .prop_map(|v| (Backend::AnalyticWiener, v.into_iter().map(Site::DiscPoint).collect()));
    let wiener = (Just(n), 6u64..=12).prop_flat_map(|(n, q)| {
        proptest::sample::subsequence((0..q).collect::<Vec<_>>(), n).prop_map(move |nums| {
            (Backend::Wiener, nums.iter().map(|p| Site::CircleAngle(TAU * *p as f64 / q as f64)).collect())
        })
    });
    let torus = proptest::sample::subsequence((-5i64..=5).collect::<Vec<_>>(), n)
        .prop_map(|ks| (Backend::L1Torus, ks.into_iter().map(Site::IntegerCharacter).collect()));
    let finite = (proptest::collection::vec(1.0f64..3.0, n + 2), 0usize..3).prop_map(move |(w, kind)| {
        let alg = match kind {
            0 => FiniteAlgebra::weighted_sup(w),
            1 => FiniteAlgebra::weighted_l1(w),
            _ => FiniteAlgebra::lp(n + 2, 1.0 + w[0]),
        }
        .unwrap();
        (Backend::Finite(alg), (1..=n).map(Site::CoordinateIndex).collect())
    });
    prop_oneof![hardy, analytic, wiener, torus, finite]
}

fn problem(max_n: usize) -> impl Strategy<Value = InterpolationProblem> {
    (1..=max_n)
        .prop_flat_map(|n| (sites(n), proptest::collection::vec(complex(), n)))
        .prop_filter("distinct sites", |((_, s), _)| s.iter().enumerate().all(|(i, x)| !s[..i].contains(x)))
        .prop_map(|((b, s), a)| InterpolationProblem::new(b, s, a).with_tolerance(TOL))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lower_bound_never_drops_below_the_sup_floor(p in problem(4)) {
        let r = bracket(&p);
        let floor = p.targets.iter().map(|a| a.norm()).fold(0.0, f64::max);
        prop_assert!(r.lower >= floor - TOL);
        prop_assert!(r.upper >= r.lower);
    }

    #[test]
    fn brackets_scale_with_the_targets(p in problem(3), c in complex().prop_filter("nonzero", |c| c.norm() > 0.2)) {
        let r1 = bracket(&p);
        let scaled = InterpolationProblem::new(p.backend.clone(), p.sites.clone(), p.targets.iter().map(|a| a * c).collect())
            .with_tolerance(TOL);
        let r2 = bracket(&scaled);
        let k = c.norm();
        let eps = 1e-7 * (1.0 + r2.upper);
        prop_assert!(r2.lower <= k * r1.upper + eps, "{} vs {}", r2.lower, k * r1.upper);
        prop_assert!(k * r1.lower <= r2.upper + eps, "{} vs {}", k * r1.lower, r2.upper);
    }

    #[test]
    fn dropping_a_constraint_cannot_raise_the_norm(p in problem(4).prop_filter("two or more", |p| p.sites.len() >= 2)) {
        let full = bracket(&p);
        let n = p.sites.len();
        let sub = InterpolationProblem::new(p.backend.clone(), p.sites[..n - 1].to_vec(), p.targets[..n - 1].to_vec())
            .with_tolerance(TOL);
        let part = bracket(&sub);
        prop_assert!(part.lower <= full.upper + 1e-7 * (1.0 + full.upper));
    }

    #[test]
    fn repeated_solves_are_bit_identical(p in problem(3)) {
        let a = compute_np_norm(&p);
        let b = compute_np_norm(&p);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn atomic_certificates_respect_weak_duality(p in problem(4)) {
        let r = bracket(&p);
        if let Certificate::Atomic { dual, primal, .. } = &r.certificate {
            let primal_cost: f64 = primal.iter().map(|t| t.coefficient.norm()).sum();
            prop_assert!(dual.bound <= primal_cost + 1e-9 * (1.0 + primal_cost));
            prop_assert!(dual.bound <= r.upper + 1e-9 * (1.0 + r.upper));
        }
    }

    #[test]
    fn analytic_two_site_identity(r in 0.05f64..0.95, s in -2.0f64..2.0) {
        let res = np_norm_analytic_wiener(&[C64::new(0.0, 0.0), C64::new(r, 0.0)], &[C64::new(0.0, 0.0), C64::new(s, 0.0)], 1e-7).unwrap();
        let want = s.abs() / r;
        prop_assert!((res.lower - want).abs() <= 1e-6 * (1.0 + want));
        prop_assert!((res.upper - want).abs() <= 1e-6 * (1.0 + want));
    }

    #[test]
    fn unit_sup_norm_is_the_max_modulus(a in proptest::collection::vec(complex(), 1..6), extra in 0usize..3) {
        let n = a.len();
        let alg = FiniteAlgebra::weighted_sup(vec![1.0; n + extra]).unwrap();
        let subset: Vec<usize> = (0..n).collect();
        let r = np_norm_generic(&alg, &subset, &a, 1e-10).unwrap();
        let max = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((r.lower - max).abs() <= 1e-9 && (r.upper - max).abs() <= 1e-9);
    }

    #[test]
    fn generic_solver_matches_closed_forms(
        w in proptest::collection::vec(1.0f64..3.0, 1..6),
        a in proptest::collection::vec(complex(), 6),
        kind in 0usize..3,
        p in 1.0f64..4.0,
    ) {
        let n = w.len();
        let alg = FiniteAlgebra::new(
            match kind { 0 => NormKind::WeightedSup, 1 => NormKind::WeightedL1, _ => NormKind::Lp(p) },
            if kind == 2 { vec![1.0; n] } else { w },
            None,
        ).unwrap();
        let subset: Vec<usize> = (0..n).step_by(2).collect();
        let a = &a[..subset.len()];
        let exact = np_norm_closed_form(&alg, &subset, a).unwrap().upper;
        let g = np_norm_generic(&alg, &subset, a, 1e-10).unwrap();
        prop_assert!((g.lower - exact).abs() <= 1e-8 && (g.upper - exact).abs() <= 1e-8);
    }

    #[test]
    fn annihilating_functional_kills_block_subalgebras(labels in proptest::collection::vec(0usize..3, 2..7)) {
        let mut blocks = labels.clone();
        blocks.sort_unstable();
        blocks.dedup();
        let basis: Vec<Vec<C64>> = blocks
            .iter()
            .map(|b| labels.iter().map(|l| C64::new(if l == b { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        match annihilating_functional(&basis) {
            None => prop_assert_eq!(blocks.len(), labels.len()),
            Some(mu) => {
                let mass: f64 = mu.iter().map(|m| m.norm()).sum();
                prop_assert!((mass - 1.0).abs() <= 1e-12);
                for x in &basis {
                    let pairing: C64 = mu.iter().zip(x).map(|(m, v)| m * v).sum();
                    prop_assert!(pairing.norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn emitted_documents_reparse_and_revalidate(
        ls in proptest::collection::vec(disc(0.9), 1..4),
        zs in proptest::collection::vec(complex(), 3),
    ) {
        prop_assume!(ls.iter().enumerate().all(|(i, l)| !ls[..i].contains(l)));
        let file = serde_json::json!({
            "backend": "hardy",
            "sites": ls.iter().map(|l| [l.re, l.im]).collect::<Vec<_>>(),
            "targets": zs.iter().take(ls.len()).map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "tolerance": 1e-8,
        });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        std::fs::write(&path, file.to_string()).unwrap();
        let mut out = Vec::new();
        let code = run_with(["picknorm", "compute", path.to_str().unwrap()], &mut out, &mut Vec::new());
        prop_assert_eq!(code, 0);
        let doc: ResultDocument = serde_json::from_slice(&out).unwrap();
        doc.revalidate().unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&doc).unwrap() + "\n", String::from_utf8(out).unwrap());
    }
}
