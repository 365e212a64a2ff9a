//! Minimum atomic ℓ1 representation of a complex target vector.
//!
//! Solves `min Σ |c_ℓ|` subject to `Σ c_ℓ v(ℓ) = a` over a (possibly
//! infinite) family of atoms `v(ℓ) ∈ Cⁿ`. Each column of the realified LP is a
//! rotated atom `e^{iφ} v(ℓ)` with unit cost, so the LP only ever has `2n`
//! rows. The initial phases form a regular polygon; afterwards columns are
//! generated by pricing: the dual vector `b` marks an atom as improving exactly
//! when `|⟨b, v(ℓ)⟩| > 1`, and the entering phase is the one aligned with that
//! pairing. At termination every atom satisfies `|⟨b, v(ℓ)⟩| ≤ 1 + ε`, so the
//! LP optimum is the optimum of the untruncated problem (no polygon error).

use num_complex::Complex64 as C64;

use super::simplex::{LpError, Relation, Simplex};
use crate::error::{Error, Result};

/// Pricing threshold above 1 below which a pairing counts as dual feasible.
pub(crate) const PRICE_EPS: f64 = 1e-12;

pub(crate) trait AtomOracle {
    type Label: Copy + PartialEq + std::fmt::Debug;

    fn atom(&self, label: Self::Label) -> Vec<C64>;

    /// Atoms whose pairing `⟨b, v⟩ = Σ conj(b_i) v_i` exceeds `threshold` in
    /// modulus, most violated first, paired with that inner product.
    fn price(&self, b: &[C64], threshold: f64) -> Result<Vec<(Self::Label, C64)>>;
}

#[derive(Debug, Clone)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct AtomicSolution<L> {
    /// Dual vector (one entry per target).
    pub b: Vec<C64>,
    /// `Re ⟨b, a⟩`.
    pub dual_value: f64,
    /// Merged representation: one complex coefficient per atom label.
    pub atoms: Vec<(L, C64)>,
    /// `Σ |c_ℓ|` of the merged representation.
    pub primal_value: f64,
    /// LP objective after each pricing round.
    pub history: Vec<f64>,
    pub rounds: usize,
    pub pivots: usize,
    /// False when the search stopped on the round cap or lack of progress.
    pub converged: bool,
}

pub(crate) fn inner(b: &[C64], v: &[C64]) -> C64 {
    b.iter().zip(v).map(|(bi, vi)| bi.conj() * vi).sum()
}

fn realify(v: &[C64], phase: C64) -> Vec<f64> {
    let w: Vec<C64> = v.iter().map(|x| phase * x).collect();
    w.iter().map(|x| x.re).chain(w.iter().map(|x| x.im)).collect()
}

/// Rounds without progress on either bound before the search is abandoned.
const STALE_ROUNDS: usize = 50;

/// Column generation until pricing finds no improving atom, the estimated
/// gap `primal − dual / max pairing` drops to `gap_target`, or progress
/// stalls. In the last case the best dual and best primal seen are returned
/// with `converged = false`.
pub(crate) fn solve_atomic<O: AtomOracle>(
    oracle: &O,
    targets: &[C64],
    initial: &[O::Label],
    phases: usize,
    max_rounds: usize,
    gap_target: f64,
) -> Result<AtomicSolution<O::Label>> {
    let n = targets.len();
    let rows: Vec<(Vec<f64>, Relation, f64)> = (0..2 * n)
        .map(|i| {
            let rhs = if i < n { targets[i].re } else { targets[i - n].im };
            (Vec::new(), Relation::Eq, rhs)
        })
        .collect();
    let mut lp = Simplex::new(&[], &rows);
    let mut columns: Vec<(O::Label, C64)> = Vec::new();

    let phases = phases.max(4);
    for &label in initial {
        let v = oracle.atom(label);
        for j in 0..phases {
            let phase = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / phases as f64);
            lp.add_column(1.0, &realify(&v, phase));
            columns.push((label, phase));
        }
    }

    let mut history = Vec::new();
    let mut rounds = 0;
    let mut best: Option<(AtomicSolution<O::Label>, f64)> = None;
    let mut stale = 0;
    loop {
        if let Err(e) = lp.solve() {
            return match best {
                Some((sol, _)) => Ok(sol),
                None => Err(match e {
                    LpError::IterationLimit(_) => Error::stall(format!("simplex: {e}"), None),
                    other => Error::Lp(other),
                }),
            };
        }
        history.push(lp.objective());
        let y = lp.duals();
        let b: Vec<C64> = (0..n).map(|i| C64::new(y[i], y[n + i])).collect();

        let candidates = oracle.price(&b, 1.0 + PRICE_EPS)?;
        let mut snap = finish(&lp, &columns, b, targets, history.clone(), rounds);
        if candidates.is_empty() {
            return Ok(snap);
        }
        let max_pair = candidates.iter().map(|c| c.1.norm()).fold(1.0, f64::max);
        let lower = snap.dual_value / max_pair;
        if snap.primal_value - lower <= gap_target {
            return Ok(snap);
        }

        snap.converged = false;
        let slack = 1e-12 * snap.primal_value.abs().max(1.0);
        best = Some(match best.take() {
            None => (snap, lower),
            Some((mut kept, kept_lower)) => {
                let mut improved = false;
                let mut kept_lower = kept_lower;
                if lower > kept_lower + slack {
                    kept.b = snap.b;
                    kept.dual_value = snap.dual_value;
                    kept_lower = lower;
                    improved = true;
                }
                if snap.primal_value < kept.primal_value - slack {
                    kept.atoms = snap.atoms;
                    kept.primal_value = snap.primal_value;
                    improved = true;
                }
                kept.history = snap.history;
                kept.rounds = snap.rounds;
                kept.pivots = snap.pivots;
                stale = if improved { 0 } else { stale + 1 };
                (kept, kept_lower)
            }
        });

        rounds += 1;
        if rounds > max_rounds || stale >= STALE_ROUNDS {
            return Ok(best.expect("set above").0);
        }
        let mut added = 0;
        for (label, pairing) in candidates {
            let phase = pairing.conj() / pairing.norm();
            let duplicate = columns
                .iter()
                .any(|(l, p)| *l == label && (*p - phase).norm() < 1e-13);
            if duplicate {
                continue;
            }
            lp.add_column(1.0, &realify(&oracle.atom(label), phase));
            columns.push((label, phase));
            added += 1;
        }
        if added == 0 {
            // Pricing only proposes columns already present: the residual
            // violation is rounding noise in the duals.
            let (mut sol, _) = best.expect("set above");
            sol.converged = true;
            return Ok(sol);
        }
    }
}

fn finish<L: Copy + PartialEq>(
    lp: &Simplex,
    columns: &[(L, C64)],
    b: Vec<C64>,
    targets: &[C64],
    history: Vec<f64>,
    rounds: usize,
) -> AtomicSolution<L> {
    let x = lp.primal();
    let mut atoms: Vec<(L, C64)> = Vec::new();
    for ((label, phase), w) in columns.iter().zip(&x) {
        if *w == 0.0 {
            continue;
        }
        match atoms.iter_mut().find(|(l, _)| l == label) {
            Some((_, c)) => *c += phase * w,
            None => atoms.push((*label, phase * w)),
        }
    }
    let primal_value = atoms.iter().map(|(_, c)| c.norm()).sum();
    let dual_value = inner(&b, targets).re;
    AtomicSolution {
        b,
        dual_value,
        atoms,
        primal_value,
        history,
        rounds,
        pivots: lp.pivots(),
        converged: true,
    }
}
