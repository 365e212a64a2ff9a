//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Every row carries an artificial column for the whole lifetime of the
//! tableau. Artificials never re-enter after phase one, but their columns hold
//! `B^-1`, which is what [`Simplex::add_column`] and the dual read-out need.

use thiserror::Error;

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;
const MAX_REPAIRS: usize = 8;
const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("infeasible")]
    Infeasible,
    #[error("unbounded")]
    Unbounded,
    #[error("pivot limit of {0} reached")]
    IterationLimit(usize),
    #[error("basis became singular")]
    SingularBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Col(usize),
    Art(usize),
}

/// Minimize `c^T x` subject to row constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct Simplex {
    m: usize,
    /// Row-normalized original columns (structural variables first, then slacks
    /// in creation order, then any columns added later).
    cols: Vec<Vec<f64>>,
    costs: Vec<f64>,
    /// Number of leading entries of `cols` that are user variables, by position.
    user_index: Vec<Option<usize>>,
    n_user: usize,
    rhs: Vec<f64>,
    row_sign: Vec<f64>,
    body: Vec<Vec<f64>>,
    binv: Vec<Vec<f64>>,
    beta: Vec<f64>,
    basis: Vec<Var>,
    phase_two: bool,
    pivots: usize,
    pivot_limit: usize,
}

impl Simplex {
    /// `rows` are dense coefficient vectors over the `costs.len()` structural variables.
    pub fn new(costs: &[f64], rows: &[(Vec<f64>, Relation, f64)]) -> Self {
        let m = rows.len();
        let n = costs.len();
        let mut row_sign = vec![1.0; m];
        let mut rhs = vec![0.0; m];
        let mut rels = Vec::with_capacity(m);
        for (i, (coef, rel, b)) in rows.iter().enumerate() {
            debug_assert_eq!(coef.len(), n);
            let (s, rel) = if *b < 0.0 {
                let flipped = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (-1.0, flipped)
            } else {
                (1.0, *rel)
            };
            row_sign[i] = s;
            rhs[i] = s * b;
            rels.push(rel);
        }

        let mut cols = Vec::new();
        let mut col_costs = Vec::new();
        let mut user_index = Vec::new();
        for j in 0..n {
            cols.push((0..m).map(|i| row_sign[i] * rows[i].0[j]).collect::<Vec<_>>());
            col_costs.push(costs[j]);
            user_index.push(Some(j));
        }
        for (i, rel) in rels.iter().enumerate() {
            let sign = match rel {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => continue,
            };
            let mut col = vec![0.0; m];
            col[i] = sign;
            cols.push(col);
            col_costs.push(0.0);
            user_index.push(None);
        }

        let body = (0..m)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        let binv = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();

        Simplex {
            m,
            beta: rhs.clone(),
            rhs,
            row_sign,
            cols,
            costs: col_costs,
            user_index,
            n_user: n,
            body,
            binv,
            basis: (0..m).map(Var::Art).collect(),
            phase_two: false,
            pivots: 0,
            pivot_limit: 200_000,
        }
    }

    pub fn with_pivot_limit(mut self, limit: usize) -> Self {
        self.pivot_limit = limit;
        self
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    pub fn num_vars(&self) -> usize {
        self.n_user
    }

    /// Appends a structural variable; returns its index. Valid before or
    /// after [`solve`](Self::solve); a solved tableau stays primal feasible.
    pub fn add_column(&mut self, cost: f64, coef: &[f64]) -> usize {
        debug_assert_eq!(coef.len(), self.m);
        let col: Vec<f64> = (0..self.m).map(|i| self.row_sign[i] * coef[i]).collect();
        for i in 0..self.m {
            let v: f64 = self.binv[i].iter().zip(&col).map(|(a, b)| a * b).sum();
            self.body[i].push(v);
        }
        self.cols.push(col);
        self.costs.push(cost);
        self.user_index.push(Some(self.n_user));
        self.n_user += 1;
        self.n_user - 1
    }

    fn var_cost(&self, v: Var) -> f64 {
        match (v, self.phase_two) {
            (Var::Art(_), false) => 1.0,
            (Var::Art(_), true) => 0.0,
            (Var::Col(_), false) => 0.0,
            (Var::Col(j), true) => self.costs[j],
        }
    }

    fn order(&self, v: Var) -> usize {
        match v {
            Var::Col(j) => j,
            Var::Art(i) => self.cols.len() + i,
        }
    }

    fn reduced_cost(&self, j: usize, cb: &[f64]) -> f64 {
        let own = if self.phase_two { self.costs[j] } else { 0.0 };
        own - (0..self.m).map(|i| cb[i] * self.body[i][j]).sum::<f64>()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.body[row][col];
        let inv = 1.0 / p;
        for v in self.body[row].iter_mut() {
            *v *= inv;
        }
        for v in self.binv[row].iter_mut() {
            *v *= inv;
        }
        self.beta[row] *= inv;
        let prow = self.body[row].clone();
        let pbinv = self.binv[row].clone();
        let pbeta = self.beta[row];
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.body[i][col];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in self.body[i].iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            for (v, pv) in self.binv[i].iter_mut().zip(&pbinv) {
                *v -= f * pv;
            }
            self.beta[i] -= f * pbeta;
            if self.beta[i].abs() < 1e-15 {
                self.beta[i] = 0.0;
            }
        }
        self.body[row][col] = 1.0;
        self.basis[row] = Var::Col(col);
        self.pivots += 1;
    }

    /// Runs Bland-rule pivots for the current phase until optimal.
    fn iterate(&mut self) -> Result<(), LpError> {
        loop {
            if self.pivots >= self.pivot_limit {
                return Err(LpError::IterationLimit(self.pivot_limit));
            }
            if self.pivots > 0 && self.pivots.is_multiple_of(REFACTOR_EVERY) {
                // a failure here is left for stabilize() after the phase ends
                let _ = self.refactor();
            }
            let cb: Vec<f64> = self.basis.iter().map(|&v| self.var_cost(v)).collect();
            let entering = (0..self.cols.len()).find(|&j| {
                !self.basis.contains(&Var::Col(j)) && self.reduced_cost(j, &cb) < -COST_EPS
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.body[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.beta[i].max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14
                                    && self.order(self.basis[i]) < self.order(self.basis[bi]))
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
    }

    pub fn solve(&mut self) -> Result<(), LpError> {
        for _ in 0..=MAX_REPAIRS {
            if !self.phase_two {
                self.iterate()?;
                let infeas = self.artificial_level();
                let scale = 1.0 + self.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
                if infeas > FEAS_EPS * scale {
                    return Err(LpError::Infeasible);
                }
                // Drive zero-level artificials out where a usable pivot exists;
                // rows without one are redundant and keep their artificial.
                for row in 0..self.m {
                    if matches!(self.basis[row], Var::Art(_)) {
                        if let Some(col) = (0..self.cols.len()).find(|&j| {
                            !self.basis.contains(&Var::Col(j)) && self.body[row][j].abs() > 1e-9
                        }) {
                            self.pivot(row, col);
                        }
                    }
                }
                self.phase_two = true;
            }
            self.iterate()?;
            if self.stabilize()? {
                return Ok(());
            }
        }
        Err(LpError::SingularBasis)
    }

    fn artificial_level(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.beta)
            .filter(|(v, _)| matches!(v, Var::Art(_)))
            .map(|(_, b)| b.abs())
            .sum()
    }

    /// Refactors the basis; if it has become numerically singular, swaps the
    /// dependent columns for artificials and falls back to phase one when
    /// that leaves the point infeasible. Returns whether the basis was sound.
    fn stabilize(&mut self) -> Result<bool, LpError> {
        if self.refactor().is_ok() {
            return Ok(true);
        }
        self.repair_basis();
        self.refactor()?;
        let scale = 1.0 + self.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
        if self.artificial_level() > FEAS_EPS * scale {
            self.phase_two = false;
        }
        Ok(false)
    }

    fn basis_column(&self, v: Var) -> Vec<f64> {
        match v {
            Var::Col(j) => self.cols[j].clone(),
            Var::Art(r) => (0..self.m).map(|i| if i == r { 1.0 } else { 0.0 }).collect(),
        }
    }

    fn repair_basis(&mut self) {
        let m = self.m;
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
        let residual = |q: &[Vec<f64>], v: &[f64]| {
            let mut r = v.to_vec();
            for _ in 0..2 {
                for u in q {
                    let d: f64 = u.iter().zip(&r).map(|(a, b)| a * b).sum();
                    for (ri, ui) in r.iter_mut().zip(u) {
                        *ri -= d * ui;
                    }
                }
            }
            r
        };
        let mut dropped = Vec::new();
        for k in 0..m {
            let v = self.basis_column(self.basis[k]);
            let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = residual(&q, &v);
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 * scale.max(f64::MIN_POSITIVE) {
                q.push(r.iter().map(|x| x / norm).collect());
            } else {
                dropped.push(k);
            }
        }
        for k in dropped {
            let (row, r) = (0..m)
                .map(|i| {
                    let e: Vec<f64> = (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
                    (i, residual(&q, &e))
                })
                .max_by(|a, b| {
                    let na: f64 = a.1.iter().map(|x| x * x).sum();
                    let nb: f64 = b.1.iter().map(|x| x * x).sum();
                    na.total_cmp(&nb)
                })
                .expect("m > 0");
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            q.push(r.iter().map(|x| x / norm).collect());
            self.basis[k] = Var::Art(row);
        }
    }

    /// Recomputes `B^-1`, the tableau body and the basic solution from the
    /// original columns, removing accumulated pivot drift.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut bmat = vec![vec![0.0; m]; m];
        for (k, v) in self.basis.iter().enumerate() {
            match *v {
                Var::Col(j) => {
                    for i in 0..m {
                        bmat[i][k] = self.cols[j][i];
                    }
                }
                Var::Art(r) => bmat[r][k] = 1.0,
            }
        }
        let lu = Lu::factor(bmat).ok_or(LpError::SingularBasis)?;
        let mut binv = vec![vec![0.0; m]; m];
        for j in 0..m {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            let x = lu.solve(&e);
            for i in 0..m {
                binv[i][j] = x[i];
            }
        }
        self.beta = lu.solve(&self.rhs);
        for v in self.beta.iter_mut() {
            if *v < 0.0 && *v > -1e-12 {
                *v = 0.0;
            }
        }
        for i in 0..m {
            for j in 0..self.cols.len() {
                self.body[i][j] = (0..m).map(|k| binv[i][k] * self.cols[j][k]).sum();
            }
        }
        self.binv = binv;
        Ok(())
    }

    /// Values of the user variables.
    pub fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_user];
        for (i, v) in self.basis.iter().enumerate() {
            if let Var::Col(j) = *v {
                if let Some(u) = self.user_index[j] {
                    x[u] = self.beta[i].max(0.0);
                }
            }
        }
        x
    }

    /// Row multipliers `y` with `c - A^T y >= 0` at optimality, in the sign
    /// convention of the rows as given to [`new`](Self::new).
    pub fn duals(&self) -> Vec<f64> {
        let cb: Vec<f64> = self
            .basis
            .iter()
            .map(|&v| match v {
                Var::Col(j) => self.costs[j],
                Var::Art(_) => 0.0,
            })
            .collect();
        (0..self.m)
            .map(|j| {
                let y: f64 = (0..self.m).map(|i| cb[i] * self.binv[i][j]).sum();
                y * self.row_sign[j]
            })
            .collect()
    }

    pub fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.beta)
            .map(|(v, b)| match *v {
                Var::Col(j) => self.costs[j] * b.max(0.0),
                Var::Art(_) => 0.0,
            })
            .sum()
    }
}

/// LU factorization with partial pivoting for small dense systems.
struct Lu {
    a: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    pub(crate) fn factor(mut a: Vec<Vec<f64>>) -> Option<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
            if a[p][k].abs() <= 1e-14 * scale {
                return None;
            }
            a.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                a[i][k] = f;
                for j in k + 1..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        Some(Lu { a, perm })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.a.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i][j] * x[j];
            }
            x[i] /= self.a[i][i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
        let rows = vec![
            (vec![1.0, 0.0], Relation::Le, 4.0),
            (vec![0.0, 2.0], Relation::Le, 12.0),
            (vec![3.0, 2.0], Relation::Le, 18.0),
        ];
        let mut lp = Simplex::new(&[-3.0, -5.0], &rows);
        lp.solve().unwrap();
        assert!((lp.objective() + 36.0).abs() < 1e-12);
        let x = lp.primal();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 6.0).abs() < 1e-12);
        // complementary duals: y = (0, 1.5, 1) for the <= rows (negated objective)
        let y = lp.duals();
        assert!((y[0]).abs() < 1e-12);
        assert!((y[1] + 1.5).abs() < 1e-12);
        assert!((y[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn equality_rows_with_negative_rhs() {
        // min x + y s.t. x - y = -2 -> x = 0, y = 2
        let rows = vec![(vec![1.0, -1.0], Relation::Eq, -2.0)];
        let mut lp = Simplex::new(&[1.0, 1.0], &rows);
        lp.solve().unwrap();
        assert!((lp.objective() - 2.0).abs() < 1e-12);
        let y = lp.duals();
        // reduced costs c - A^T y must be nonnegative
        assert!(1.0 - y[0] >= -1e-12 && 1.0 + y[0] >= -1e-12);
        assert!((y[0] * -2.0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let rows = vec![
            (vec![1.0], Relation::Le, 1.0),
            (vec![1.0], Relation::Ge, 2.0),
        ];
        assert_eq!(Simplex::new(&[1.0], &rows).solve(), Err(LpError::Infeasible));
        let rows = vec![(vec![1.0, -1.0], Relation::Le, 1.0)];
        assert_eq!(
            Simplex::new(&[-1.0, 0.0], &rows).solve(),
            Err(LpError::Unbounded)
        );
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let rows = vec![
            (vec![1.0, 1.0], Relation::Eq, 1.0),
            (vec![2.0, 2.0], Relation::Eq, 2.0),
        ];
        let mut lp = Simplex::new(&[1.0, 2.0], &rows);
        lp.solve().unwrap();
        assert!((lp.objective() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn added_columns_improve_the_optimum() {
        let rows = vec![(vec![2.0], Relation::Eq, 2.0)];
        let mut lp = Simplex::new(&[3.0], &rows);
        lp.solve().unwrap();
        assert!((lp.objective() - 3.0).abs() < 1e-12);
        lp.add_column(1.0, &[1.0]);
        lp.solve().unwrap();
        assert!((lp.objective() - 2.0).abs() < 1e-12);
        assert_eq!(lp.primal(), vec![0.0, 2.0]);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance; Bland's rule must terminate.
        let rows = vec![
            (vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0),
            (vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0),
            (vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0),
        ];
        let mut lp = Simplex::new(&[-0.75, 150.0, -0.02, 6.0], &rows);
        lp.solve().unwrap();
        assert!((lp.objective() + 0.05).abs() < 1e-12);
    }

    #[test]
    fn singular_basis_is_repaired() {
        let rows = vec![
            (vec![1.0, 1.0, 0.0], Relation::Eq, 2.0),
            (vec![1.0, 1.0, 1.0], Relation::Eq, 3.0),
        ];
        let mut lp = Simplex::new(&[1.0, 2.0, 1.0], &rows);
        lp.solve().unwrap();
        assert!((lp.objective() - 3.0).abs() < 1e-12);
        lp.basis = vec![Var::Col(0), Var::Col(1)];
        assert!(lp.refactor().is_err());
        assert!(!lp.stabilize().unwrap());
        assert!(lp.basis.iter().any(|v| matches!(v, Var::Art(_))));
        lp.solve().unwrap();
        assert!((lp.objective() - 3.0).abs() < 1e-12);
        assert_eq!(lp.primal(), vec![2.0, 0.0, 1.0]);
    }
}
