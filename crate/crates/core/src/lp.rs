//! Exact linear programming over the rationals.
//!
//! A dense two-phase simplex with Bland's rule: termination is guaranteed and
//! every answer is exact. Infeasibility comes with a Farkas certificate,
//! which the callers turn into separating functionals. Problem sizes in this
//! crate are tiny (tens of variables), so no sparsity or factorization.

use num_traits::{One, Signed, Zero};

use crate::scalar::Q;

/// Row relation. `Ge` rows are normalized by negation at build time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<Q>,
    pub rel: Rel,
    pub rhs: Q,
}

/// maximize `objective . x` subject to the rows and `x >= 0`.
#[derive(Debug, Clone)]
pub struct Lp {
    pub num_vars: usize,
    pub objective: Vec<Q>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    /// Row multipliers `y` with: `y_i >= 0` on `Le` rows, `sum y_i a_i >= 0`
    /// componentwise, and `sum y_i b_i < 0`.
    Infeasible { farkas: Vec<Q> },
    Unbounded { x: Vec<Q>, ray: Vec<Q> },
}

impl Lp {
    pub fn feasibility(num_vars: usize) -> Lp {
        Lp {
            num_vars,
            objective: vec![Q::zero(); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn maximize(num_vars: usize, objective: Vec<Q>) -> Lp {
        assert_eq!(objective.len(), num_vars);
        Lp {
            num_vars,
            objective,
            rows: Vec::new(),
        }
    }

    pub fn le(&mut self, coeffs: Vec<Q>, rhs: Q) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push(LpRow { coeffs, rel: Rel::Le, rhs });
        self
    }

    pub fn ge(&mut self, coeffs: Vec<Q>, rhs: Q) -> &mut Self {
        let neg: Vec<Q> = coeffs.iter().map(|c| -c.clone()).collect();
        self.le(neg, -rhs)
    }

    pub fn eq(&mut self, coeffs: Vec<Q>, rhs: Q) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push(LpRow { coeffs, rel: Rel::Eq, rhs });
        self
    }

    pub fn is_feasible_point(&self, x: &[Q]) -> bool {
        if x.len() != self.num_vars || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.rows.iter().all(|row| {
            let lhs: Q = row
                .coeffs
                .iter()
                .zip(x.iter())
                .map(|(a, v)| a * v)
                .sum();
            match row.rel {
                Rel::Le => lhs <= row.rhs,
                Rel::Eq => lhs == row.rhs,
            }
        })
    }

    pub fn verify_farkas(&self, y: &[Q]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        for (row, yi) in self.rows.iter().zip(y.iter()) {
            if row.rel == Rel::Le && yi.is_negative() {
                return false;
            }
        }
        for j in 0..self.num_vars {
            let wj: Q = self
                .rows
                .iter()
                .zip(y.iter())
                .map(|(row, yi)| &row.coeffs[j] * yi)
                .sum();
            if wj.is_negative() {
                return false;
            }
        }
        let yb: Q = self.rows.iter().zip(y.iter()).map(|(row, yi)| &row.rhs * yi).sum();
        yb.is_negative()
    }

    pub fn solve(&self) -> LpOutcome {
        let outcome = Tableau::new(self).run(&self.objective);
        // Exact arithmetic lets us check our own certificates.
        match &outcome {
            LpOutcome::Optimal { x, .. } => {
                assert!(self.is_feasible_point(x), "simplex returned an infeasible optimum");
            }
            LpOutcome::Infeasible { farkas } => {
                assert!(self.verify_farkas(farkas), "simplex returned an invalid Farkas certificate");
            }
            LpOutcome::Unbounded { x, ray } => {
                assert!(self.is_feasible_point(x), "unbounded base point infeasible");
                assert!(ray.iter().any(|r| !r.is_zero()), "zero ray");
            }
        }
        outcome
    }
}

struct Tableau {
    // rows 0..m are constraints, the last row is the objective (z) row;
    // the last column is the rhs.
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    num_struct: usize,
    num_slack: usize,
    m: usize,
    flipped: Vec<bool>, // row multiplied by -1 to make rhs >= 0
}

impl Tableau {
    fn new(lp: &Lp) -> Tableau {
        let m = lp.rows.len();
        let num_struct = lp.num_vars;
        let num_slack = lp.rows.iter().filter(|r| r.rel == Rel::Le).count();
        let ncols = num_struct + num_slack + m; // + artificials
        let mut t = vec![vec![Q::zero(); ncols + 1]; m + 1];
        let mut flipped = vec![false; m];
        let mut next_slack = num_struct;
        for (i, row) in lp.rows.iter().enumerate() {
            for (j, c) in row.coeffs.iter().enumerate() {
                t[i][j] = c.clone();
            }
            if row.rel == Rel::Le {
                t[i][next_slack] = Q::one();
                next_slack += 1;
            }
            t[i][ncols] = row.rhs.clone();
            if t[i][ncols].is_negative() {
                flipped[i] = true;
                for v in t[i].iter_mut() {
                    *v = -v.clone();
                }
            }
            // artificial for this row
            let art = num_struct + num_slack + i;
            t[i][art] = Q::one();
        }
        let basis: Vec<usize> = (0..m).map(|i| num_struct + num_slack + i).collect();
        Tableau {
            t,
            basis,
            num_struct,
            num_slack,
            m,
            flipped,
        }
    }

    fn ncols(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col].clone();
        debug_assert!(!piv.is_zero());
        for v in self.t[row].iter_mut() {
            *v = &*v / &piv;
        }
        for i in 0..=self.m {
            if i == row || self.t[i][col].is_zero() {
                continue;
            }
            let f = self.t[i][col].clone();
            for j in 0..self.t[i].len() {
                let sub = &f * &self.t[row][j];
                self.t[i][j] = &self.t[i][j] - &sub;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iteration on the current z-row, allowing only columns
    /// for which `allowed` holds. Returns false on unboundedness.
    fn iterate(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        let rhs_col = self.t[0].len() - 1;
        loop {
            let entering = (0..self.ncols())
                .find(|&j| allowed(j) && self.t[self.m][j].is_negative());
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<usize> = None;
            let mut best: Option<Q> = None;
            for i in 0..self.m {
                if self.t[i][col].is_positive() {
                    let ratio = &self.t[i][rhs_col] / &self.t[i][col];
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            ratio < *b
                                || (ratio == *b
                                    && self.basis[i] < self.basis[leave.unwrap()])
                        }
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            match leave {
                Some(row) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn set_objective(&mut self, coeffs: &[Q]) {
        let rhs_col = self.t[0].len() - 1;
        for v in self.t[self.m].iter_mut() {
            *v = Q::zero();
        }
        for (j, c) in coeffs.iter().enumerate() {
            self.t[self.m][j] = -c.clone();
        }
        self.t[self.m][rhs_col] = Q::zero();
        // price out the basic columns
        for i in 0..self.m {
            let b = self.basis[i];
            if !self.t[self.m][b].is_zero() {
                let f = self.t[self.m][b].clone();
                for j in 0..self.t[i].len() {
                    let sub = &f * &self.t[i][j];
                    self.t[self.m][j] = &self.t[self.m][j] - &sub;
                }
            }
        }
    }

    fn extract_x(&self) -> Vec<Q> {
        let rhs_col = self.t[0].len() - 1;
        let mut x = vec![Q::zero(); self.num_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_struct {
                x[b] = self.t[i][rhs_col].clone();
            }
        }
        x
    }

    fn run(mut self, objective: &[Q]) -> LpOutcome {
        let art_start = self.num_struct + self.num_slack;
        let rhs_col = self.t[0].len() - 1;

        // Phase 1: maximize -sum(artificials).
        let mut phase1 = vec![Q::zero(); self.ncols()];
        for j in art_start..self.ncols() {
            phase1[j] = -Q::one();
        }
        self.set_objective(&phase1);
        let ok = self.iterate(&|_| true);
        debug_assert!(ok, "phase 1 cannot be unbounded");
        let p1value = self.t[self.m][rhs_col].clone();
        if p1value.is_negative() {
            // Infeasible. Dual prices from the artificial columns:
            // zrow[art_i] = pi_i + 1 in this maximization setup.
            let mut farkas = Vec::with_capacity(self.m);
            for i in 0..self.m {
                let pi = &self.t[self.m][art_start + i] - Q::one();
                farkas.push(if self.flipped[i] { -pi } else { pi });
            }
            return LpOutcome::Infeasible { farkas };
        }

        // Drive any leftover artificials out of the basis.
        for i in 0..self.m {
            if self.basis[i] >= art_start {
                let col = (0..art_start).find(|&j| !self.t[i][j].is_zero());
                if let Some(col) = col {
                    self.pivot(i, col);
                }
                // A fully zero row is redundant; its artificial stays basic
                // at zero and is barred from re-entering below.
            }
        }

        // Phase 2 on the original objective, artificials barred.
        let lp_obj: Vec<Q> = {
            let mut v = vec![Q::zero(); self.ncols()];
            v[..self.num_struct].clone_from_slice(objective);
            v
        };
        self.set_objective(&lp_obj);
        let bounded = self.iterate(&|j| j < art_start);
        if bounded {
            let x = self.extract_x();
            let value = self.t[self.m][rhs_col].clone();
            LpOutcome::Optimal { x, value }
        } else {
            // Entering column with no positive entries: build the ray.
            let col = (0..art_start)
                .find(|&j| self.t[self.m][j].is_negative())
                .expect("unbounded without entering column");
            let mut ray = vec![Q::zero(); self.num_struct];
            if col < self.num_struct {
                ray[col] = Q::one();
            }
            for (i, &b) in self.basis.iter().enumerate() {
                if b < self.num_struct {
                    ray[b] = -self.t[i][col].clone();
                }
            }
            LpOutcome::Unbounded { x: self.extract_x(), ray }
        }
    }
}
