//! Dense two-phase simplex for small equality-form programs
//! `A x = b, x >= 0`, optionally maximizing `c . x`.
//!
//! Generic over [`Scalar`]: with [`Rational`](crate::scalar::Rational) every
//! pivot is exact; with `f64` comparisons use the scalar tolerance. Bland's
//! rule picks both entering and leaving variables, so degenerate problems
//! cannot cycle.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T: Scalar> {
    /// Feasible; `x` is a basic solution, `value` the objective (zero when no
    /// objective was supplied).
    Optimal {
        x: Vec<T>,
        value: T,
    },
    /// No nonnegative solution. `farkas` satisfies `y^T A <= 0` columnwise and
    /// `y^T b > 0`.
    Infeasible {
        farkas: Vec<T>,
    },
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LinearProgram<T: Scalar> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    objective: Option<Vec<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    /// Feasibility problem for `a x = b, x >= 0`. Rows of `a` must all have the
    /// same length.
    pub fn new(a: Vec<Vec<T>>, b: Vec<T>) -> Self {
        assert_eq!(a.len(), b.len(), "row count mismatch");
        if let Some(first) = a.first() {
            assert!(a.iter().all(|r| r.len() == first.len()), "ragged constraint matrix");
        }
        LinearProgram { a, b, objective: None }
    }

    /// Maximize `c . x` over the feasible set.
    pub fn maximize(mut self, c: Vec<T>) -> Self {
        assert_eq!(c.len(), self.num_vars(), "objective length mismatch");
        self.objective = Some(c);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    pub fn solve(&self) -> LpOutcome<T> {
        Tableau::build(self).run(self.objective.as_deref())
    }
}

struct Tableau<T: Scalar> {
    n: usize,
    // constraint rows: n structural columns, m artificial columns, then rhs
    rows: Vec<Vec<T>>,
    // reduced costs, last entry is -objective
    cost: Vec<T>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
    m0: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars();
        let m = lp.num_constraints();
        let width = n + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for (i, (ai, bi)) in lp.a.iter().zip(&lp.b).enumerate() {
            let flip = *bi < T::zero();
            let mut row = Vec::with_capacity(width);
            for v in ai {
                row.push(if flip { -v.clone() } else { v.clone() });
            }
            for k in 0..m {
                row.push(if k == i { T::one() } else { T::zero() });
            }
            row.push(if flip { -bi.clone() } else { bi.clone() });
            rows.push(row);
            flipped.push(flip);
        }
        // phase-1 reduced costs: c = (0, 1), c_B = 1 for every row
        let mut cost = vec![T::zero(); width];
        for row in &rows {
            for j in 0..n {
                cost[j] = cost[j].clone() - row[j].clone();
            }
            cost[width - 1] = cost[width - 1].clone() - row[width - 1].clone();
        }
        Tableau { n, rows, cost, basis: (n..n + m).collect(), flipped, m0: m }
    }

    fn rhs(&self) -> usize {
        self.n + self.m0
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let rhs = self.rhs();
        let p = self.rows[r][q].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |target: &mut Vec<T>| {
            let f = target[q].clone();
            if f == T::zero() {
                return;
            }
            for j in 0..=rhs {
                target[j] = target[j].clone() - f.clone() * pivot_row[j].clone();
            }
            target[q] = T::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = q;
    }

    /// Runs simplex iterations with entering candidates restricted to
    /// `allowed` columns. Returns false when unbounded.
    fn iterate(&mut self, allowed: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let entering = (0..allowed).find(|&j| self.cost[j] < -T::tolerance());
            let Some(q) = entering else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[q] > T::tolerance() {
                    let ratio = row[rhs].clone() / row[q].clone();
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, q),
                None => return false,
            }
        }
    }

    fn run(mut self, objective: Option<&[T]>) -> LpOutcome<T> {
        let n = self.n;
        let rhs = self.rhs();
        // phase 1 never reports unbounded: the objective is bounded below by 0
        self.iterate(n + self.m0);
        let infeasibility = -self.cost[rhs].clone();
        if infeasibility.exceeds(&T::zero()) {
            let mut farkas = vec![T::zero(); self.m0];
            for (k, y) in farkas.iter_mut().enumerate() {
                let dual = T::one() - self.cost[n + k].clone();
                *y = if self.flipped[k] { -dual } else { dual };
            }
            return LpOutcome::Infeasible { farkas };
        }

        // drive zero-valued artificials out of the basis; drop redundant rows
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= n {
                match (0..n).find(|&j| !self.rows[i][j].is_negligible()) {
                    Some(q) => self.pivot(i, q),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        let mut value = T::zero();
        if let Some(c) = objective {
            // minimize -c . x
            let mut cost = vec![T::zero(); rhs + 1];
            for j in 0..n {
                cost[j] = -c[j].clone();
            }
            for (row, &b) in self.rows.iter().zip(&self.basis) {
                let cb = -c[b].clone();
                if cb == T::zero() {
                    continue;
                }
                for j in 0..=rhs {
                    cost[j] = cost[j].clone() - cb.clone() * row[j].clone();
                }
            }
            self.cost = cost;
            if !self.iterate(n) {
                return LpOutcome::Unbounded;
            }
            value = self.cost[rhs].clone();
        }

        let mut x = vec![T::zero(); n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < n {
                x[b] = row[rhs].clone();
            }
        }
        LpOutcome::Optimal { x, value }
    }
}
