//! Sparse LP construction and a simplex-family solver.
//!
//! The solver returns basic (vertex) optimal solutions and dual values.
//! The rational backend is the reference: Bland's rule, exact pivots, zero
//! tolerances. The float backend is an accelerator that reports
//! `NumericalFailure` when it cycles or its residuals drift, at which
//! point callers fall back to the rational backend (`solve_auto`).

mod simplex;

use crate::rational::Rational;
use num_traits::Zero;

pub use simplex::NumericalFailure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Lower bound zero, no upper bound.
    NonNegative,
    /// Unbounded in both directions.
    Free,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    vars: Vec<VarKind>,
    objective: Vec<(usize, Rational)>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { sense, vars: Vec::new(), objective: Vec::new(), rows: Vec::new() }
    }

    pub fn add_var(&mut self, kind: VarKind) -> usize {
        self.vars.push(kind);
        self.vars.len() - 1
    }

    pub fn add_vars(&mut self, count: usize, kind: VarKind) -> Vec<usize> {
        (0..count).map(|_| self.add_var(kind)).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn var_kinds(&self) -> &[VarKind] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective(&self) -> &[(usize, Rational)] {
        &self.objective
    }

    /// Adds to the objective coefficient of `var`.
    pub fn objective_coeff(&mut self, var: usize, coeff: Rational) {
        assert!(var < self.vars.len(), "variable index out of range");
        if coeff.is_zero() {
            return;
        }
        match self.objective.iter_mut().find(|(v, _)| *v == var) {
            Some((_, c)) => *c += coeff,
            None => self.objective.push((var, coeff)),
        }
    }

    /// Adds a constraint; returns its row index. Duplicate variable
    /// mentions are accumulated.
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
        for (v, c) in coeffs {
            assert!(v < self.vars.len(), "variable index out of range");
            if c.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(u, _)| *u == v) {
                Some((_, acc)) => *acc += c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.rows.push(Row { coeffs: merged, relation, rhs });
        self.rows.len() - 1
    }

    /// Convenience for `var <= ub` as an ordinary constraint row.
    pub fn add_upper_bound(&mut self, var: usize, ub: Rational) -> usize {
        self.add_constraint(vec![(var, Rational::from_integer(1.into()))], Relation::Le, ub)
    }

    pub fn solve_rational(&self) -> LpSolution<Rational> {
        simplex::solve::<Rational>(self)
    }

    pub fn solve_f64(&self) -> Result<LpSolution<f64>, NumericalFailure> {
        simplex::solve_float(self)
    }

    /// Float first, exact on numerical failure.
    pub fn solve_auto(&self) -> AutoSolution {
        match self.solve_f64() {
            Ok(sol) => AutoSolution::Float(sol),
            Err(_) => AutoSolution::Exact(self.solve_rational()),
        }
    }

    /// Re-solves with the given rows forced to equality. Used to pin the
    /// active set of a solution and recover a vertex with the same value.
    pub fn restrict_and_resolve(&self, fixed_rows: &[usize]) -> LpSolution<Rational> {
        let mut restricted = self.clone();
        for &r in fixed_rows {
            restricted.rows[r].relation = Relation::Eq;
        }
        restricted.solve_rational()
    }

    /// Debug dump in the textual LP interchange format, for cross-checking
    /// against external solvers.
    pub fn to_lp_format(&self) -> String {
        use crate::rational::to_f64;
        use std::fmt::Write;
        let mut out = String::new();
        out.push_str(match self.sense {
            Sense::Maximize => "Maximize\n obj:",
            Sense::Minimize => "Minimize\n obj:",
        });
        for (v, c) in &self.objective {
            let _ = write!(out, " {:+} x{}", to_f64(c), v);
        }
        out.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            for (v, c) in &row.coeffs {
                let _ = write!(out, " {:+} x{}", to_f64(c), v);
            }
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {}", to_f64(&row.rhs));
        }
        out.push_str("Bounds\n");
        for (v, kind) in self.vars.iter().enumerate() {
            if matches!(kind, VarKind::Free) {
                let _ = writeln!(out, " x{v} free");
            }
        }
        out.push_str("End\n");
        out
    }
}

/// Solves the square system `A x = b` by exact Gaussian elimination;
/// `None` when `A` is singular.
pub fn solve_square_system(a: &[&[Rational]], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut mat: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r: Vec<Rational> = row.to_vec();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot_row);
        let pivot = mat[col][col].clone();
        for j in col..=n {
            mat[col][j] = &mat[col][j] / &pivot;
        }
        for r in 0..n {
            if r != col && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for j in col..=n {
                    let delta = &factor * &mat[col][j];
                    mat[r][j] -= delta;
                }
            }
        }
    }
    Some(mat.into_iter().map(|row| row[n].clone()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. For `Optimal` status the primal satisfies all
/// constraints (exactly on the rational backend) and `dual` carries one
/// multiplier per constraint row, aligned to insertion order, with the
/// convention that `value = sum_i dual[i] * rhs[i]` at optimality.
#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub value: T,
    pub primal: Vec<T>,
    pub dual: Vec<T>,
    /// True when the primal is a basic solution of the feasible region
    /// (always the case unless a free variable ended with both split
    /// halves in the basis at a nonzero level).
    pub is_vertex: bool,
}

impl<T> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn duals(&self) -> Option<&[T]> {
        self.is_optimal().then_some(self.dual.as_slice())
    }
}

#[derive(Debug, Clone)]
pub enum AutoSolution {
    Float(LpSolution<f64>),
    Exact(LpSolution<Rational>),
}

#[cfg(test)]
mod tests;
