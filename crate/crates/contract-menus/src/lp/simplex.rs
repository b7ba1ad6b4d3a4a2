//! Two-phase dense-tableau simplex with Bland's rule.
//!
//! Exact rationals pivot with zero tolerances, so Bland's rule gives
//! termination outright. Floats use the same code with small tolerances,
//! an iteration cap, and a post-solve residual check.

use super::{LinearProgram, LpSolution, LpStatus, Relation, Sense, VarKind};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error, Clone, Copy, PartialEq, Eq)]
pub enum NumericalFailure {
    #[error("float simplex exceeded the iteration cap (possible cycling)")]
    Cycling,
    #[error("float solution failed the residual check")]
    Residual,
}

pub(super) trait Scalar: Clone + PartialOrd + std::fmt::Debug {
    const EXACT: bool;
    fn zero() -> Self;
    fn from_rational(x: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    /// Strict-positivity threshold for pivot eligibility.
    fn eps() -> Self;
    fn is_zero_tol(&self) -> bool {
        self.abs() <= Self::eps()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn from_rational(x: &Rational) -> Self {
        x.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn eps() -> Self {
        <Rational as Zero>::zero()
    }
    fn is_zero_tol(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn from_rational(x: &Rational) -> Self {
        crate::rational::to_f64(x)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn eps() -> Self {
        1e-9
    }
}

const FLOAT_ITERATION_CAP: usize = 200_000;

struct Tableau<T> {
    ncols: usize,
    a: Vec<Vec<T>>,
    b: Vec<T>,
    basis: Vec<usize>,
    /// Reduced costs of the current phase objective.
    cbar: Vec<T>,
    cost: Vec<T>,
    /// Columns at or beyond this index are artificials.
    artificial_start: usize,
    /// Original row index of each tableau row (rows can be dropped as
    /// redundant after phase 1).
    row_origin: Vec<usize>,
    iterations: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    IterationCap,
}

impl<T: Scalar> Tableau<T> {
    fn recompute_reduced_costs(&mut self) {
        let m = self.a.len();
        self.cbar = self.cost.clone();
        for i in 0..m {
            let cb = self.cost[self.basis[i]].clone();
            if cb.is_zero_tol() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.a[i][j].is_zero_tol() {
                    self.cbar[j] = self.cbar[j].sub(&cb.mul(&self.a[i][j]));
                }
            }
        }
    }

    fn objective_value(&self) -> T {
        let mut v = T::zero();
        for i in 0..self.a.len() {
            v = v.add(&self.cost[self.basis[i]].mul(&self.b[i]));
        }
        v
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.a[row][col].clone();
        for j in 0..self.ncols {
            self.a[row][j] = self.a[row][j].div(&pivot);
        }
        self.b[row] = self.b[row].div(&pivot);
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let factor = self.a[i][col].clone();
            if factor.is_zero_tol() {
                self.a[i][col] = T::zero();
                continue;
            }
            for j in 0..self.ncols {
                if !self.a[row][j].is_zero_tol() {
                    self.a[i][j] = self.a[i][j].sub(&factor.mul(&self.a[row][j]));
                }
            }
            self.a[i][col] = T::zero();
            self.b[i] = self.b[i].sub(&factor.mul(&self.b[row]));
        }
        let factor = self.cbar[col].clone();
        if !factor.is_zero_tol() {
            for j in 0..self.ncols {
                if !self.a[row][j].is_zero_tol() {
                    self.cbar[j] = self.cbar[j].sub(&factor.mul(&self.a[row][j]));
                }
            }
        }
        self.cbar[col] = T::zero();
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Bland's rule iteration loop for the current phase objective
    /// (maximization). `allow_artificials` is false in phase 2.
    fn iterate(&mut self, allow_artificials: bool) -> PhaseOutcome {
        loop {
            if !T::EXACT && self.iterations > FLOAT_ITERATION_CAP {
                return PhaseOutcome::IterationCap;
            }
            let limit = if allow_artificials { self.ncols } else { self.artificial_start };
            let entering = (0..limit).find(|&j| self.cbar[j] > T::eps());
            let Some(col) = entering else {
                return PhaseOutcome::Optimal;
            };
            let mut leaving: Option<(usize, T)> = None;
            for i in 0..self.a.len() {
                if self.a[i][col] <= T::eps() {
                    continue;
                }
                let ratio = self.b[i].div(&self.a[i][col]);
                let better = match &leaving {
                    None => true,
                    Some((best_row, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best_row])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return PhaseOutcome::Unbounded,
            }
        }
    }
}

pub(super) fn solve<T: Scalar>(lp: &LinearProgram) -> LpSolution<T> {
    match run(lp) {
        Ok(sol) => sol,
        Err(f) => panic!("exact simplex reported numerical failure: {f}"),
    }
}

pub(super) fn solve_float(lp: &LinearProgram) -> Result<LpSolution<f64>, NumericalFailure> {
    let sol = run::<f64>(lp)?;
    if sol.status == LpStatus::Optimal {
        validate_float(lp, &sol)?;
    }
    Ok(sol)
}

fn run<T: Scalar>(lp: &LinearProgram) -> Result<LpSolution<T>, NumericalFailure> {
    let maximize = lp.sense == Sense::Maximize;
    let nvars = lp.num_vars();

    // Column layout: one column per variable, an extra negative-part
    // column per free variable, then slacks/surpluses, then artificials.
    let mut neg_col: Vec<Option<usize>> = vec![None; nvars];
    let mut next = nvars;
    for (v, kind) in lp.var_kinds().iter().enumerate() {
        if matches!(kind, VarKind::Free) {
            neg_col[v] = Some(next);
            next += 1;
        }
    }
    let split_end = next;

    let m = lp.num_rows();
    // Normalize rows to nonnegative rhs.
    let mut flipped = vec![false; m];
    let mut relations = Vec::with_capacity(m);
    for (i, row) in lp.rows().iter().enumerate() {
        let mut rel = row.relation;
        if row.rhs.is_negative() {
            flipped[i] = true;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        relations.push(rel);
    }
    let num_slacks = relations.iter().filter(|r| !matches!(r, Relation::Eq)).count();
    let slack_start = split_end;
    let artificial_start = slack_start + num_slacks;
    let num_artificials = relations
        .iter()
        .filter(|r| matches!(r, Relation::Ge | Relation::Eq))
        .count();
    let ncols = artificial_start + num_artificials;

    let mut a = vec![vec![T::zero(); ncols]; m];
    let mut b = vec![T::zero(); m];
    let mut basis = vec![0usize; m];
    let mut slack_col_of_row = vec![usize::MAX; m];
    let mut artificial_col_of_row = vec![usize::MAX; m];
    let mut next_slack = slack_start;
    let mut next_artificial = artificial_start;
    for (i, row) in lp.rows().iter().enumerate() {
        for (v, c) in &row.coeffs {
            let coef = T::from_rational(c);
            let coef = if flipped[i] { coef.neg() } else { coef };
            a[i][*v] = a[i][*v].add(&coef);
            if let Some(ncol) = neg_col[*v] {
                a[i][ncol] = a[i][*v].neg();
            }
        }
        let rhs = T::from_rational(&row.rhs);
        b[i] = if flipped[i] { rhs.neg() } else { rhs };
        match relations[i] {
            Relation::Le => {
                a[i][next_slack] = T::from_rational(&Rational::one());
                slack_col_of_row[i] = next_slack;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                a[i][next_slack] = T::from_rational(&Rational::one()).neg();
                slack_col_of_row[i] = next_slack;
                next_slack += 1;
                a[i][next_artificial] = T::from_rational(&Rational::one());
                artificial_col_of_row[i] = next_artificial;
                basis[i] = next_artificial;
                next_artificial += 1;
            }
            Relation::Eq => {
                a[i][next_artificial] = T::from_rational(&Rational::one());
                artificial_col_of_row[i] = next_artificial;
                basis[i] = next_artificial;
                next_artificial += 1;
            }
        }
    }

    // Maximization objective over the internal columns.
    let mut phase2_cost = vec![T::zero(); ncols];
    for (v, c) in lp.objective() {
        let coef = T::from_rational(c);
        let coef = if maximize { coef } else { coef.neg() };
        phase2_cost[*v] = phase2_cost[*v].add(&coef);
        if let Some(ncol) = neg_col[*v] {
            phase2_cost[ncol] = phase2_cost[*v].neg();
        }
    }

    let mut t = Tableau {
        ncols,
        a,
        b,
        basis,
        cbar: Vec::new(),
        cost: vec![T::zero(); ncols],
        artificial_start,
        row_origin: (0..m).collect(),
        iterations: 0,
    };

    let infeasible = |t: &Tableau<T>| LpSolution {
        status: LpStatus::Infeasible,
        value: T::zero(),
        primal: vec![T::zero(); nvars],
        dual: vec![T::zero(); t.row_origin.len()],
        is_vertex: false,
    };

    if num_artificials > 0 {
        for i in 0..m {
            let col = artificial_col_of_row[i];
            if col != usize::MAX {
                t.cost[col] = T::from_rational(&Rational::one()).neg();
            }
        }
        t.recompute_reduced_costs();
        match t.iterate(true) {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded => unreachable!("phase 1 objective is bounded above by zero"),
            PhaseOutcome::IterationCap => return Err(NumericalFailure::Cycling),
        }
        let phase1 = t.objective_value();
        if phase1 < T::eps().neg() {
            let mut sol = infeasible(&t);
            sol.dual = vec![T::zero(); m];
            return Ok(sol);
        }
        // Drive basic artificials out on a nonzero entry; rows with none
        // are redundant and dropped.
        let mut drop_rows = Vec::new();
        for i in 0..t.a.len() {
            if t.basis[i] < artificial_start {
                continue;
            }
            match (0..artificial_start).find(|&j| !t.a[i][j].is_zero_tol()) {
                Some(j) => t.pivot(i, j),
                None => drop_rows.push(i),
            }
        }
        for &i in drop_rows.iter().rev() {
            t.a.remove(i);
            t.b.remove(i);
            t.basis.remove(i);
            t.row_origin.remove(i);
        }
    }

    t.cost = phase2_cost;
    t.recompute_reduced_costs();
    match t.iterate(false) {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: T::zero(),
                primal: vec![T::zero(); nvars],
                dual: vec![T::zero(); m],
                is_vertex: false,
            })
        }
        PhaseOutcome::IterationCap => return Err(NumericalFailure::Cycling),
    }

    // Column values.
    let mut col_value = vec![T::zero(); ncols];
    for (i, &col) in t.basis.iter().enumerate() {
        col_value[col] = t.b[i].clone();
    }
    let mut primal = Vec::with_capacity(nvars);
    let mut is_vertex = true;
    for v in 0..nvars {
        match neg_col[v] {
            Some(ncolv) => {
                if col_value[v] > T::eps() && col_value[ncolv] > T::eps() {
                    is_vertex = false;
                }
                primal.push(col_value[v].sub(&col_value[ncolv]));
            }
            None => primal.push(col_value[v].clone()),
        }
    }

    let raw_value = t.objective_value();
    let value = if maximize { raw_value } else { raw_value.neg() };

    // Duals from the reduced costs of each row's initial identity column.
    let mut dual = vec![T::zero(); m];
    for &orig in &t.row_origin {
        let col = match relations[orig] {
            Relation::Le => slack_col_of_row[orig],
            Relation::Ge | Relation::Eq => artificial_col_of_row[orig],
        };
        let mut y = t.cbar[col].neg();
        if flipped[orig] {
            y = y.neg();
        }
        if !maximize {
            y = y.neg();
        }
        dual[orig] = y;
    }

    Ok(LpSolution { status: LpStatus::Optimal, value, primal, dual, is_vertex })
}

fn validate_float(lp: &LinearProgram, sol: &LpSolution<f64>) -> Result<(), NumericalFailure> {
    let tol = 1e-7;
    for (v, kind) in lp.var_kinds().iter().enumerate() {
        if matches!(kind, VarKind::NonNegative) && sol.primal[v] < -tol {
            return Err(NumericalFailure::Residual);
        }
    }
    for row in lp.rows() {
        let mut lhs = 0.0;
        let mut scale = 1.0f64;
        for (v, c) in &row.coeffs {
            let c = crate::rational::to_f64(c);
            lhs += c * sol.primal[*v];
            scale = scale.max(c.abs() * sol.primal[*v].abs());
        }
        let rhs = crate::rational::to_f64(&row.rhs);
        scale = scale.max(rhs.abs());
        let violation = match row.relation {
            Relation::Le => lhs - rhs,
            Relation::Ge => rhs - lhs,
            Relation::Eq => (lhs - rhs).abs(),
        };
        if violation > tol * (1.0 + scale) {
            return Err(NumericalFailure::Residual);
        }
    }
    // Duality gap.
    let mut dual_obj = 0.0;
    let mut scale = 1.0f64;
    for (i, row) in lp.rows().iter().enumerate() {
        dual_obj += sol.dual[i] * crate::rational::to_f64(&row.rhs);
        scale = scale.max(dual_obj.abs());
    }
    if (dual_obj - sol.value).abs() > tol * (1.0 + scale.max(sol.value.abs())) {
        return Err(NumericalFailure::Residual);
    }
    Ok(())
}
