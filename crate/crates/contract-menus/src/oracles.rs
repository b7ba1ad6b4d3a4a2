//! Brute-force baselines used to certify the solvers at desk scale. All
//! oracles run on exact rationals.

use crate::agent::{agent_best_utility, best_response};
use crate::det::combinations;
use crate::model::{Contract, DeterministicMenu, Instance};
use crate::randmenu::{solve_restricted_master, PaymentBound};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Menu enumeration refuses above this many grid menus.
pub const GRID_MENU_BUDGET: u128 = 100_000_000;
/// Randomized-menu ground sets are capped at this many grid contracts.
pub const GRID_RAND_CONTRACT_BUDGET: u128 = 1_000;
/// Vertex enumeration refuses above this many active-set candidates.
pub const REGION_VERTEX_BUDGET: u128 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration requires {required} candidates, above the budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("grid step must be positive and at most the cap")]
    BadGrid,
    #[error("support cap must lie in 1..=num_actions")]
    BadSupportCap,
}

/// Uniform payment grid: multiples of `step` from zero up to the cap, with
/// the cap itself always included.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub payment_cap: Rational,
    pub step: Rational,
}

impl GridSpec {
    pub fn new(payment_cap: Rational, step: Rational) -> Result<Self, OracleError> {
        // Cap zero degenerates to the single all-zero contract.
        if !step.is_positive() || (step > payment_cap && !payment_cap.is_zero()) {
            return Err(OracleError::BadGrid);
        }
        Ok(GridSpec { payment_cap, step })
    }

    /// Grid values in increasing order; zero and the cap are always
    /// present.
    pub fn values(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut x = Rational::zero();
        while x < self.payment_cap {
            out.push(x.clone());
            x += &self.step;
        }
        out.push(self.payment_cap.clone());
        out
    }

    pub fn points_per_outcome(&self) -> u128 {
        self.values().len() as u128
    }
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    let mut out: u128 = 1;
    for _ in 0..exp {
        out = out.checked_mul(base)?;
    }
    Some(out)
}

/// All contracts with every payment on the grid, in mixed-radix order.
fn grid_contracts(grid: &GridSpec, m: usize) -> Vec<Contract> {
    let values = grid.values();
    let count = checked_pow(values.len() as u128, m).expect("caller checked the budget");
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; m];
    loop {
        out.push(
            Contract::new(idx.iter().map(|&i| values[i].clone()).collect())
                .expect("grid values are nonnegative"),
        );
        let mut d = 0;
        loop {
            if d == m {
                return out;
            }
            idx[d] += 1;
            if idx[d] < values.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Exhaustive search over menus whose payments all lie on the grid,
/// keeping the best DSIC one. The all-zero menu is always on the grid, so
/// a best menu always exists. Refuses when `points^(m*l)` exceeds the
/// budget.
pub fn grid_det_menu(
    instance: &Instance,
    grid: &GridSpec,
) -> Result<(DeterministicMenu, Rational), OracleError> {
    let (l, m) = (instance.num_types(), instance.num_outcomes());
    let required = checked_pow(grid.points_per_outcome(), m * l).unwrap_or(u128::MAX);
    if required > GRID_MENU_BUDGET {
        return Err(OracleError::BudgetExceeded { required, budget: GRID_MENU_BUDGET });
    }

    let candidates = grid_contracts(grid, m);
    let c = candidates.len();
    // Cache per-(type, candidate) best-response utilities and weighted
    // principal values, rescaled onto common denominators so the hot loop
    // compares and sums plain integers.
    let utilities: Vec<Vec<Rational>> = (0..l)
        .into_par_iter()
        .map(|t| candidates.iter().map(|p| agent_best_utility(instance, t, p)).collect())
        .collect();
    let weighted_values: Vec<Vec<Rational>> = (0..l)
        .into_par_iter()
        .map(|t| {
            candidates
                .iter()
                .map(|p| instance.mu(t) * best_response(instance, t, p).principal_utility)
                .collect()
        })
        .collect();
    let scale = |table: &[Vec<Rational>]| -> (Vec<Vec<BigInt>>, BigInt) {
        let mut denom = BigInt::one();
        for x in table.iter().flatten() {
            denom = denom.lcm(x.denom());
        }
        let scaled = table
            .iter()
            .map(|row| row.iter().map(|x| x.numer() * (&denom / x.denom())).collect())
            .collect();
        (scaled, denom)
    };
    let (utilities, _) = scale(&utilities);
    let (weighted, value_denom) = scale(&weighted_values);

    // Parallelize over the first type's candidate.
    let best = (0..c)
        .into_par_iter()
        .map(|first| {
            let mut assignment = vec![0usize; l];
            assignment[0] = first;
            let mut best: Option<(Vec<usize>, BigInt)> = None;
            loop {
                let dsic = (0..l).all(|t| {
                    let own = &utilities[t][assignment[t]];
                    (0..l).all(|reported| own >= &utilities[t][assignment[reported]])
                });
                if dsic {
                    let value: BigInt = (0..l).map(|t| &weighted[t][assignment[t]]).sum();
                    if best.as_ref().map(|(_, v)| value > *v).unwrap_or(true) {
                        best = Some((assignment.clone(), value));
                    }
                }
                // Advance the remaining digits (type 0 is fixed).
                let mut d = 1;
                loop {
                    if d == l {
                        return best;
                    }
                    assignment[d] += 1;
                    if assignment[d] < c {
                        break;
                    }
                    assignment[d] = 0;
                    d += 1;
                }
            }
        })
        .filter_map(|x| x)
        .reduce_with(|a, b| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("the all-zero menu is DSIC");

    let (assignment, value) = best;
    let menu = DeterministicMenu::new(
        assignment.iter().map(|&i| candidates[i].clone()).collect(),
    );
    Ok((menu, Rational::new(value, value_denom)))
}

/// Lower-bound oracle for the randomized supremum: the master LP
/// restricted to grid contracts as the ground set.
pub fn grid_rand_menu(
    instance: &Instance,
    grid: &GridSpec,
    support_cap: usize,
) -> Result<Rational, OracleError> {
    if support_cap == 0 || support_cap > instance.num_actions() {
        return Err(OracleError::BadSupportCap);
    }
    let m = instance.num_outcomes();
    let required = checked_pow(grid.points_per_outcome(), m).unwrap_or(u128::MAX);
    if required > GRID_RAND_CONTRACT_BUDGET {
        return Err(OracleError::BudgetExceeded { required, budget: GRID_RAND_CONTRACT_BUDGET });
    }
    let candidates = grid_contracts(grid, m);
    let columns: Vec<(usize, Contract)> = (0..instance.num_types())
        .flat_map(|t| candidates.iter().map(move |p| (t, p.clone())))
        .collect();
    Ok(solve_restricted_master(instance, &columns).value)
}

/// All vertices of the polyhedron of contracts in the payment box under
/// which `tuple[t]` is incentive compatible for every type `t`, by
/// exhaustive active-set enumeration. An empty result means the region is
/// empty.
pub fn enumerate_region_vertices(
    instance: &Instance,
    bound: &PaymentBound,
    tuple: &[usize],
) -> Result<Vec<Contract>, OracleError> {
    let (l, n, m) = (instance.num_types(), instance.num_actions(), instance.num_outcomes());
    assert_eq!(tuple.len(), l);

    // Rows: per type, IC of tuple[t] against every other action; then the
    // box faces.
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for (t, &at) in tuple.iter().enumerate() {
        for a2 in 0..n {
            if a2 == at {
                continue;
            }
            let row: Vec<Rational> =
                (0..m).map(|w| instance.f(t, at, w) - instance.f(t, a2, w)).collect();
            let rhs = instance.cost(t, at) - instance.cost(t, a2);
            rows.push((row, rhs));
        }
    }
    let ineq_count = rows.len();
    for w in 0..m {
        let mut lower = vec![Rational::zero(); m];
        lower[w] = Rational::from_integer(1.into());
        rows.push((lower.clone(), Rational::zero()));
        rows.push((lower, bound.box_bound.clone()));
    }

    let total = rows.len() as u128;
    let candidates = crate::det::binomial_u128(total, m as u128).unwrap_or(u128::MAX);
    if candidates > REGION_VERTEX_BUDGET {
        return Err(OracleError::BudgetExceeded { required: candidates, budget: REGION_VERTEX_BUDGET });
    }

    let feasible = |p: &[Rational]| -> bool {
        p.iter().all(|x| !x.is_negative() && *x <= bound.box_bound)
            && rows[..ineq_count].iter().all(|(row, rhs)| {
                let lhs: Rational = row.iter().zip(p).map(|(c, x)| c * x).sum();
                lhs >= *rhs
            })
    };

    let mut vertices: Vec<Contract> = Vec::new();
    for subset in combinations(rows.len(), m) {
        let a_rows: Vec<&[Rational]> = subset.iter().map(|&i| rows[i].0.as_slice()).collect();
        let b_vals: Vec<Rational> = subset.iter().map(|&i| rows[i].1.clone()).collect();
        let Some(point) = crate::lp::solve_square_system(&a_rows, &b_vals) else {
            continue;
        };
        if feasible(&point) {
            let contract = Contract::new(point).expect("feasible points are nonnegative");
            if !vertices.contains(&contract) {
                vertices.push(contract);
            }
        }
    }
    vertices.sort();
    Ok(vertices)
}
