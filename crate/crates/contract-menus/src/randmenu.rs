//! Near-optimal DSIC menus of randomized contracts.
//!
//! The optimum over randomized menus is a supremum that need not be
//! attained, but for every epsilon there is a menu within epsilon of it
//! supported on vertices of finitely many best-response polyhedra clipped
//! to a payment box. That finite ground set induces a huge LP; we solve it
//! by column generation: the restricted LP's duals price candidate
//! contracts, and a per-(type, action) LP pair finds the most violated
//! column or certifies feasibility.
//!
//! The textbook route to polynomial time runs the ellipsoid method on the
//! dual with this same separation oracle; the cutting-plane loop here
//! reaches the same optimum over the same ground set, just without the
//! worst-case guarantee.

use crate::agent::{agent_best_utility, best_response, menu_value, verify_dsic};
use crate::lp::{LinearProgram, LpStatus, Relation, Sense, VarKind};
use crate::model::{Contract, Instance, RandomizedMenu};
use crate::rational::{rat_int, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Master-iteration cap; on hitting it the best menu so far is returned
/// together with the certified remaining gap.
pub const MASTER_ITERATION_CAP: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum RandError {
    #[error("epsilon must be positive")]
    BadEpsilon,
    #[error("menu is not DSIC (worst slack {0})")]
    NotDsic(Rational),
}

/// Payment box bound: every epsilon-near-optimal menu can be assumed to
/// pay at most `box_bound` per outcome.
#[derive(Debug, Clone)]
pub struct PaymentBound {
    /// Smallest positive outcome probability.
    pub f_min: Rational,
    /// Smallest type probability.
    pub y_min: Rational,
    /// Bound on the coordinates of basic points of the best-response
    /// polyhedra (Hadamard bound through the instance's common
    /// denominator).
    pub vertex_bound: Rational,
    /// The box edge `C`: payments above this are never needed.
    pub box_bound: Rational,
    pub epsilon: Rational,
}

pub fn payment_bound(instance: &Instance, epsilon: &Rational) -> Result<PaymentBound, RandError> {
    if !epsilon.is_positive() {
        return Err(RandError::BadEpsilon);
    }
    let mut f_min: Option<Rational> = None;
    for t in 0..instance.num_types() {
        for a in 0..instance.num_actions() {
            for f in instance.dist_row(t, a) {
                if f.is_positive() && f_min.as_ref().map(|m| f < m).unwrap_or(true) {
                    f_min = Some(f.clone());
                }
            }
        }
    }
    let f_min = f_min.expect("a valid instance has positive probabilities");
    let y_min = (0..instance.num_types())
        .map(|t| instance.mu(t).clone())
        .min()
        .expect("a valid instance has types");

    // Common denominator of the instance data; any basic point of a
    // best-response system has coordinates det/det with the denominator
    // determinant at least q^-(m+1), and Hadamard bounds the numerator.
    let mut q = BigInt::one();
    for x in instance.iter_rationals() {
        q = q.lcm(x.denom());
    }
    let m1 = instance.num_outcomes() as u32 + 1;
    let vertex_bound = Rational::from_integer((BigInt::from(m1) * q).pow(m1));

    let nl = rat_int((instance.num_actions() * instance.num_types()) as i64);
    let box_bound = rat_int(4) * nl * &vertex_bound / epsilon
        * (rat_int(4) / (&f_min * &y_min) + &vertex_bound);

    Ok(PaymentBound { f_min, y_min, vertex_bound, box_bound, epsilon: epsilon.clone() })
}

/// Dual values of the restricted master: `y[t][reported]` prices the DSIC
/// constraint of type `t` against reporting `reported` (nonpositive), and
/// `t_duals[t]` prices type `t`'s probability-mass constraint.
#[derive(Debug, Clone)]
pub struct DualPoint {
    pub y: Vec<Vec<Rational>>,
    pub t_duals: Vec<Rational>,
}

impl DualPoint {
    pub fn objective(&self) -> Rational {
        self.t_duals.iter().sum()
    }
}

/// A candidate variable of the master LP: one contract offered to one
/// type, together with the action every type would play under it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub type_index: usize,
    pub contract: Contract,
    pub best_responses: Vec<usize>,
}

/// A violated dual constraint found by the separation oracle.
#[derive(Debug, Clone)]
pub struct SeparationHit {
    pub column: Column,
    /// The priced objective of the column; violation means it exceeds the
    /// type's mass dual.
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub value: Rational,
    pub menu: RandomizedMenu,
    pub duals: DualPoint,
}

/// Solves the master LP restricted to the given columns: maximize expected
/// principal utility over per-type distributions subject to the DSIC
/// constraints, all coefficients evaluated through exact best responses.
/// Every type needs at least one column (the zero contract makes any
/// column set feasible).
pub fn solve_restricted_master(instance: &Instance, columns: &[(usize, Contract)]) -> MasterSolution {
    let l = instance.num_types();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let gamma = lp.add_vars(columns.len(), VarKind::NonNegative);

    // Best-response utilities of every type against every column.
    let utilities: Vec<Vec<Rational>> = columns
        .par_iter()
        .map(|(_, p)| (0..l).map(|t| agent_best_utility(instance, t, p)).collect())
        .collect();

    for (c, (owner, contract)) in columns.iter().enumerate() {
        let w = best_response(instance, *owner, contract).principal_utility;
        lp.objective_coeff(gamma[c], instance.mu(*owner) * w);
    }
    let mut pair_rows = vec![vec![usize::MAX; l]; l];
    for t in 0..l {
        for reported in 0..l {
            if t == reported {
                continue;
            }
            let mut coeffs = Vec::new();
            for (c, (owner, _)) in columns.iter().enumerate() {
                if *owner == t {
                    coeffs.push((gamma[c], utilities[c][t].clone()));
                } else if *owner == reported {
                    coeffs.push((gamma[c], -utilities[c][t].clone()));
                }
            }
            pair_rows[t][reported] = lp.add_constraint(coeffs, Relation::Ge, Rational::zero());
        }
    }
    let mass_rows: Vec<usize> = (0..l)
        .map(|t| {
            let coeffs = columns
                .iter()
                .enumerate()
                .filter(|(_, (owner, _))| *owner == t)
                .map(|(c, _)| (gamma[c], Rational::one()))
                .collect();
            lp.add_constraint(coeffs, Relation::Eq, Rational::one())
        })
        .collect();

    let sol = lp.solve_rational();
    assert_eq!(
        sol.status,
        LpStatus::Optimal,
        "restricted master contains the all-zero menu and is bounded"
    );

    let mut entries: Vec<Vec<(Contract, Rational)>> = vec![Vec::new(); l];
    for (c, (owner, contract)) in columns.iter().enumerate() {
        let weight = sol.primal[gamma[c]].clone();
        if weight.is_positive() {
            match entries[*owner].iter_mut().find(|(p, _)| p == contract) {
                Some((_, w)) => *w += weight,
                None => entries[*owner].push((contract.clone(), weight)),
            }
        }
    }
    let menu = RandomizedMenu::from_raw(entries);

    let mut y = vec![vec![Rational::zero(); l]; l];
    for t in 0..l {
        for reported in 0..l {
            if t != reported {
                y[t][reported] = sol.dual[pair_rows[t][reported]].clone();
                debug_assert!(
                    !y[t][reported].is_positive(),
                    "duals of >= rows in a maximization are nonpositive"
                );
            }
        }
    }
    let t_duals = mass_rows.iter().map(|&r| sol.dual[r].clone()).collect();

    MasterSolution { value: sol.value, menu, duals: DualPoint { y, t_duals } }
}

/// The priced objective of a column for type `t` at a dual point: the
/// type's weighted principal utility, minus the own-utility term, plus the
/// cross terms in which other types evaluate this contract.
pub fn column_price(
    instance: &Instance,
    dual: &DualPoint,
    t: usize,
    contract: &Contract,
) -> Rational {
    let l = instance.num_types();
    let br = best_response(instance, t, contract);
    let own_coeff: Rational = (0..l).filter(|&r| r != t).map(|r| dual.y[t][r].clone()).sum();
    let mut value = instance.mu(t) * br.principal_utility - own_coeff * br.agent_utility;
    for other in 0..l {
        if other != t && !dual.y[other][t].is_zero() {
            value += &dual.y[other][t] * agent_best_utility(instance, other, contract);
        }
    }
    value
}

/// One (type, action) pricing subproblem. Maximizes the priced objective
/// over contracts in the box for which `action` is incentive compatible
/// for `t`, with auxiliary variables standing in for the other types'
/// best-response utilities (their objective coefficients are nonpositive,
/// so they settle at the maxima). The optimizer is then re-solved over the
/// polyhedron of its induced action tuple to land on a vertex.
fn price_type_action(
    instance: &Instance,
    bound: &PaymentBound,
    dual: &DualPoint,
    t: usize,
    action: usize,
) -> Option<(Rational, Column)> {
    let (l, n, m) = (instance.num_types(), instance.num_actions(), instance.num_outcomes());
    let own_coeff: Rational = (0..l).filter(|&r| r != t).map(|r| dual.y[t][r].clone()).sum();

    let mut lp = LinearProgram::new(Sense::Maximize);
    let p = lp.add_vars(m, VarKind::NonNegative);
    for w in 0..m {
        lp.add_upper_bound(p[w], bound.box_bound.clone());
    }
    // mu_t * F[t][a] . (r - p) - own_coeff * (F[t][a] . p - c) built as
    // linear terms plus a constant added after solving.
    let mut constant = instance.mu(t) * instance.expected_reward(t, action)
        + &own_coeff * instance.cost(t, action);
    for w in 0..m {
        let coeff = -(instance.mu(t) + &own_coeff) * instance.f(t, action, w);
        lp.objective_coeff(p[w], coeff);
    }
    for other in 0..l {
        if other == t || dual.y[other][t].is_zero() {
            continue;
        }
        let z = lp.add_var(VarKind::Free);
        lp.objective_coeff(z, dual.y[other][t].clone());
        for a2 in 0..n {
            let mut coeffs = vec![(z, Rational::one())];
            for w in 0..m {
                coeffs.push((p[w], -instance.f(other, a2, w)));
            }
            lp.add_constraint(coeffs, Relation::Ge, -instance.cost(other, a2));
        }
    }
    for a2 in 0..n {
        if a2 == action {
            continue;
        }
        let mut coeffs = Vec::with_capacity(m);
        for w in 0..m {
            coeffs.push((p[w], instance.f(t, action, w) - instance.f(t, a2, w)));
        }
        lp.add_constraint(coeffs, Relation::Ge, instance.cost(t, action) - instance.cost(t, a2));
    }

    let relaxed = lp.solve_rational();
    if relaxed.status != LpStatus::Optimal {
        return None;
    }
    let p_star = Contract::new((0..m).map(|w| relaxed.primal[p[w]].clone()).collect())
        .expect("box variables are nonnegative");

    // Freeze the action tuple induced by the optimizer and re-solve the
    // now fully linear objective over that tuple's polyhedron; the box
    // keeps it a polytope, so the optimum is a vertex.
    let mut tuple: Vec<usize> = (0..l).map(|r| best_response(instance, r, &p_star).action).collect();
    tuple[t] = action;

    let mut vertex_lp = LinearProgram::new(Sense::Maximize);
    let pv = vertex_lp.add_vars(m, VarKind::NonNegative);
    for w in 0..m {
        vertex_lp.add_upper_bound(pv[w], bound.box_bound.clone());
    }
    for w in 0..m {
        let coeff = -(instance.mu(t) + &own_coeff) * instance.f(t, action, w);
        vertex_lp.objective_coeff(pv[w], coeff);
    }
    for other in 0..l {
        if other == t || dual.y[other][t].is_zero() {
            continue;
        }
        constant -= &dual.y[other][t] * instance.cost(other, tuple[other]);
        for w in 0..m {
            let coeff = &dual.y[other][t] * instance.f(other, tuple[other], w);
            vertex_lp.objective_coeff(pv[w], coeff);
        }
    }
    for (r, &ar) in tuple.iter().enumerate() {
        for a2 in 0..n {
            if a2 == ar {
                continue;
            }
            let mut coeffs = Vec::with_capacity(m);
            for w in 0..m {
                coeffs.push((pv[w], instance.f(r, ar, w) - instance.f(r, a2, w)));
            }
            vertex_lp.add_constraint(coeffs, Relation::Ge, instance.cost(r, ar) - instance.cost(r, a2));
        }
    }
    let vertex_sol = vertex_lp.solve_rational();
    debug_assert_eq!(vertex_sol.status, LpStatus::Optimal, "tuple polyhedron contains p*");
    if vertex_sol.status != LpStatus::Optimal {
        return None;
    }
    debug_assert!(vertex_sol.is_vertex);
    let value = vertex_sol.value + constant;
    debug_assert_eq!(value, {
        let relaxed_constant = instance.mu(t) * instance.expected_reward(t, action)
            + &own_coeff * instance.cost(t, action);
        relaxed.value + relaxed_constant
    });
    let contract = Contract::new((0..m).map(|w| vertex_sol.primal[pv[w]].clone()).collect())
        .expect("box variables are nonnegative");
    Some((value, Column { type_index: t, contract, best_responses: tuple }))
}

/// Prices every (type, action) pair against the dual point and returns the
/// violated columns; an empty result certifies the dual point feasible
/// over the whole vertex ground set.
pub fn separation_oracle(
    instance: &Instance,
    bound: &PaymentBound,
    dual: &DualPoint,
) -> Vec<SeparationHit> {
    let l = instance.num_types();
    let n = instance.num_actions();
    let pairs: Vec<(usize, usize)> =
        (0..l).flat_map(|t| (0..n).map(move |a| (t, a))).collect();
    let mut hits: Vec<(usize, SeparationHit)> = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(idx, &(t, a))| {
            let (value, column) = price_type_action(instance, bound, dual, t, a)?;
            (value > dual.t_duals[t]).then(|| (idx, SeparationHit { column, value }))
        })
        .collect();
    hits.sort_by_key(|(idx, _)| *idx);
    let mut out: Vec<SeparationHit> = Vec::with_capacity(hits.len());
    for (_, hit) in hits {
        let duplicate = out.iter().any(|h| {
            h.column.type_index == hit.column.type_index && h.column.contract == hit.column.contract
        });
        if !duplicate {
            out.push(hit);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iteration: usize,
    pub primal: Rational,
    pub dual: Rational,
    pub new_columns: usize,
}

#[derive(Debug, Clone)]
pub struct RandSolveResult {
    pub menu: RandomizedMenu,
    pub value: Rational,
    /// Final restricted dual objective (equals `value` at convergence).
    pub dual_objective: Rational,
    /// The final dual point; feasible over the whole vertex ground set
    /// when `converged`.
    pub final_duals: DualPoint,
    /// Certified bound on how far the final value can be below the
    /// optimum over the vertex ground set; zero at convergence.
    pub remaining_gap: Rational,
    pub iterations: usize,
    pub converged: bool,
    pub bound: PaymentBound,
    pub trace: Vec<TraceRow>,
}

impl RandSolveResult {
    /// Certified upper bound on the achievable value over the bounded
    /// vertex ground set (and never above 1, the largest utility any menu
    /// can reach).
    pub fn sup_upper_bound(&self) -> Rational {
        let bound = &self.dual_objective + &self.remaining_gap;
        bound.min(Rational::one())
    }
}

pub fn solve_randomized(instance: &Instance, epsilon: &Rational) -> Result<RandSolveResult, RandError> {
    solve_randomized_capped(instance, epsilon, MASTER_ITERATION_CAP)
}

/// Column generation on the master LP. Starts from the all-zero column per
/// type (feasible under the shared zero-cost action), alternates restricted
/// solves with separation, and stops when no priced column is violated.
pub fn solve_randomized_capped(
    instance: &Instance,
    epsilon: &Rational,
    max_iterations: usize,
) -> Result<RandSolveResult, RandError> {
    assert!(max_iterations >= 1, "at least one master iteration is required");
    let bound = payment_bound(instance, epsilon)?;
    let l = instance.num_types();
    let zero = Contract::zero(instance.num_outcomes());
    let mut columns: Vec<(usize, Contract)> = (0..l).map(|t| (t, zero.clone())).collect();

    let mut trace = Vec::new();
    let mut last_master = None;
    let mut converged = false;
    let mut remaining_gap = Rational::zero();
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        let master = solve_restricted_master(instance, &columns);
        let hits = separation_oracle(instance, &bound, &master.duals);

        // New columns only; at exact arithmetic a violated column cannot
        // already be in the master.
        let fresh: Vec<&SeparationHit> = hits
            .iter()
            .filter(|h| {
                !columns
                    .iter()
                    .any(|(t, p)| *t == h.column.type_index && p == &h.column.contract)
            })
            .collect();

        trace.push(TraceRow {
            iteration: iterations,
            primal: master.value.clone(),
            dual: master.duals.objective(),
            new_columns: fresh.len(),
        });

        if fresh.is_empty() {
            debug_assert!(hits.is_empty(), "violated columns must be new under exact pricing");
            converged = true;
            last_master = Some(master);
            break;
        }
        if iterations == max_iterations {
            // Certified residual: raising each type's mass dual to its best
            // violation value restores dual feasibility.
            remaining_gap = (0..l)
                .map(|t| {
                    hits.iter()
                        .filter(|h| h.column.type_index == t)
                        .map(|h| &h.value - &master.duals.t_duals[t])
                        .max()
                        .unwrap_or_else(Rational::zero)
                        .max(Rational::zero())
                })
                .sum();
            last_master = Some(master);
            break;
        }
        for hit in fresh {
            columns.push((hit.column.type_index, hit.column.contract.clone()));
        }
        last_master = Some(master);
    }

    let master = last_master.expect("at least one master solve");
    debug_assert!(verify_dsic(instance, &master.menu, &Rational::zero()).is_dsic());
    debug_assert_eq!(menu_value(instance, &master.menu), master.value);

    Ok(RandSolveResult {
        value: master.value,
        dual_objective: master.duals.objective(),
        final_duals: master.duals,
        menu: master.menu,
        remaining_gap,
        iterations,
        converged,
        bound,
        trace,
    })
}

/// Collapses each type's support to at most one contract per played
/// action by replacing every group with its probability-weighted mean.
/// Requires a DSIC input; keeps DSIC and never lowers the value.
///
/// A collapsed mean can land on a tie boundary where its played action
/// differs from its group's, so the pass repeats until a fixpoint; the
/// support shrinks every non-trivial pass, making this idempotent.
pub fn simplify_menu(instance: &Instance, menu: &RandomizedMenu) -> Result<RandomizedMenu, RandError> {
    let report = verify_dsic(instance, menu, &Rational::zero());
    if !report.is_dsic() {
        return Err(RandError::NotDsic(
            report.worst_slack().map(|s| s.slack.clone()).unwrap_or_default(),
        ));
    }
    let mut current = menu.clone();
    loop {
        let next = collapse_once(instance, &current);
        if next == current {
            debug_assert!(verify_dsic(instance, &next, &Rational::zero()).is_dsic());
            debug_assert!(menu_value(instance, &next) >= menu_value(instance, menu));
            return Ok(next);
        }
        current = next;
    }
}

fn collapse_once(instance: &Instance, menu: &RandomizedMenu) -> RandomizedMenu {
    let mut entries = Vec::with_capacity(menu.num_types());
    for t in 0..menu.num_types() {
        let mut groups: Vec<(usize, Vec<Rational>, Rational)> = Vec::new();
        for (p, w) in menu.entry(t) {
            if w.is_zero() {
                continue;
            }
            let played = best_response(instance, t, p).action;
            match groups.iter_mut().find(|(a, _, _)| *a == played) {
                Some((_, acc, total)) => {
                    for (acc_w, pay) in acc.iter_mut().zip(p.pay()) {
                        *acc_w += w * pay;
                    }
                    *total += w;
                }
                None => {
                    groups.push((played, p.pay().iter().map(|x| w * x).collect(), w.clone()))
                }
            }
        }
        let mut support: Vec<(Contract, Rational)> = Vec::with_capacity(groups.len());
        for (_, weighted_sum, total) in groups {
            let mean = Contract::new(weighted_sum.into_iter().map(|x| x / &total).collect())
                .expect("mean of nonnegative contracts");
            match support.iter_mut().find(|(p, _)| *p == mean) {
                Some((_, w)) => *w += total,
                None => support.push((mean, total)),
            }
        }
        debug_assert!(support.len() <= instance.num_actions());
        entries.push(support);
    }
    RandomizedMenu::from_raw(entries)
}
