//! Solvers for menus of deterministic contracts.
//!
//! - `solve_two_outcomes`: exact optimum for two-outcome instances via the
//!   single-contract collapse and breakpoint enumeration.
//! - `solve_constant_types`: exact optimum by enumerating action profiles
//!   and solving a payment-minimizing LP per profile.
//! - `ptas_constant_outcomes`: additive approximation through menus with
//!   few distinct contracts, enumerating (assignment, action) pairs with
//!   one LP each, or enumerating polyhedron vertices directly.
//! - `convert_to_dsic`: turns an approximately-incentive-compatible menu
//!   into an exactly DSIC one, losing at most 2*sqrt(eps).

use crate::agent::{agent_best_utility, best_response, menu_value_deterministic, verify_eps_approx};
use crate::lp::{LinearProgram, LpStatus, Relation, Sense, VarKind};
use crate::model::{Contract, DeterministicMenu, Instance};
use crate::rational::{rat_int, rational_sqrt_upper, Rational};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Action-profile enumeration refuses above this many profiles.
pub const CONSTANT_TYPES_CAP: u128 = 1_000_000;
/// The approximation scheme refuses above this many enumerated candidates.
pub const PTAS_CAP: u128 = 10_000_000;

#[derive(Debug, thiserror::Error)]
pub enum DetError {
    #[error("two-outcome solver requires exactly 2 outcomes, instance has {0}")]
    DimensionError(usize),
    #[error("enumeration size {required} exceeds the cap {cap}")]
    CapExceeded { required: u128, cap: u128 },
    #[error("approximation scheme supports at most 3 outcomes, instance has {0}")]
    TooManyOutcomes(usize),
    #[error("delta must lie in (0, 1]")]
    BadDelta,
    #[error("input menu fails the eps-approximate conditions, worst slack {0}")]
    NotEpsApproximate(Rational),
    #[error("input menu has no action recommendations")]
    MissingRecommendations,
}

/// A menu represented as `k` contract rows plus a type-to-row assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactMenu {
    pub contracts: Vec<Contract>,
    pub assignment: Vec<usize>,
}

impl CompactMenu {
    pub fn num_rows(&self) -> usize {
        self.contracts.len()
    }

    pub fn to_menu(&self) -> DeterministicMenu {
        DeterministicMenu::new(
            self.assignment
                .iter()
                .map(|&i| self.contracts[i].clone())
                .collect(),
        )
    }
}

/// Exact optimum with two outcomes. The optimal value is attained by a
/// single contract shared by all types, paying zero on the lower-reward
/// outcome and at most the reward spread on the other; the principal's
/// value is piecewise linear in that one payment, so it is maximized at an
/// action-tie breakpoint or an endpoint.
pub fn solve_two_outcomes(instance: &Instance) -> Result<(DeterministicMenu, Rational), DetError> {
    if instance.num_outcomes() != 2 {
        return Err(DetError::DimensionError(instance.num_outcomes()));
    }
    let (w0, w1) = if instance.reward(0) <= instance.reward(1) { (0, 1) } else { (1, 0) };
    let cap = instance.reward(w1) - instance.reward(w0);

    let mut candidates: Vec<Rational> = vec![Rational::zero(), cap.clone()];
    for t in 0..instance.num_types() {
        for a in 0..instance.num_actions() {
            for a2 in a + 1..instance.num_actions() {
                let denom = instance.f(t, a, w1) - instance.f(t, a2, w1);
                if denom.is_zero() {
                    continue;
                }
                let tie = (instance.cost(t, a) - instance.cost(t, a2)) / denom;
                if !tie.is_negative() && tie <= cap {
                    candidates.push(tie);
                }
            }
        }
    }
    crate::rational::sort_dedup(&mut candidates);

    let mut best: Option<(Rational, Contract)> = None;
    for c in candidates {
        let mut pay = vec![Rational::zero(), Rational::zero()];
        pay[w1] = c;
        let contract = Contract::new(pay).expect("candidate payments are nonnegative");
        let value: Rational = (0..instance.num_types())
            .map(|t| instance.mu(t) * best_response(instance, t, &contract).principal_utility)
            .sum();
        match &best {
            Some((v, _)) if *v >= value => {}
            _ => best = Some((value, contract)),
        }
    }
    let (value, contract) = best.expect("candidate set contains zero");
    Ok((DeterministicMenu::uniform(instance.num_types(), contract), value))
}

fn profile_count(n: usize, l: usize) -> Option<u128> {
    let mut total: u128 = 1;
    for _ in 0..l {
        total = total.checked_mul(n as u128)?;
    }
    Some(total)
}

fn nth_profile(index: u128, n: usize, l: usize) -> Vec<usize> {
    let mut digits = vec![0usize; l];
    let mut rest = index;
    for d in digits.iter_mut() {
        *d = (rest % n as u128) as usize;
        rest /= n as u128;
    }
    digits
}

/// Payment-minimizing LP for one action profile: nonnegative payments that
/// make the profile incentive compatible and the menu DSIC, at minimum
/// expected payment. None when the profile cannot be incentivized.
fn profile_lp(instance: &Instance, profile: &[usize]) -> Option<(Vec<Contract>, Rational)> {
    let (l, n, m) = (instance.num_types(), instance.num_actions(), instance.num_outcomes());
    let mut lp = LinearProgram::new(Sense::Minimize);
    let p: Vec<Vec<usize>> = (0..l).map(|_| lp.add_vars(m, VarKind::NonNegative)).collect();
    for t in 0..l {
        for w in 0..m {
            lp.objective_coeff(p[t][w], instance.mu(t) * instance.f(t, profile[t], w));
        }
    }
    for t in 0..l {
        for reported in 0..l {
            for a in 0..n {
                if reported == t && a == profile[t] {
                    continue;
                }
                let mut coeffs = Vec::with_capacity(2 * m);
                for w in 0..m {
                    coeffs.push((p[t][w], instance.f(t, profile[t], w).clone()));
                    coeffs.push((p[reported][w], -instance.f(t, a, w)));
                }
                let rhs = instance.cost(t, profile[t]) - instance.cost(t, a);
                lp.add_constraint(coeffs, Relation::Ge, rhs);
            }
        }
    }
    let sol = lp.solve_rational();
    match sol.status {
        LpStatus::Optimal => {
            let contracts = (0..l)
                .map(|t| {
                    Contract::new((0..m).map(|w| sol.primal[p[t][w]].clone()).collect())
                        .expect("LP variables are nonnegative")
                })
                .collect();
            Some((contracts, sol.value))
        }
        _ => None,
    }
}

/// Exact optimum by enumeration over action profiles; refuses when `n^l`
/// exceeds `CONSTANT_TYPES_CAP`.
pub fn solve_constant_types(instance: &Instance) -> Result<(DeterministicMenu, Rational), DetError> {
    let (l, n) = (instance.num_types(), instance.num_actions());
    let count = profile_count(n, l).unwrap_or(u128::MAX);
    if count > CONSTANT_TYPES_CAP {
        return Err(DetError::CapExceeded { required: count, cap: CONSTANT_TYPES_CAP });
    }

    let best = (0..count)
        .into_par_iter()
        .filter_map(|idx| {
            let profile = nth_profile(idx, n, l);
            let (contracts, min_pay) = profile_lp(instance, &profile)?;
            let reward: Rational = (0..l)
                .map(|t| instance.mu(t) * instance.expected_reward(t, profile[t]))
                .sum();
            Some((idx, reward - min_pay, contracts, profile))
        })
        .reduce_with(|a, b| {
            // Highest value; lowest profile index on ties, for determinism.
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("the zero-cost action profile is always incentivizable");

    let (_, value, contracts, profile) = best;
    let menu = DeterministicMenu::with_recommendations(contracts, profile)
        .expect("one recommendation per type");
    debug_assert_eq!(menu_value_deterministic(instance, &menu), value);
    Ok((menu, value))
}

/// The cap-exceeded count `n^l`, for error reporting and feasibility
/// queries.
pub fn constant_types_enumeration(instance: &Instance) -> Option<u128> {
    profile_count(instance.num_actions(), instance.num_types())
}

/// Builds an exactly DSIC menu from an eps-approximate one: blend each
/// contract with the reward vector, then hand every type its favorite of
/// the blended contracts (ties to the lowest type index). The value drops
/// by at most 2*sqrt(eps).
pub fn convert_to_dsic(
    instance: &Instance,
    approx: &DeterministicMenu,
    epsilon: &Rational,
) -> Result<DeterministicMenu, DetError> {
    if approx.recommendations().is_none() {
        return Err(DetError::MissingRecommendations);
    }
    let report = verify_eps_approx(instance, approx, epsilon)
        .map_err(|_| DetError::MissingRecommendations)?;
    if !report.passes() {
        return Err(DetError::NotEpsApproximate(
            report.worst_slack().map(|s| s.slack.clone()).unwrap_or_default(),
        ));
    }

    let mut s = rational_sqrt_upper(epsilon, 64);
    if s > Rational::one() {
        s = Rational::one();
    }
    let blend: Vec<Contract> = approx
        .entries()
        .iter()
        .map(|p| {
            Contract::new(
                p.pay()
                    .iter()
                    .zip(instance.rewards())
                    .map(|(q, r)| (Rational::one() - &s) * q + &s * r)
                    .collect(),
            )
            .expect("blend of nonnegative vectors")
        })
        .collect();

    let mut entries = Vec::with_capacity(instance.num_types());
    let mut recs = Vec::with_capacity(instance.num_types());
    for t in 0..instance.num_types() {
        let mut pick = 0usize;
        let mut pick_utility = agent_best_utility(instance, t, &blend[0]);
        for (i, candidate) in blend.iter().enumerate().skip(1) {
            let u = agent_best_utility(instance, t, candidate);
            if u > pick_utility {
                pick_utility = u;
                pick = i;
            }
        }
        entries.push(blend[pick].clone());
        recs.push(best_response(instance, t, &blend[pick]).action);
    }
    let menu = DeterministicMenu::with_recommendations(entries, recs)
        .expect("one recommendation per type");
    debug_assert!(
        crate::agent::verify_dsic_deterministic(instance, &menu, &Rational::zero()).is_dsic()
    );
    Ok(menu)
}

/// Types whose expected payment under their own contract reaches `threshold`.
#[derive(Debug, Clone)]
pub struct HeavyTypeSet {
    pub threshold: Rational,
    pub members: Vec<usize>,
}

impl HeavyTypeSet {
    pub fn mass(&self, instance: &Instance) -> Rational {
        self.members.iter().map(|&t| instance.mu(t).clone()).sum()
    }
}

pub fn heavy_types(instance: &Instance, menu: &DeterministicMenu, threshold: &Rational) -> HeavyTypeSet {
    let members = (0..instance.num_types())
        .filter(|&t| {
            let br = best_response(instance, t, menu.entry(t));
            instance.expected_payment(t, br.action, menu.entry(t)) >= *threshold
        })
        .collect();
    HeavyTypeSet { threshold: threshold.clone(), members }
}

/// Geometric payment grid per outcome: values `(1-eta)^i * M(w)` for
/// `i in 0..=i_max` plus zero, where `M(w)` is the largest payment the
/// menu makes on outcome `w` and `eta = delta^3 / (64 m)`.
#[derive(Debug, Clone)]
pub struct PaymentGrid {
    pub eta: Rational,
    pub i_max: usize,
    pub ceilings: Vec<Rational>,
    /// `(1-eta)^i` for `i` in `0..=i_max`, strictly decreasing.
    pub factors: Vec<Rational>,
}

impl PaymentGrid {
    pub fn new(instance: &Instance, menu: &DeterministicMenu, delta: &Rational) -> Result<Self, DetError> {
        if !delta.is_positive() || delta > &Rational::one() {
            return Err(DetError::BadDelta);
        }
        let m = instance.num_outcomes();
        let eta = delta * delta * delta / rat_int(64 * m as i64);
        // i_max = smallest i with (1-eta)^i <= eta, i.e. ceil(log eta / log(1-eta)).
        // Powers are tracked unreduced; the base's parts are coprime so the
        // powers are too, and skipping gcds keeps this linear.
        let base = Rational::one() - &eta;
        let (bn, bd) = (base.numer().clone(), base.denom().clone());
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        let mut factors = vec![Rational::one()];
        let mut i_max = 0usize;
        loop {
            num *= &bn;
            den *= &bd;
            i_max += 1;
            let power = Ratio::new_raw(num.clone(), den.clone());
            let done = power <= eta;
            factors.push(power);
            if done {
                break;
            }
        }
        let ceilings = (0..m)
            .map(|w| {
                menu.entries()
                    .iter()
                    .map(|p| p.pay_at(w))
                    .max()
                    .cloned()
                    .unwrap_or_else(Rational::zero)
            })
            .collect();
        Ok(PaymentGrid { eta, i_max, ceilings, factors })
    }

    /// Rounds a payment down onto the grid for outcome `w`; payments below
    /// the smallest grid value drop to zero.
    pub fn round_down(&self, w: usize, payment: &Rational) -> Rational {
        let ceiling = &self.ceilings[w];
        if ceiling.is_zero() || payment < &(&self.factors[self.i_max] * ceiling) {
            return Rational::zero();
        }
        // Smallest i with factors[i] * ceiling <= payment; factors are
        // decreasing, so binary-search the first index at or below target.
        let target = payment / ceiling;
        let mut lo = 0usize;
        let mut hi = self.i_max;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.factors[mid] <= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        &self.factors[lo] * ceiling
    }
}

/// Lowers a DSIC menu onto the payment grid. Light types keep their (now
/// rounded) contracts with their original best response as recommendation;
/// heavy types are reassigned to whichever rounded contract their agent
/// likes best. For a DSIC input the output is a `delta^2/16`-approximate
/// menu of contract-action pairs.
pub fn discretize_menu(
    instance: &Instance,
    menu: &DeterministicMenu,
    delta: &Rational,
) -> Result<DeterministicMenu, DetError> {
    let grid = PaymentGrid::new(instance, menu, delta)?;
    let heavy = heavy_types(instance, menu, &(rat_int(4) / delta));
    let light: Vec<usize> = (0..instance.num_types())
        .filter(|t| !heavy.members.contains(t))
        .collect();

    let m = instance.num_outcomes();
    let mut entries: Vec<Option<Contract>> = vec![None; instance.num_types()];
    let mut recs: Vec<Option<usize>> = vec![None; instance.num_types()];
    for &t in &light {
        let rounded = Contract::new(
            (0..m)
                .map(|w| grid.round_down(w, menu.entry(t).pay_at(w)))
                .collect(),
        )
        .expect("grid values are nonnegative");
        entries[t] = Some(rounded);
        recs[t] = Some(best_response(instance, t, menu.entry(t)).action);
    }
    for &t in &heavy.members {
        let assigned = match light
            .iter()
            .map(|&t2| (t2, agent_best_utility(instance, t, entries[t2].as_ref().unwrap())))
            .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
        {
            Some((t2, _)) => entries[t2].clone().unwrap(),
            // Every type heavy: nothing to reroute to. Zero contract;
            // the guarantee presumes an optimal input, where this cannot
            // happen (heavy mass is at most delta/4).
            None => Contract::zero(m),
        };
        recs[t] = Some(best_response(instance, t, &assigned).action);
        entries[t] = Some(assigned);
    }
    Ok(DeterministicMenu::with_recommendations(
        entries.into_iter().map(Option::unwrap).collect(),
        recs.into_iter().map(Option::unwrap).collect(),
    )
    .expect("one entry per type"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtasMode {
    /// Enumerate (row assignment, action profile) pairs; one LP each.
    AssignmentEnum,
    /// Enumerate candidate vertices from active subsets of each
    /// assignment's hyperplane family. Exponentially slower; micro
    /// instances only.
    VertexEnum,
}

/// Number of distinct contracts the approximation bound asks for. A menu
/// never needs more distinct contracts than types, so the effective row
/// count is the smaller of the two.
pub fn ptas_row_bound(instance: &Instance, delta: &Rational) -> usize {
    let m = instance.num_outcomes() as f64;
    let d = crate::rational::to_f64(delta);
    let x = 64.0 * m / (d * d * d);
    let k_bound = (x * x.ln()).powf(m).ceil();
    if k_bound.is_finite() && k_bound < instance.num_types() as f64 {
        (k_bound as usize).max(1)
    } else {
        instance.num_types()
    }
}

/// Canonical row assignments: restricted growth strings over at most `k`
/// rows, covering every assignment up to row relabeling.
fn canonical_assignments(l: usize, k: usize) -> Vec<Vec<usize>> {
    fn recurse(current: &mut Vec<usize>, pos: usize, max_used: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        let limit = (max_used + 1).min(k - 1);
        for row in 0..=limit {
            current[pos] = row;
            recurse(current, pos + 1, max_used.max(row), k, out);
        }
    }
    assert!(l > 0 && k > 0);
    let mut out = Vec::new();
    let mut current = vec![0usize; l];
    recurse(&mut current, 1, 0, k, &mut out);
    out
}

/// LP over the rows of one (assignment, action profile) pair: maximize
/// principal utility subject to every type preferring its recommended
/// action under its own row to any action under any row.
fn assignment_lp(
    instance: &Instance,
    assignment: &[usize],
    profile: &[usize],
    num_rows: usize,
) -> Option<(Vec<Contract>, Rational)> {
    let (l, n, m) = (instance.num_types(), instance.num_actions(), instance.num_outcomes());
    let mut lp = LinearProgram::new(Sense::Maximize);
    let rows: Vec<Vec<usize>> = (0..num_rows).map(|_| lp.add_vars(m, VarKind::NonNegative)).collect();
    for t in 0..l {
        for w in 0..m {
            lp.objective_coeff(rows[assignment[t]][w], -(instance.mu(t) * instance.f(t, profile[t], w)));
        }
    }
    let reward: Rational = (0..l)
        .map(|t| instance.mu(t) * instance.expected_reward(t, profile[t]))
        .sum();
    for t in 0..l {
        for i in 0..num_rows {
            for a in 0..n {
                if i == assignment[t] && a == profile[t] {
                    continue;
                }
                let mut coeffs = Vec::with_capacity(2 * m);
                for w in 0..m {
                    coeffs.push((rows[assignment[t]][w], instance.f(t, profile[t], w).clone()));
                    coeffs.push((rows[i][w], -instance.f(t, a, w)));
                }
                let rhs = instance.cost(t, profile[t]) - instance.cost(t, a);
                lp.add_constraint(coeffs, Relation::Ge, rhs);
            }
        }
    }
    let sol = lp.solve_rational();
    if sol.status != LpStatus::Optimal {
        return None;
    }
    let contracts = (0..num_rows)
        .map(|i| {
            Contract::new((0..m).map(|w| sol.primal[rows[i][w]].clone()).collect())
                .expect("LP variables are nonnegative")
        })
        .collect();
    Some((contracts, reward + sol.value))
}

/// Best feasible candidate vertex of one assignment's polyhedron, by
/// exhaustive active-set enumeration over its hyperplane family.
fn vertex_enum_best(
    instance: &Instance,
    assignment: &[usize],
    profile: &[usize],
    num_rows: usize,
) -> Option<(Vec<Contract>, Rational)> {
    let (l, n, m) = (instance.num_types(), instance.num_actions(), instance.num_outcomes());
    let dim = num_rows * m;
    let var = |row: usize, w: usize| row * m + w;

    let mut planes: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for t in 0..l {
        for i in 0..num_rows {
            for a in 0..n {
                if i == assignment[t] && a == profile[t] {
                    continue;
                }
                let mut row = vec![Rational::zero(); dim];
                for w in 0..m {
                    row[var(assignment[t], w)] += instance.f(t, profile[t], w);
                    row[var(i, w)] -= instance.f(t, a, w);
                }
                let rhs = instance.cost(t, profile[t]) - instance.cost(t, a);
                planes.push((row, rhs));
            }
        }
    }
    let ineq_count = planes.len();
    for v in 0..dim {
        let mut row = vec![Rational::zero(); dim];
        row[v] = Rational::one();
        planes.push((row, Rational::zero()));
    }

    let feasible = |point: &[Rational]| -> bool {
        point.iter().all(|x| !x.is_negative())
            && planes[..ineq_count].iter().all(|(row, rhs)| {
                let lhs: Rational = row.iter().zip(point).map(|(c, x)| c * x).sum();
                lhs >= *rhs
            })
    };
    let value_of = |point: &[Rational]| -> Rational {
        (0..l)
            .map(|t| {
                let paid: Rational = (0..m)
                    .map(|w| instance.f(t, profile[t], w) * &point[var(assignment[t], w)])
                    .sum();
                instance.mu(t) * (instance.expected_reward(t, profile[t]) - paid)
            })
            .sum()
    };

    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for subset in combinations(planes.len(), dim) {
        let a_rows: Vec<&[Rational]> = subset.iter().map(|&i| planes[i].0.as_slice()).collect();
        let b_vals: Vec<Rational> = subset.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(point) = crate::lp::solve_square_system(&a_rows, &b_vals) {
            if feasible(&point) {
                let v = value_of(&point);
                if best.as_ref().map(|(bv, _)| v > *bv).unwrap_or(true) {
                    best = Some((v, point));
                }
            }
        }
    }
    best.map(|(v, point)| {
        let contracts = (0..num_rows)
            .map(|row| {
                Contract::new((0..m).map(|w| point[var(row, w)].clone()).collect())
                    .expect("feasible point is nonnegative")
            })
            .collect();
        (contracts, v)
    })
}

/// All k-subsets of 0..n in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        out.push(subset.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] < n - (k - i) {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub(crate) fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut result: u128 = 1;
    for i in 0..k.min(n - k) {
        result = result.checked_mul(n - i)?;
        result /= i + 1;
    }
    Some(result)
}

/// Additive approximation for a constant number of outcomes: returns a
/// DSIC menu with value at least the deterministic optimum minus `delta`.
pub fn ptas_constant_outcomes(
    instance: &Instance,
    delta: &Rational,
    mode: PtasMode,
) -> Result<(DeterministicMenu, Rational), DetError> {
    if instance.num_outcomes() > 3 {
        return Err(DetError::TooManyOutcomes(instance.num_outcomes()));
    }
    if !delta.is_positive() || delta > &Rational::one() {
        return Err(DetError::BadDelta);
    }
    let (l, n, m) = (instance.num_types(), instance.num_actions(), instance.num_outcomes());
    let k = ptas_row_bound(instance, delta);
    let assignments = canonical_assignments(l, k);
    let profiles = profile_count(n, l).unwrap_or(u128::MAX);

    let enumeration: u128 = match mode {
        PtasMode::AssignmentEnum => (assignments.len() as u128)
            .checked_mul(profiles)
            .unwrap_or(u128::MAX),
        PtasMode::VertexEnum => {
            let mut total: u128 = 0;
            for assignment in &assignments {
                let rows = assignment.iter().max().map(|&x| x + 1).unwrap_or(1);
                let dim = (rows * m) as u128;
                let planes = (l * rows * n) as u128 + dim;
                let combos = binomial_u128(planes, dim).unwrap_or(u128::MAX);
                total = combos
                    .checked_mul(profiles)
                    .and_then(|x| total.checked_add(x))
                    .unwrap_or(u128::MAX);
            }
            total
        }
    };
    if enumeration > PTAS_CAP {
        return Err(DetError::CapExceeded { required: enumeration, cap: PTAS_CAP });
    }

    let tasks: Vec<(u128, &Vec<usize>, u128)> = assignments
        .iter()
        .enumerate()
        .flat_map(|(ai, assignment)| (0..profiles).map(move |pi| (ai as u128, assignment, pi)))
        .collect();

    let best = tasks
        .par_iter()
        .filter_map(|&(ai, assignment, pi)| {
            let profile = nth_profile(pi, n, l);
            let rows = assignment.iter().max().map(|&x| x + 1).unwrap_or(1);
            let solved = match mode {
                PtasMode::AssignmentEnum => assignment_lp(instance, assignment, &profile, rows),
                PtasMode::VertexEnum => vertex_enum_best(instance, assignment, &profile, rows),
            }?;
            Some((ai * profiles + pi, solved.1, solved.0, assignment, profile))
        })
        .reduce_with(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
        .expect("the zero-cost profile with one shared row is always feasible");

    let (_, value, contracts, assignment, profile) = best;
    let compact = CompactMenu { contracts, assignment: assignment.clone() };
    let menu = DeterministicMenu::with_recommendations(compact.to_menu().entries().to_vec(), profile)
        .expect("one recommendation per type");
    debug_assert!(
        crate::agent::verify_dsic_deterministic(instance, &menu, &Rational::zero()).is_dsic()
    );
    debug_assert!(menu_value_deterministic(instance, &menu) >= value);
    Ok((menu, value))
}
