//! Agent best responses and incentive verification.
//!
//! The agent plays an expected-utility-maximizing action, breaking ties in
//! favor of the principal; residual ties (equal agent and principal
//! utility) break by lowest declared action index so that repeated calls
//! are deterministic.

use crate::model::{Contract, DeterministicMenu, Instance, RandomizedMenu};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("menu has no action recommendations")]
    MissingRecommendations,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    /// The action the agent plays.
    pub action: usize,
    /// `max_a sum_w F[t][a][w] p_w - c[t][a]`.
    pub agent_utility: Rational,
    /// Principal's expected utility when `action` is played.
    pub principal_utility: Rational,
    /// All utility-maximizing actions, in declared order.
    pub tied_set: Vec<usize>,
}

/// Agent utility of a fixed action under a contract.
pub fn action_utility(instance: &Instance, t: usize, a: usize, p: &Contract) -> Rational {
    instance.expected_payment(t, a, p) - instance.cost(t, a)
}

/// Principal utility of a fixed action under a contract.
pub fn action_principal_utility(instance: &Instance, t: usize, a: usize, p: &Contract) -> Rational {
    instance
        .dist_row(t, a)
        .iter()
        .zip(instance.rewards().iter().zip(p.pay()))
        .map(|(f, (r, q))| f * (r - q))
        .sum()
}

pub fn best_response(instance: &Instance, t: usize, p: &Contract) -> BestResponse {
    debug_assert_eq!(p.len(), instance.num_outcomes());
    let mut tied_set: Vec<usize> = Vec::new();
    let mut best_utility: Option<Rational> = None;
    for a in 0..instance.num_actions() {
        let u = action_utility(instance, t, a, p);
        match &best_utility {
            Some(best) if &u < best => {}
            Some(best) if &u == best => tied_set.push(a),
            _ => {
                best_utility = Some(u);
                tied_set = vec![a];
            }
        }
    }
    let agent_utility = best_utility.expect("instance has at least one action");
    let mut action = tied_set[0];
    let mut principal_utility = action_principal_utility(instance, t, action, p);
    for &a in &tied_set[1..] {
        let v = action_principal_utility(instance, t, a, p);
        if v > principal_utility {
            principal_utility = v;
            action = a;
        }
    }
    BestResponse { action, agent_utility, principal_utility, tied_set }
}

/// Best-response agent utility: `max_a sum_w F p - c`.
pub fn agent_best_utility(instance: &Instance, t: usize, p: &Contract) -> Rational {
    (0..instance.num_actions())
        .map(|a| action_utility(instance, t, a, p))
        .max()
        .expect("instance has at least one action")
}

/// Expected best-response utility of type `t` under a randomized contract.
pub fn agent_utility_randomized(
    instance: &Instance,
    t: usize,
    support: &[(Contract, Rational)],
) -> Rational {
    support
        .iter()
        .map(|(p, w)| w * agent_best_utility(instance, t, p))
        .sum()
}

/// Expected principal utility contributed by type `t` under a randomized
/// contract (not weighted by `mu`).
pub fn principal_utility_randomized(
    instance: &Instance,
    t: usize,
    support: &[(Contract, Rational)],
) -> Rational {
    support
        .iter()
        .map(|(p, w)| w * best_response(instance, t, p).principal_utility)
        .sum()
}

/// Principal's expected utility of a menu of randomized contracts.
pub fn menu_value(instance: &Instance, menu: &RandomizedMenu) -> Rational {
    (0..instance.num_types())
        .map(|t| instance.mu(t) * principal_utility_randomized(instance, t, menu.entry(t)))
        .sum()
}

pub fn menu_value_deterministic(instance: &Instance, menu: &DeterministicMenu) -> Rational {
    (0..instance.num_types())
        .map(|t| instance.mu(t) * best_response(instance, t, menu.entry(t)).principal_utility)
        .sum()
}

/// Slack of one DSIC constraint: truthful utility minus misreport utility.
#[derive(Debug, Clone)]
pub struct DsicSlack {
    pub truthful: usize,
    pub reported: usize,
    pub slack: Rational,
}

#[derive(Debug, Clone)]
pub struct DsicReport {
    pub slacks: Vec<DsicSlack>,
    pub tol: Rational,
}

impl DsicReport {
    pub fn is_dsic(&self) -> bool {
        let bound = -self.tol.clone();
        self.slacks.iter().all(|s| s.slack >= bound)
    }

    pub fn worst_slack(&self) -> Option<&DsicSlack> {
        self.slacks.iter().min_by(|a, b| a.slack.cmp(&b.slack))
    }

    pub fn violations(&self) -> impl Iterator<Item = &DsicSlack> {
        let bound = -self.tol.clone();
        self.slacks.iter().filter(move |s| s.slack < bound)
    }
}

/// Checks the DSIC conditions of a menu of randomized contracts: for every
/// ordered pair of types, truthful reporting must be at least as good as
/// misreporting, within `tol`.
pub fn verify_dsic(instance: &Instance, menu: &RandomizedMenu, tol: &Rational) -> DsicReport {
    let own: Vec<Rational> = (0..instance.num_types())
        .map(|t| agent_utility_randomized(instance, t, menu.entry(t)))
        .collect();
    let mut slacks = Vec::new();
    for t in 0..instance.num_types() {
        for reported in 0..instance.num_types() {
            if t == reported {
                continue;
            }
            let misreport = agent_utility_randomized(instance, t, menu.entry(reported));
            slacks.push(DsicSlack {
                truthful: t,
                reported,
                slack: &own[t] - misreport,
            });
        }
    }
    DsicReport { slacks, tol: tol.clone() }
}

/// Deterministic menus are verified through point-mass wrapping.
pub fn verify_dsic_deterministic(
    instance: &Instance,
    menu: &DeterministicMenu,
    tol: &Rational,
) -> DsicReport {
    verify_dsic(instance, &menu.to_randomized(), tol)
}

#[derive(Debug, Clone)]
pub struct EpsApproxReport {
    /// Slack of each relaxed constraint, including the epsilon term;
    /// nonnegative everywhere means the menu passes at this epsilon.
    pub slacks: Vec<DsicSlack>,
    pub epsilon: Rational,
}

impl EpsApproxReport {
    pub fn passes(&self) -> bool {
        self.slacks.iter().all(|s| !s.slack.is_negative())
    }

    pub fn worst_slack(&self) -> Option<&DsicSlack> {
        self.slacks.iter().min_by(|a, b| a.slack.cmp(&b.slack))
    }
}

use num_traits::Signed;

/// Checks the relaxed incentive conditions of a menu of contract-action
/// pairs: for all ordered type pairs, including a type against itself,
///
/// `F[t][rec(t)] . p^t - c[t][rec(t)] >= U^t(p^reported) - epsilon`
///
/// where the right-hand side uses the agent's best response.
pub fn verify_eps_approx(
    instance: &Instance,
    menu: &DeterministicMenu,
    epsilon: &Rational,
) -> Result<EpsApproxReport, AgentError> {
    let recs = menu.recommendations().ok_or(AgentError::MissingRecommendations)?;
    let own_rec: Vec<Rational> = (0..instance.num_types())
        .map(|t| action_utility(instance, t, recs[t], menu.entry(t)))
        .collect();
    let mut slacks = Vec::new();
    for t in 0..instance.num_types() {
        for reported in 0..instance.num_types() {
            let rhs = agent_best_utility(instance, t, menu.entry(reported));
            slacks.push(DsicSlack {
                truthful: t,
                reported,
                slack: &own_rec[t] - rhs + epsilon,
            });
        }
    }
    Ok(EpsApproxReport { slacks, epsilon: epsilon.clone() })
}

/// Principal's expected utility of a recommendation menu, assuming each
/// type truthfully reports and plays its recommended action.
pub fn recommendation_value(instance: &Instance, menu: &DeterministicMenu) -> Result<Rational, AgentError> {
    let recs = menu.recommendations().ok_or(AgentError::MissingRecommendations)?;
    Ok((0..instance.num_types())
        .map(|t| instance.mu(t) * action_principal_utility(instance, t, recs[t], menu.entry(t)))
        .sum())
}
