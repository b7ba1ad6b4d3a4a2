//! Problem instances, contracts, and menus.
//!
//! An instance is the tuple (types, actions, outcomes) together with the
//! type distribution `mu`, the outcome distributions `F[type][action]`, the
//! action costs and the outcome rewards. All numbers are exact rationals.
//! Identifiers are strings; everything internal is indexed by position in
//! the declared order, which also fixes tie-breaking.

use crate::rational::{rational_bits, to_f64, Rational};
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("negative payment at outcome index {0}")]
    NegativePayment(usize),
    #[error("randomized entry weights for type `{0}` do not sum to 1")]
    WeightsNotNormalized(String),
    #[error("negative weight in randomized entry for type `{0}`")]
    NegativeWeight(String),
    #[error("duplicate support contract in randomized entry for type `{0}`")]
    DuplicateSupport(String),
}

/// A Bayesian principal-agent problem instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    types: Vec<String>,
    actions: Vec<String>,
    outcomes: Vec<String>,
    /// `mu[t]`: probability of type `t`.
    mu: Vec<Rational>,
    /// `dist[t][a][w]`: probability of outcome `w` under action `a` for type `t`.
    dist: Vec<Vec<Vec<Rational>>>,
    /// `cost[t][a]`: cost of action `a` for type `t`.
    cost: Vec<Vec<Rational>>,
    /// `reward[w]`: principal reward of outcome `w`.
    reward: Vec<Rational>,
}

impl Instance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        types: Vec<String>,
        actions: Vec<String>,
        outcomes: Vec<String>,
        mu: Vec<Rational>,
        dist: Vec<Vec<Vec<Rational>>>,
        cost: Vec<Vec<Rational>>,
        reward: Vec<Rational>,
    ) -> Result<Self, ModelError> {
        let (l, n, m) = (types.len(), actions.len(), outcomes.len());
        if l == 0 || n == 0 || m == 0 {
            return Err(ModelError::Shape("types, actions and outcomes must be non-empty".into()));
        }
        if mu.len() != l {
            return Err(ModelError::Shape(format!("mu has {} entries, expected {l}", mu.len())));
        }
        if dist.len() != l || dist.iter().any(|rows| rows.len() != n) {
            return Err(ModelError::Shape("dist must have one row per (type, action)".into()));
        }
        if let Some((t, a)) = dist
            .iter()
            .enumerate()
            .flat_map(|(t, rows)| rows.iter().enumerate().map(move |(a, row)| (t, a, row.len())))
            .find_map(|(t, a, len)| (len != m).then_some((t, a)))
        {
            return Err(ModelError::Shape(format!(
                "dist[{}][{}] has wrong length",
                types[t], actions[a]
            )));
        }
        if cost.len() != l || cost.iter().any(|row| row.len() != n) {
            return Err(ModelError::Shape("cost must have one entry per (type, action)".into()));
        }
        if reward.len() != m {
            return Err(ModelError::Shape(format!("reward has {} entries, expected {m}", reward.len())));
        }
        Ok(Instance { types, actions, outcomes, mu, dist, cost, reward })
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn mu(&self, t: usize) -> &Rational {
        &self.mu[t]
    }

    pub fn f(&self, t: usize, a: usize, w: usize) -> &Rational {
        &self.dist[t][a][w]
    }

    pub fn dist_row(&self, t: usize, a: usize) -> &[Rational] {
        &self.dist[t][a]
    }

    pub fn cost(&self, t: usize, a: usize) -> &Rational {
        &self.cost[t][a]
    }

    pub fn reward(&self, w: usize) -> &Rational {
        &self.reward[w]
    }

    pub fn rewards(&self) -> &[Rational] {
        &self.reward
    }

    pub fn type_index(&self, name: &str) -> Option<usize> {
        self.types.iter().position(|t| t == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn outcome_index(&self, name: &str) -> Option<usize> {
        self.outcomes.iter().position(|w| w == name)
    }

    /// Expected reward when type `t` takes action `a`.
    pub fn expected_reward(&self, t: usize, a: usize) -> Rational {
        self.dist[t][a]
            .iter()
            .zip(&self.reward)
            .map(|(f, r)| f * r)
            .sum()
    }

    /// Expected payment of contract `p` when type `t` takes action `a`.
    pub fn expected_payment(&self, t: usize, a: usize, p: &Contract) -> Rational {
        self.dist[t][a]
            .iter()
            .zip(p.pay())
            .map(|(f, q)| f * q)
            .sum()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn instance_size(&self) -> InstanceSize {
        instance_size(self)
    }

    /// All rational entries of the instance (mu, dist, cost, reward).
    pub(crate) fn iter_rationals(&self) -> impl Iterator<Item = &Rational> {
        self.mu
            .iter()
            .chain(self.dist.iter().flatten().flatten())
            .chain(self.cost.iter().flatten())
            .chain(self.reward.iter())
    }
}

/// A nonnegative payment vector indexed by outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Contract {
    pay: Vec<Rational>,
}

impl Contract {
    pub fn new(pay: Vec<Rational>) -> Result<Self, ModelError> {
        if let Some(w) = pay.iter().position(|x| x.is_negative()) {
            return Err(ModelError::NegativePayment(w));
        }
        Ok(Contract { pay })
    }

    pub fn zero(m: usize) -> Self {
        Contract { pay: vec![Rational::zero(); m] }
    }

    pub fn pay(&self) -> &[Rational] {
        &self.pay
    }

    pub fn pay_at(&self, w: usize) -> &Rational {
        &self.pay[w]
    }

    pub fn len(&self) -> usize {
        self.pay.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pay.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.pay.iter().all(|x| x.is_zero())
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.pay.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let v = to_f64(x);
            if v != 0.0 && (v.abs() >= 1e6 || v.abs() < 1e-4) {
                write!(f, "{v:.4e}")?;
            } else {
                write!(f, "{v:.6}")?;
            }
        }
        write!(f, "]")
    }
}

/// One contract per type, optionally with a recommended action per type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicMenu {
    entries: Vec<Contract>,
    recommendations: Option<Vec<usize>>,
}

impl DeterministicMenu {
    pub fn new(entries: Vec<Contract>) -> Self {
        DeterministicMenu { entries, recommendations: None }
    }

    pub fn with_recommendations(entries: Vec<Contract>, recommendations: Vec<usize>) -> Result<Self, ModelError> {
        if recommendations.len() != entries.len() {
            return Err(ModelError::Shape("one recommendation per type required".into()));
        }
        Ok(DeterministicMenu { entries, recommendations: Some(recommendations) })
    }

    /// The same single contract offered to every type.
    pub fn uniform(num_types: usize, contract: Contract) -> Self {
        DeterministicMenu { entries: vec![contract; num_types], recommendations: None }
    }

    pub fn all_zero(num_types: usize, num_outcomes: usize) -> Self {
        Self::uniform(num_types, Contract::zero(num_outcomes))
    }

    pub fn entries(&self) -> &[Contract] {
        &self.entries
    }

    pub fn entry(&self, t: usize) -> &Contract {
        &self.entries[t]
    }

    pub fn recommendations(&self) -> Option<&[usize]> {
        self.recommendations.as_deref()
    }

    pub fn num_types(&self) -> usize {
        self.entries.len()
    }

    /// Point-mass wrapping into a menu of randomized contracts.
    pub fn to_randomized(&self) -> RandomizedMenu {
        RandomizedMenu {
            entries: self
                .entries
                .iter()
                .map(|p| vec![(p.clone(), Rational::one())])
                .collect(),
        }
    }
}

/// One finitely supported distribution over contracts per type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedMenu {
    entries: Vec<Vec<(Contract, Rational)>>,
}

impl RandomizedMenu {
    pub fn new(entries: Vec<Vec<(Contract, Rational)>>, types: &[String]) -> Result<Self, ModelError> {
        if entries.len() != types.len() {
            return Err(ModelError::Shape("one randomized entry per type required".into()));
        }
        for (t, entry) in entries.iter().enumerate() {
            let mut total = Rational::zero();
            for (i, (p, w)) in entry.iter().enumerate() {
                if w.is_negative() {
                    return Err(ModelError::NegativeWeight(types[t].clone()));
                }
                total += w;
                if entry[..i].iter().any(|(q, _)| q == p) {
                    return Err(ModelError::DuplicateSupport(types[t].clone()));
                }
            }
            if !total.is_one() {
                return Err(ModelError::WeightsNotNormalized(types[t].clone()));
            }
        }
        Ok(RandomizedMenu { entries })
    }

    /// Internal constructor for solver output whose invariants hold by
    /// construction.
    pub(crate) fn from_raw(entries: Vec<Vec<(Contract, Rational)>>) -> Self {
        RandomizedMenu { entries }
    }

    pub fn entries(&self) -> &[Vec<(Contract, Rational)>] {
        &self.entries
    }

    pub fn entry(&self, t: usize) -> &[(Contract, Rational)] {
        &self.entries[t]
    }

    pub fn num_types(&self) -> usize {
        self.entries.len()
    }

    pub fn max_support(&self) -> usize {
        self.entries.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Total bit-length of all rational numerators and denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSize {
    pub bits: u64,
}

pub fn instance_size(instance: &Instance) -> InstanceSize {
    InstanceSize {
        bits: instance.iter_rationals().map(rational_bits).sum(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Some `dist[type][action]` does not sum to one.
    NotStochastic { type_: String, action: String, total: Rational },
    NegativeProbability { type_: String, action: String, outcome: String },
    MuNotNormalized { total: Rational },
    NegativeMu { type_: String },
    CostOutOfRange { type_: String, action: String, cost: Rational },
    RewardOutOfRange { outcome: String, reward: Rational },
    /// Assumption: some action must have zero cost for every type.
    NoSharedZeroCostAction,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotStochastic { type_, action, total } => write!(
                f,
                "distribution not stochastic for ({type_}, {action}): sums to {}",
                crate::rational::format_rational(total)
            ),
            Violation::NegativeProbability { type_, action, outcome } => {
                write!(f, "negative probability at ({type_}, {action}, {outcome})")
            }
            Violation::MuNotNormalized { total } => write!(
                f,
                "type distribution sums to {}",
                crate::rational::format_rational(total)
            ),
            Violation::NegativeMu { type_ } => write!(f, "negative probability for type {type_}"),
            Violation::CostOutOfRange { type_, action, cost } => write!(
                f,
                "cost out of [0,1] for ({type_}, {action}): {}",
                crate::rational::format_rational(cost)
            ),
            Violation::RewardOutOfRange { outcome, reward } => write!(
                f,
                "reward out of [0,1] for {outcome}: {}",
                crate::rational::format_rational(reward)
            ),
            Violation::NoSharedZeroCostAction => {
                write!(f, "no action has zero cost for every type")
            }
        }
    }
}

/// Result of `validate`: the violated invariants, and when there are none,
/// a normalized copy with zero-probability types and never-occurring
/// outcomes stripped.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub normalized: Option<Instance>,
    /// Names of stripped zero-probability types.
    pub stripped_types: Vec<String>,
    /// Names of stripped never-occurring outcomes.
    pub stripped_outcomes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let one = Rational::one();

    let mu_total: Rational = instance.mu.iter().sum();
    if mu_total != one {
        violations.push(Violation::MuNotNormalized { total: mu_total });
    }
    for (t, mu) in instance.mu.iter().enumerate() {
        if mu.is_negative() {
            violations.push(Violation::NegativeMu { type_: instance.types[t].clone() });
        }
    }

    let kept_types: Vec<usize> = (0..instance.num_types())
        .filter(|&t| instance.mu[t].is_positive())
        .collect();

    for &t in &kept_types {
        for a in 0..instance.num_actions() {
            let row = &instance.dist[t][a];
            for (w, p) in row.iter().enumerate() {
                if p.is_negative() {
                    violations.push(Violation::NegativeProbability {
                        type_: instance.types[t].clone(),
                        action: instance.actions[a].clone(),
                        outcome: instance.outcomes[w].clone(),
                    });
                }
            }
            let total: Rational = row.iter().sum();
            if total != one {
                violations.push(Violation::NotStochastic {
                    type_: instance.types[t].clone(),
                    action: instance.actions[a].clone(),
                    total,
                });
            }
            let c = &instance.cost[t][a];
            if c.is_negative() || c > &one {
                violations.push(Violation::CostOutOfRange {
                    type_: instance.types[t].clone(),
                    action: instance.actions[a].clone(),
                    cost: c.clone(),
                });
            }
        }
    }

    let kept_outcomes: Vec<usize> = (0..instance.num_outcomes())
        .filter(|&w| {
            kept_types
                .iter()
                .any(|&t| (0..instance.num_actions()).any(|a| instance.dist[t][a][w].is_positive()))
        })
        .collect();

    for &w in &kept_outcomes {
        let r = &instance.reward[w];
        if r.is_negative() || r > &one {
            violations.push(Violation::RewardOutOfRange {
                outcome: instance.outcomes[w].clone(),
                reward: r.clone(),
            });
        }
    }

    if !kept_types.is_empty() {
        let has_free_action = (0..instance.num_actions())
            .any(|a| kept_types.iter().all(|&t| instance.cost[t][a].is_zero()));
        if !has_free_action {
            violations.push(Violation::NoSharedZeroCostAction);
        }
    }

    let stripped_types: Vec<String> = (0..instance.num_types())
        .filter(|t| !kept_types.contains(t))
        .map(|t| instance.types[t].clone())
        .collect();
    let stripped_outcomes: Vec<String> = (0..instance.num_outcomes())
        .filter(|w| !kept_outcomes.contains(w))
        .map(|w| instance.outcomes[w].clone())
        .collect();

    let normalized = if violations.is_empty() {
        Some(strip(instance, &kept_types, &kept_outcomes))
    } else {
        None
    };

    ValidationReport { violations, normalized, stripped_types, stripped_outcomes }
}

fn strip(instance: &Instance, kept_types: &[usize], kept_outcomes: &[usize]) -> Instance {
    Instance {
        types: kept_types.iter().map(|&t| instance.types[t].clone()).collect(),
        actions: instance.actions.clone(),
        outcomes: kept_outcomes.iter().map(|&w| instance.outcomes[w].clone()).collect(),
        mu: kept_types.iter().map(|&t| instance.mu[t].clone()).collect(),
        dist: kept_types
            .iter()
            .map(|&t| {
                (0..instance.num_actions())
                    .map(|a| kept_outcomes.iter().map(|&w| instance.dist[t][a][w].clone()).collect())
                    .collect()
            })
            .collect(),
        cost: kept_types.iter().map(|&t| instance.cost[t].clone()).collect(),
        reward: kept_outcomes.iter().map(|&w| instance.reward[w].clone()).collect(),
    }
}
