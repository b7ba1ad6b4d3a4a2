//! Instance generators: the no-maximum fixture, seeded random instances,
//! and the bounded-degree independent-set reduction.

use crate::agent::agent_best_utility;
use crate::model::{Contract, DeterministicMenu, Instance, RandomizedMenu};
use crate::rational::{rat, rat_int, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("vertex {vertex} has degree {degree}, above the allowed {max}")]
    DegreeExceeded { vertex: usize, degree: usize, max: usize },
    #[error("alpha must lie in (0, 1]")]
    BadAlpha,
    #[error("edge references vertex {0} outside 1..={1}")]
    BadVertex(usize, usize),
    #[error("independent set contains adjacent vertices {0} and {1}")]
    NotIndependent(usize, usize),
    #[error("epsilon must lie in (0, 1/3] for the reference menu")]
    BadEpsilon,
    #[error("graph JSON: {0}")]
    GraphJson(String),
    #[error("construction produced a negative cost; graph too large for these parameters")]
    NegativeCost,
}

/// The three-type, three-action, four-outcome instance on which the
/// optimal menu of randomized contracts is a supremum that is not attained.
/// Every transition is deterministic; rewards are (1, 3/4, 0, 0).
pub fn no_maximum_fixture() -> Instance {
    let point = |w: usize| -> Vec<Rational> {
        (0..4).map(|i| if i == w { Rational::one() } else { Rational::zero() }).collect()
    };
    Instance::new(
        vec!["theta1".into(), "theta2".into(), "theta3".into()],
        vec!["a1".into(), "a2".into(), "a3".into()],
        vec!["w1".into(), "w2".into(), "w3".into(), "w4".into()],
        vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        vec![
            vec![point(0), point(2), point(2)],
            vec![point(0), point(1), point(3)],
            vec![point(1), point(2), point(2)],
        ],
        vec![
            vec![rat_int(0), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat_int(0)],
            vec![rat(1, 4), rat_int(0), rat_int(0)],
        ],
        vec![rat_int(1), rat(3, 4), rat_int(0), rat_int(0)],
    )
    .expect("fixture is well-formed")
}

/// The DSIC menu of randomized contracts from the non-attainment argument,
/// worth exactly 3/4 - epsilon on the no-maximum fixture. Requires
/// `0 < epsilon <= 1/3`.
pub fn no_maximum_proof_menu(instance: &Instance, epsilon: &Rational) -> RandomizedMenu {
    assert!(epsilon.is_positive() && epsilon <= &rat(1, 3));
    let p1 = Contract::zero(4);
    let p2 = Contract::new(vec![
        Rational::zero(),
        Rational::zero(),
        Rational::zero(),
        rat_int(1) / (rat_int(12) * epsilon),
    ])
    .unwrap();
    let p3 = Contract::new(vec![Rational::zero(), rat(1, 4), Rational::zero(), Rational::zero()]).unwrap();
    let w2 = rat_int(3) * epsilon;
    let mut theta2 = vec![(p2, w2.clone())];
    if !(Rational::one() - &w2).is_zero() {
        theta2.push((p1.clone(), Rational::one() - w2));
    }
    RandomizedMenu::new(
        vec![vec![(p1, Rational::one())], theta2, vec![(p3, Rational::one())]],
        instance.types(),
    )
    .expect("reference menu is well-formed")
}

#[derive(Debug, Clone)]
pub struct RandomParams {
    pub num_types: usize,
    pub num_actions: usize,
    pub num_outcomes: usize,
    pub seed: u64,
    /// Fraction of outcome probabilities forced to zero.
    pub sparsity: f64,
}

/// Seeded random instance: stochastic rows with denominator-16 weights, a
/// shared zero-cost action, every outcome reachable, rewards in `[0, 1]`
/// with at least one outcome worth 1.
pub fn random_instance(params: &RandomParams) -> Instance {
    let (l, n, m) = (params.num_types, params.num_actions, params.num_outcomes);
    assert!(l > 0 && n > 0 && m > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mu_weights: Vec<i64> = (0..l).map(|_| rng.gen_range(1..=16)).collect();
    let mu_total: i64 = mu_weights.iter().sum();
    let mu: Vec<Rational> = mu_weights.iter().map(|&w| rat(w, mu_total)).collect();

    let mut weights = vec![vec![vec![0i64; m]; n]; l];
    for row in weights.iter_mut().flatten() {
        for x in row.iter_mut() {
            if !rng.gen_bool(params.sparsity.clamp(0.0, 1.0)) {
                *x = rng.gen_range(1..=16);
            }
        }
        if row.iter().all(|&x| x == 0) {
            let w = rng.gen_range(0..m);
            row[w] = rng.gen_range(1..=16);
        }
    }
    // Every outcome must occur with positive probability somewhere.
    for w in 0..m {
        let reached = weights.iter().flatten().any(|row| row[w] > 0);
        if !reached {
            let t = rng.gen_range(0..l);
            let a = rng.gen_range(0..n);
            weights[t][a][w] = rng.gen_range(1..=16);
        }
    }
    let dist: Vec<Vec<Vec<Rational>>> = weights
        .iter()
        .map(|rows| {
            rows.iter()
                .map(|row| {
                    let total: i64 = row.iter().sum();
                    row.iter().map(|&x| rat(x, total)).collect()
                })
                .collect()
        })
        .collect();

    let cost: Vec<Vec<Rational>> = (0..l)
        .map(|_| {
            (0..n)
                .map(|a| if a == 0 { Rational::zero() } else { rat(rng.gen_range(0..=16), 16) })
                .collect()
        })
        .collect();

    let top = rng.gen_range(0..m);
    let reward: Vec<Rational> = (0..m)
        .map(|w| if w == top { Rational::one() } else { rat(rng.gen_range(0..=16), 16) })
        .collect();

    Instance::new(
        (0..l).map(|t| format!("t{t}")).collect(),
        (0..n).map(|a| format!("a{a}")).collect(),
        (0..m).map(|w| format!("w{w}")).collect(),
        mu,
        dist,
        cost,
        reward,
    )
    .expect("generated instance is well-formed")
}

/// Undirected graph on vertices 1..=num_vertices.
#[derive(Debug, Clone)]
pub struct Graph {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub independent_set: Option<Vec<usize>>,
}

impl Graph {
    pub fn cycle(n: usize) -> Self {
        Graph {
            num_vertices: n,
            edges: (1..=n).map(|v| (v, v % n + 1)).collect(),
            independent_set: None,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, GenError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| GenError::GraphJson(e.to_string()))?;
        let num_vertices = v
            .get("vertices")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| GenError::GraphJson("missing integer field `vertices`".into()))?
            as usize;
        let edges = v
            .get("edges")
            .and_then(|x| x.as_array())
            .ok_or_else(|| GenError::GraphJson("missing array field `edges`".into()))?
            .iter()
            .map(|e| {
                let pair = e.as_array().filter(|p| p.len() == 2);
                match pair {
                    Some(p) => match (p[0].as_u64(), p[1].as_u64()) {
                        (Some(a), Some(b)) => Ok((a as usize, b as usize)),
                        _ => Err(GenError::GraphJson("edge endpoints must be integers".into())),
                    },
                    None => Err(GenError::GraphJson("each edge must be a pair".into())),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let independent_set = match v.get("independent_set") {
            Some(arr) => Some(
                arr.as_array()
                    .ok_or_else(|| GenError::GraphJson("independent_set must be an array".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|u| u as usize)
                            .ok_or_else(|| GenError::GraphJson("independent_set entries must be integers".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        Ok(Graph { num_vertices, edges, independent_set })
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone)]
pub struct HardnessParams {
    /// Maximum vertex degree the promise problem allows.
    pub max_degree: usize,
    pub alpha: Rational,
    /// Trig values are rounded down to multiples of 2^-trig_bits.
    pub trig_bits: u32,
}

impl Default for HardnessParams {
    fn default() -> Self {
        HardnessParams { max_degree: 2, alpha: rat(1, 2), trig_bits: 40 }
    }
}

/// Output of the reduction: the instance, per-type construction actions
/// (the remaining global actions are padding that is never attractive),
/// and, when an independent set was supplied, the witness menu and the
/// utility bound the completeness argument asserts asymptotically.
#[derive(Debug, Clone)]
pub struct HardnessInstance {
    pub instance: Instance,
    pub witness: Option<DeterministicMenu>,
    pub claimed_bound: Option<Rational>,
    /// Construction action indices per type: `a_v`, one `a_{u,i}` per
    /// neighbor and index, plus the free action.
    pub real_actions: Vec<Vec<usize>>,
    pub l: usize,
    pub rho: Rational,
}

/// cos(pi v / (2 s)) and sin(pi v / (2 s)) rounded down to 2^-bits.
fn trig_approx(v: usize, s: usize, bits: u32) -> (Rational, Rational) {
    // pi to 30 decimal digits; the Taylor tail below is cut far beyond the
    // rounding grid, so the floor is taken on a value much closer to the
    // true one than one grid step.
    let pi = Rational::new(
        "3141592653589793238462643383280".parse::<BigInt>().unwrap(),
        BigInt::from(10u8).pow(30),
    );
    let x = pi * rat_int(v as i64) / rat_int(2 * s as i64);
    let cutoff = Rational::new(BigInt::one(), BigInt::one() << 120);
    let x2 = &x * &x;

    let mut cos_sum = Rational::one();
    let mut term = Rational::one();
    let mut k = 0i64;
    loop {
        k += 1;
        term = term * &x2 / rat_int((2 * k - 1) * 2 * k);
        if term < cutoff {
            break;
        }
        if k % 2 == 1 {
            cos_sum -= &term;
        } else {
            cos_sum += &term;
        }
    }

    let mut sin_sum = x.clone();
    let mut term = x.clone();
    let mut k = 0i64;
    loop {
        k += 1;
        term = term * &x2 / rat_int(2 * k * (2 * k + 1));
        if term < cutoff {
            break;
        }
        if k % 2 == 1 {
            sin_sum -= &term;
        } else {
            sin_sum += &term;
        }
    }

    let grid = BigInt::one() << bits;
    let floor_to_grid = |x: &Rational| -> Rational {
        let scaled = (x * Rational::from_integer(grid.clone())).floor();
        Rational::new(scaled.to_integer().max(BigInt::zero()), grid.clone())
    };
    (floor_to_grid(&cos_sum), floor_to_grid(&sin_sum))
}

/// Power 2^-e as an exact rational.
fn pow2_neg(e: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << e)
}

pub fn gen_hardness(graph: &Graph, params: &HardnessParams) -> Result<HardnessInstance, GenError> {
    if !params.alpha.is_positive() || params.alpha > Rational::one() {
        return Err(GenError::BadAlpha);
    }
    let s = graph.num_vertices;
    for &(a, b) in &graph.edges {
        if a == 0 || a > s {
            return Err(GenError::BadVertex(a, s));
        }
        if b == 0 || b > s {
            return Err(GenError::BadVertex(b, s));
        }
    }
    let neighbors: Vec<Vec<usize>> = (1..=s).map(|v| graph.neighbors(v)).collect();
    for (v, nb) in neighbors.iter().enumerate() {
        if nb.len() > params.max_degree {
            return Err(GenError::DegreeExceeded {
                vertex: v + 1,
                degree: nb.len(),
                max: params.max_degree,
            });
        }
    }

    // l = ceil(k / alpha), rho = s^-3.
    let k_over_alpha = rat_int(params.max_degree as i64) / &params.alpha;
    let l = k_over_alpha.ceil().to_integer().try_into().unwrap_or(usize::MAX);
    let l: usize = l;
    if l < 4 {
        // Indices i range over [l-3]; an empty range degenerates the
        // construction, so reject rather than emit a trivial instance.
        return Err(GenError::BadAlpha);
    }
    let rho = Rational::new(BigInt::one(), BigInt::from(s).pow(3));

    let trig: Vec<(Rational, Rational)> =
        (1..=s).map(|v| trig_approx(v, s, params.trig_bits)).collect();

    // Global action set: a_v per vertex, a_{u,i} per vertex and index, and
    // the shared free action. Types not adjacent to u get a padding row on
    // a_{u,i} (never attractive: the free action dominates it).
    let mut action_names: Vec<String> = (1..=s).map(|v| format!("a_v{v}")).collect();
    let idx_range = l - 3;
    for u in 1..=s {
        for i in 1..=idx_range {
            action_names.push(format!("a_u{u}_i{i}"));
        }
    }
    action_names.push("a_free".into());
    let n = action_names.len();
    let vertex_action = |v: usize| v - 1;
    let pair_action = |u: usize, i: usize| s + (u - 1) * idx_range + (i - 1);
    let free_action = n - 1;

    let point_w4 = || vec![Rational::zero(), Rational::zero(), Rational::zero(), Rational::one()];
    let mut dist = Vec::with_capacity(s);
    let mut cost = Vec::with_capacity(s);
    let mut real_actions = Vec::with_capacity(s);
    for v in 1..=s {
        let mut rows = vec![point_w4(); n];
        let mut costs = vec![Rational::one(); n];
        let mut real = Vec::new();

        let (cos_v, sin_v) = &trig[v - 1];
        let quarter = rat(1, 4);
        let row_v = vec![
            cos_v * &quarter,
            sin_v * &quarter,
            quarter.clone(),
            Rational::one() - cos_v * &quarter - sin_v * &quarter - &quarter,
        ];
        let c_v = &quarter - &rho * rat_int(l as i64) * pow2_neg(l);
        if c_v.is_negative() || row_v[3].is_negative() {
            return Err(GenError::NegativeCost);
        }
        rows[vertex_action(v)] = row_v;
        costs[vertex_action(v)] = c_v;
        real.push(vertex_action(v));

        for &u in &neighbors[v - 1] {
            let (cos_u, sin_u) = &trig[u - 1];
            for i in 1..=idx_range {
                let scale = pow2_neg(i + 2);
                let row = vec![
                    cos_u * &scale,
                    sin_u * &scale,
                    scale.clone(),
                    Rational::one() - cos_u * &scale - sin_u * &scale - &scale,
                ];
                let c = &scale - &rho * rat_int((l - i) as i64) * pow2_neg(l);
                if c.is_negative() || row[3].is_negative() {
                    return Err(GenError::NegativeCost);
                }
                rows[pair_action(u, i)] = row;
                costs[pair_action(u, i)] = c;
                real.push(pair_action(u, i));
            }
        }

        costs[free_action] = Rational::zero();
        real.push(free_action);
        real.sort_unstable();
        dist.push(rows);
        cost.push(costs);
        real_actions.push(real);
    }

    let instance = Instance::new(
        (1..=s).map(|v| format!("theta{v}")).collect(),
        action_names,
        vec!["w1".into(), "w2".into(), "w3".into(), "w4".into()],
        vec![rat(1, s as i64); s],
        dist,
        cost,
        vec![Rational::zero(), Rational::zero(), Rational::one(), Rational::zero()],
    )
    .expect("construction is well-formed");

    let (witness, claimed_bound) = match &graph.independent_set {
        Some(set) => {
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            for &v in &sorted {
                if v == 0 || v > s {
                    return Err(GenError::BadVertex(v, s));
                }
                for &u in &sorted {
                    if u != v && neighbors[v - 1].contains(&u) {
                        return Err(GenError::NotIndependent(v, u));
                    }
                }
            }
            let scale = Rational::one() - &rho * rat_int(l as i64) * pow2_neg(l - 1);
            let member_contract = |v: usize| -> Contract {
                let (cos_v, sin_v) = &trig[v - 1];
                Contract::new(vec![
                    cos_v * &scale,
                    sin_v * &scale,
                    Rational::zero(),
                    Rational::zero(),
                ])
                .unwrap()
            };
            let mut entries = Vec::with_capacity(s);
            for v in 1..=s {
                if sorted.contains(&v) {
                    entries.push(member_contract(v));
                } else {
                    // Route the type to the member contract its agent likes
                    // best, lowest vertex label on ties.
                    let best = sorted
                        .iter()
                        .map(|&u| {
                            (u, agent_best_utility(&instance, v - 1, &member_contract(u)))
                        })
                        .max_by(|(u1, x), (u2, y)| x.cmp(y).then(u2.cmp(u1)))
                        .map(|(u, _)| u)
                        .expect("independent set is non-empty");
                    entries.push(member_contract(best));
                }
            }
            let eta = rat(sorted.len() as i64, s as i64);
            let bound = rat(1, 2) * eta * &rho * rat_int(l as i64) * pow2_neg(l);
            (Some(DeterministicMenu::new(entries)), Some(bound))
        }
        None => (None, None),
    };

    Ok(HardnessInstance { instance, witness, claimed_bound, real_actions, l, rho })
}
