//! Property tests for the model and agent invariants.

use contract_menus::agent::{agent_best_utility, best_response, verify_dsic_deterministic};
use contract_menus::det::solve_constant_types;
use contract_menus::gen::{random_instance, RandomParams};
use contract_menus::io::{instance_to_json, parse_instance_json};
use contract_menus::model::{Contract, DeterministicMenu, Instance};
use contract_menus::rational::{parse_rational, rat, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn arb_params() -> impl Strategy<Value = RandomParams> {
    (1usize..=3, 1usize..=3, 1usize..=3, any::<u64>(), 0.0f64..0.7).prop_map(
        |(l, n, m, seed, sparsity)| RandomParams {
            num_types: l,
            num_actions: n,
            num_outcomes: m,
            seed,
            sparsity,
        },
    )
}

fn arb_contract(m: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((0i64..=64, 1i64..=16), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_validate_and_round_trip(params in arb_params()) {
        let instance = random_instance(&params);
        let report = instance.validate();
        prop_assert!(report.is_valid());

        // Bit-exact serialization: no float round-trip anywhere.
        let text = serde_json::to_string(&instance_to_json(&instance)).unwrap();
        let back = parse_instance_json(&text).unwrap();
        prop_assert_eq!(back, instance);
    }

    #[test]
    fn rational_literals_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
        let x = rat(n, d);
        let s = contract_menus::rational::format_rational(&x);
        prop_assert_eq!(parse_rational(&s).unwrap(), x);
    }

    #[test]
    fn agent_utility_is_monotone_in_payments(
        params in arb_params(),
        pay in arb_contract(3),
        bump in arb_contract(3),
    ) {
        let instance = random_instance(&params);
        let m = instance.num_outcomes();
        let p = Contract::new(pay[..m].iter().map(|&(a, b)| rat(a, 16 * b)).collect()).unwrap();
        let q = Contract::new(
            p.pay()
                .iter()
                .zip(&bump[..m])
                .map(|(x, &(a, b))| x + rat(a, 16 * b))
                .collect(),
        )
        .unwrap();
        for t in 0..instance.num_types() {
            prop_assert!(
                agent_best_utility(&instance, t, &q) >= agent_best_utility(&instance, t, &p)
            );
        }
    }

    #[test]
    fn best_response_is_deterministic_and_in_tied_set(
        params in arb_params(),
        pay in arb_contract(3),
    ) {
        let instance = random_instance(&params);
        let m = instance.num_outcomes();
        let p = Contract::new(pay[..m].iter().map(|&(a, b)| rat(a, 16 * b)).collect()).unwrap();
        for t in 0..instance.num_types() {
            let first = best_response(&instance, t, &p);
            let second = best_response(&instance, t, &p);
            prop_assert_eq!(first.action, second.action);
            prop_assert!(first.tied_set.contains(&first.action));
            prop_assert_eq!(&first.agent_utility, &agent_best_utility(&instance, t, &p));
        }
    }

    #[test]
    fn dsic_verification_agrees_with_deterministic_specialization(
        params in arb_params(),
        pay in arb_contract(3),
    ) {
        let instance = random_instance(&params);
        let m = instance.num_outcomes();
        let p = Contract::new(pay[..m].iter().map(|&(a, b)| rat(a, 16 * b)).collect()).unwrap();
        let menu = DeterministicMenu::uniform(instance.num_types(), p);
        // Point-mass wrapping: dropping expectations must give the same
        // slacks as evaluating the contracts directly.
        let wrapped = contract_menus::agent::verify_dsic(
            &instance,
            &menu.to_randomized(),
            &Rational::zero(),
        );
        for slack in &wrapped.slacks {
            let own = agent_best_utility(&instance, slack.truthful, menu.entry(slack.truthful));
            let other = agent_best_utility(&instance, slack.truthful, menu.entry(slack.reported));
            prop_assert_eq!(&slack.slack, &(own - other));
        }
    }
}

/// Zero-mass types are stripped by validation; the solvers' optimal value
/// is unchanged by the stripping.
#[test]
fn stripping_zero_mass_types_preserves_optimal_values() {
    for seed in 0..10u64 {
        let base = random_instance(&RandomParams {
            num_types: 2,
            num_actions: 2,
            num_outcomes: 2,
            seed: 1100 + seed,
            sparsity: 0.0,
        });
        // Append a zero-probability clone of the first type.
        let mut types: Vec<String> = base.types().to_vec();
        types.push("ghost".into());
        let mut mu: Vec<Rational> = (0..2).map(|t| base.mu(t).clone()).collect();
        mu.push(Rational::zero());
        let mut dist: Vec<Vec<Vec<Rational>>> = (0..2)
            .map(|t| {
                (0..2)
                    .map(|a| base.dist_row(t, a).to_vec())
                    .collect()
            })
            .collect();
        dist.push(dist[0].clone());
        let mut cost: Vec<Vec<Rational>> = (0..2)
            .map(|t| (0..2).map(|a| base.cost(t, a).clone()).collect())
            .collect();
        cost.push(cost[0].clone());
        let padded = Instance::new(
            types,
            base.actions().to_vec(),
            base.outcomes().to_vec(),
            mu,
            dist,
            cost,
            base.rewards().to_vec(),
        )
        .unwrap();

        let report = padded.validate();
        assert!(report.is_valid());
        assert_eq!(report.stripped_types, vec!["ghost".to_string()]);
        let normalized = report.normalized.unwrap();

        // The padded form is solvable as-is (the LP tolerates mu = 0) and
        // must agree with the stripped form.
        let (_, padded_value) = solve_constant_types(&padded).unwrap();
        let (menu, stripped_value) = solve_constant_types(&normalized).unwrap();
        assert_eq!(padded_value, stripped_value, "seed {seed}");
        assert!(verify_dsic_deterministic(&normalized, &menu, &Rational::zero()).is_dsic());
    }
}

/// The fixture's reference menu achieves 3/4 - eps for a sweep of eps,
/// pinning linearity of the expected-utility computations in the weights.
#[test]
fn fixture_reference_menu_values() {
    use contract_menus::agent::menu_value;
    use contract_menus::gen::{no_maximum_fixture, no_maximum_proof_menu};
    let instance = no_maximum_fixture();
    for denom in [4i64, 10, 20, 100, 1000] {
        let eps = rat(1, denom);
        let menu = no_maximum_proof_menu(&instance, &eps);
        assert_eq!(menu_value(&instance, &menu), rat(3, 4) - &eps);
        assert!(contract_menus::agent::verify_dsic(&instance, &menu, &Rational::zero()).is_dsic());
    }
}
