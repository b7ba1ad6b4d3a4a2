//! The bounded-degree independent-set reduction as an instance generator:
//! trig-valued probabilities rendered as exact rationals, a completeness
//! witness menu built from a supplied independent set, and its evaluation.
//!
//! ```bash
//! cargo run --example hardness
//! ```

use contract_menus::agent::{best_response, menu_value_deterministic, verify_dsic_deterministic};
use contract_menus::gen::{gen_hardness, Graph, HardnessParams};
use contract_menus::rational::{rat, to_f64, Rational};
use num_traits::Zero;

fn main() {
    // The 5-cycle with independent set {1, 3}, degree cap 2, alpha 1/2.
    let mut graph = Graph::cycle(5);
    graph.independent_set = Some(vec![1, 3]);
    let params = HardnessParams { max_degree: 2, alpha: rat(1, 2), trig_bits: 40 };

    let out = gen_hardness(&graph, &params).unwrap();
    println!(
        "instance: {} types, {} actions, {} outcomes; l = {}, rho = {}",
        out.instance.num_types(),
        out.instance.num_actions(),
        out.instance.num_outcomes(),
        out.l,
        to_f64(&out.rho),
    );
    println!("validates: {}", out.instance.validate().is_valid());
    for (t, real) in out.real_actions.iter().enumerate() {
        let names: Vec<&str> = real
            .iter()
            .map(|&a| out.instance.actions()[a].as_str())
            .collect();
        println!("  {}: construction actions {:?}", out.instance.types()[t], names);
    }

    let witness = out.witness.unwrap();
    let report = verify_dsic_deterministic(&out.instance, &witness, &Rational::zero());
    let value = menu_value_deterministic(&out.instance, &witness);
    println!("\nwitness menu from the independent set:");
    for (t, name) in out.instance.types().iter().enumerate() {
        let br = best_response(&out.instance, t, witness.entry(t));
        println!(
            "  {name}: plays {}, agent utility {:.10}",
            out.instance.actions()[br.action],
            to_f64(&br.agent_utility)
        );
    }
    println!("witness DSIC: {}", report.is_dsic());
    println!("witness value: {:.10}", to_f64(&value));
    println!(
        "asymptotic completeness bound (eta/2 * rho * l * 2^-l): {:.10}",
        to_f64(&out.claimed_bound.unwrap())
    );
    println!("(the bound is an asymptotic claim; at five vertices the witness value");
    println!("is recorded as regression data rather than asserted against it)");
}
