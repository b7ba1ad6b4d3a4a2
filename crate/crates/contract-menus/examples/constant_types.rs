//! Exact optimal deterministic menus by action-profile enumeration, run
//! on the fixture whose randomized supremum is unattainable.
//!
//! ```bash
//! cargo run --example constant_types
//! ```

use contract_menus::agent::{best_response, verify_dsic_deterministic};
use contract_menus::det::solve_constant_types;
use contract_menus::gen::no_maximum_fixture;
use contract_menus::rational::{format_rational, to_f64, Rational};
use num_traits::Zero;

fn main() {
    let instance = no_maximum_fixture();
    let (menu, value) = solve_constant_types(&instance).unwrap();

    println!(
        "deterministic optimum: {} ({})",
        to_f64(&value),
        format_rational(&value)
    );
    let report = verify_dsic_deterministic(&instance, &menu, &Rational::zero());
    println!("DSIC at zero tolerance: {}", report.is_dsic());

    for (t, name) in instance.types().iter().enumerate() {
        let br = best_response(&instance, t, menu.entry(t));
        println!(
            "  {name}: contract {}, plays {}, principal gets {}",
            menu.entry(t),
            instance.actions()[br.action],
            to_f64(&br.principal_utility)
        );
    }
    println!("\nincentivizing the third type's costly action earns 1/2 from it but");
    println!("leaks a 1/4 information rent to each of the other two types, so the");
    println!("deterministic optimum is stuck at 2/3 - the same as paying nothing at");
    println!("all. Menus of randomized contracts escape this (see `randomized`).");
}
