//! The main act: a DSIC menu of randomized contracts within epsilon of
//! the supremum, computed by column generation against the separation
//! oracle, on the instance where the supremum is not attained.
//!
//! ```bash
//! cargo run --example randomized
//! ```

use contract_menus::agent::{menu_value, verify_dsic};
use contract_menus::det::solve_constant_types;
use contract_menus::gen::no_maximum_fixture;
use contract_menus::randmenu::{simplify_menu, solve_randomized};
use contract_menus::rational::{rat, to_f64, Rational};
use num_traits::Zero;

fn main() {
    let instance = no_maximum_fixture();
    let epsilon = rat(1, 100);

    let result = solve_randomized(&instance, &epsilon).unwrap();
    println!("epsilon = {}", to_f64(&epsilon));
    println!("payment box edge C = {:.3e}", to_f64(&result.bound.box_bound));
    println!();
    println!("iter  restricted value   dual objective   new columns");
    for row in &result.trace {
        println!(
            "{:>4}  {:>16.12}  {:>15.12}  {:>11}",
            row.iteration,
            to_f64(&row.primal),
            to_f64(&row.dual),
            row.new_columns
        );
    }
    println!();
    println!(
        "value = {:.12}  (supremum is 3/4; it is approached, never attained)",
        to_f64(&result.value)
    );
    println!("sup upper bound = {:.12}", to_f64(&result.sup_upper_bound()));
    println!(
        "DSIC: {}",
        verify_dsic(&instance, &result.menu, &Rational::zero()).is_dsic()
    );

    let (_, det_value) = solve_constant_types(&instance).unwrap();
    println!(
        "deterministic optimum = {:.6}; randomization gains {:.6}",
        to_f64(&det_value),
        to_f64(&(&result.value - &det_value))
    );

    let simplified = simplify_menu(&instance, &result.menu).unwrap();
    println!("\nmenu (after support collapse, value {:.12}):", to_f64(&menu_value(&instance, &simplified)));
    for (t, name) in instance.types().iter().enumerate() {
        println!("  {name}:");
        for (contract, weight) in simplified.entry(t) {
            println!("    with probability {:<10} pay {}", to_f64(weight), contract);
        }
    }
}
