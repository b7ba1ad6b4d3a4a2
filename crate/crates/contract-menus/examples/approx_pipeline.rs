//! The approximation pipeline behind the scheme, step by step: discretize
//! an optimal menu onto the geometric payment grid, check the relaxed
//! incentive conditions, then convert back to an exactly DSIC menu.
//!
//! ```bash
//! cargo run --example approx_pipeline
//! ```

use contract_menus::agent::{
    menu_value_deterministic, recommendation_value, verify_dsic_deterministic, verify_eps_approx,
};
use contract_menus::det::{convert_to_dsic, discretize_menu, solve_constant_types, PaymentGrid};
use contract_menus::gen::{random_instance, RandomParams};
use contract_menus::rational::{rat, rat_int, to_f64, Rational};
use num_traits::Zero;

fn main() {
    let instance = random_instance(&RandomParams {
        num_types: 3,
        num_actions: 3,
        num_outcomes: 2,
        seed: 7,
        sparsity: 0.0,
    });
    let delta = rat(1, 2);
    let epsilon = &delta * &delta / rat_int(16);

    let (optimal, opt_value) = solve_constant_types(&instance).unwrap();
    println!("exact optimum: {:.6}", to_f64(&opt_value));

    let grid = PaymentGrid::new(&instance, &optimal, &delta).unwrap();
    println!(
        "payment grid: eta = {:.6}, {} geometric levels per outcome",
        to_f64(&grid.eta),
        grid.i_max + 1
    );

    let rounded = discretize_menu(&instance, &optimal, &delta).unwrap();
    let report = verify_eps_approx(&instance, &rounded, &epsilon).unwrap();
    println!(
        "discretized menu: value {:.6}, passes the relaxed conditions at eps = {:.6}: {}",
        to_f64(&recommendation_value(&instance, &rounded).unwrap()),
        to_f64(&epsilon),
        report.passes()
    );

    let dsic = convert_to_dsic(&instance, &rounded, &epsilon).unwrap();
    let value = menu_value_deterministic(&instance, &dsic);
    println!(
        "converted menu: value {:.6}, exactly DSIC: {} (guarantee: lose at most 2*sqrt(eps) = {:.3})",
        to_f64(&value),
        verify_dsic_deterministic(&instance, &dsic, &Rational::zero()).is_dsic(),
        2.0 * to_f64(&epsilon).sqrt()
    );
    println!("end-to-end loss vs exact: {:.6} (bound: delta = {:.2})",
        to_f64(&(&opt_value - &value)), to_f64(&delta));
}
