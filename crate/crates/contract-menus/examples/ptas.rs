//! The additive approximation scheme for a constant number of outcomes,
//! sandwiched between exact solvers.
//!
//! ```bash
//! cargo run --example ptas
//! ```

use contract_menus::agent::verify_dsic_deterministic;
use contract_menus::det::{
    ptas_constant_outcomes, ptas_row_bound, solve_constant_types, PtasMode,
};
use contract_menus::gen::{random_instance, RandomParams};
use contract_menus::rational::{rat, to_f64, Rational};
use num_traits::Zero;

fn main() {
    let delta = rat(1, 4);
    for seed in 0..5 {
        let instance = random_instance(&RandomParams {
            num_types: 2,
            num_actions: 3,
            num_outcomes: 3,
            seed: 40 + seed,
            sparsity: 0.0,
        });
        let k = ptas_row_bound(&instance, &delta);
        let (menu, value) =
            ptas_constant_outcomes(&instance, &delta, PtasMode::AssignmentEnum).unwrap();
        let (_, exact) = solve_constant_types(&instance).unwrap();
        println!(
            "seed {}: ptas {:.6} vs exact {:.6} (delta {:.2}, {} contract rows, DSIC {})",
            40 + seed,
            to_f64(&value),
            to_f64(&exact),
            to_f64(&delta),
            k,
            verify_dsic_deterministic(&instance, &menu, &Rational::zero()).is_dsic()
        );
        assert!(value >= &exact - &delta && value <= exact);
    }
    println!("\nthe guarantee is OPT - delta; with few types the row bound");
    println!("collapses to one row per type and the scheme is exact.");
}
