//! Exact optimal menus with two outcomes, certified against the grid
//! oracle.
//!
//! With two outcomes a single contract - zero on the low-reward outcome,
//! an action-tie breakpoint payment on the other - already attains the
//! optimal menu value, so the solver only scans breakpoints.
//!
//! ```bash
//! cargo run --example two_outcomes
//! ```

use contract_menus::det::solve_two_outcomes;
use contract_menus::gen::{random_instance, RandomParams};
use contract_menus::oracles::{grid_det_menu, GridSpec};
use contract_menus::rational::{format_rational, rat, rat_int, to_f64};

fn main() {
    for seed in [3, 15, 18, 19, 25] {
        let instance = random_instance(&RandomParams {
            num_types: 3,
            num_actions: 3,
            num_outcomes: 2,
            seed,
            sparsity: 0.4,
        });
        let (menu, value) = solve_two_outcomes(&instance).unwrap();
        let contract = menu.entry(0);

        // Three types over two outcomes: 17^6 grid menus fit the budget.
        let grid = GridSpec::new(rat_int(1), rat(1, 16)).unwrap();
        let (_, grid_value) = grid_det_menu(&instance, &grid).unwrap();

        println!(
            "seed {seed}: optimal value {} ({}), shared contract {}, grid certifies {} (gap {})",
            to_f64(&value),
            format_rational(&value),
            contract,
            to_f64(&grid_value),
            to_f64(&(&value - &grid_value)),
        );
        assert!(value >= grid_value);
    }
}
