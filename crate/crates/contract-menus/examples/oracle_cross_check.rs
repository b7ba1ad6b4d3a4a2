//! The verification machinery: grid brute force bracketing the solvers,
//! and the separation oracle checked against exhaustive vertex
//! enumeration of the best-response polyhedra.
//!
//! ```bash
//! cargo run --example oracle_cross_check
//! ```

use contract_menus::det::solve_constant_types;
use contract_menus::gen::{random_instance, RandomParams};
use contract_menus::oracles::{enumerate_region_vertices, grid_det_menu, grid_rand_menu, GridSpec};
use contract_menus::randmenu::{column_price, payment_bound, separation_oracle, solve_randomized, DualPoint};
use contract_menus::rational::{rat, rat_int, to_f64, Rational};
use num_traits::Zero;

fn main() {
    let instance = random_instance(&RandomParams {
        num_types: 2,
        num_actions: 2,
        num_outcomes: 2,
        seed: 99,
        sparsity: 0.0,
    });

    // Deterministic bracket: grid <= exact. (17 points per outcome keeps
    // the randomized ground set under its contract budget too.)
    let grid = GridSpec::new(rat_int(1), rat(1, 16)).unwrap();
    let (_, grid_value) = grid_det_menu(&instance, &grid).unwrap();
    let (_, exact) = solve_constant_types(&instance).unwrap();
    println!("deterministic: grid {:.6} <= exact {:.6}", to_f64(&grid_value), to_f64(&exact));

    // Randomized bracket: restricted ground set <= solver <= dual bound.
    let rand_grid_value = grid_rand_menu(&instance, &grid, instance.num_actions()).unwrap();
    let result = solve_randomized(&instance, &rat(1, 20)).unwrap();
    println!(
        "randomized: grid ground set {:.6} <= column generation {:.6} <= dual bound {:.6}",
        to_f64(&rand_grid_value),
        to_f64(&result.value),
        to_f64(&result.sup_upper_bound())
    );
    assert!(rand_grid_value <= result.sup_upper_bound());

    // Separation oracle vs exhaustive pricing over polyhedron vertices.
    let bound = payment_bound(&instance, &rat(1, 20)).unwrap();
    let l = instance.num_types();
    let dual = DualPoint {
        y: vec![
            vec![Rational::zero(), rat(-1, 4)],
            vec![rat(-1, 8), Rational::zero()],
        ],
        t_duals: vec![rat(1, 4), rat(1, 4)],
    };
    let hits = separation_oracle(&instance, &bound, &dual);
    println!("\noracle found {} violated column(s) at a hand-picked dual point", hits.len());

    let mut brute_best = vec![None::<Rational>; l];
    for tuple_id in 0..(instance.num_actions().pow(l as u32)) {
        let tuple: Vec<usize> = (0..l)
            .map(|t| (tuple_id / instance.num_actions().pow(t as u32)) % instance.num_actions())
            .collect();
        for vertex in enumerate_region_vertices(&instance, &bound, &tuple).unwrap() {
            for t in 0..l {
                let price = column_price(&instance, &dual, t, &vertex);
                if brute_best[t].as_ref().map(|b| price > *b).unwrap_or(true) {
                    brute_best[t] = Some(price);
                }
            }
        }
    }
    for t in 0..l {
        let best = brute_best[t].clone().unwrap();
        let oracle_says = hits.iter().any(|h| h.column.type_index == t);
        let brute_says = best > dual.t_duals[t];
        println!(
            "type {t}: exhaustive max price {:.6} vs mass dual {:.6} -> violated {brute_says}, oracle agrees: {}",
            to_f64(&best),
            to_f64(&dual.t_duals[t]),
            oracle_says == brute_says
        );
        assert_eq!(oracle_says, brute_says);
    }
}
