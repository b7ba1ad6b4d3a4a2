use super::*;
use crate::rational::{rat, rat_int};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn one() -> Rational {
    Rational::one()
}

#[test]
fn one_dimensional_max() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var(VarKind::NonNegative);
    lp.objective_coeff(x, one());
    lp.add_constraint(vec![(x, one())], Relation::Le, rat_int(3));
    let sol = lp.solve_rational();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.value, rat_int(3));
    assert_eq!(sol.primal[x], rat_int(3));
    assert!(sol.is_vertex);
    // Dual of the single constraint is the objective's sensitivity to rhs.
    assert_eq!(sol.dual[0], rat_int(1));
}

#[test]
fn contradictory_bounds_are_infeasible() {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_var(VarKind::NonNegative);
    lp.add_constraint(vec![(x, one())], Relation::Ge, rat_int(1));
    lp.add_constraint(vec![(x, one())], Relation::Le, rat_int(0));
    let sol = lp.solve_rational();
    assert_eq!(sol.status, LpStatus::Infeasible);
}

#[test]
fn unbounded_is_detected() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var(VarKind::NonNegative);
    lp.objective_coeff(x, one());
    lp.add_constraint(vec![(x, -one())], Relation::Le, rat_int(1));
    assert_eq!(lp.solve_rational().status, LpStatus::Unbounded);
}

#[test]
fn scaling_a_row_halves_its_dual() {
    let build = |scale: i64| {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var(VarKind::NonNegative);
        lp.objective_coeff(x, one());
        lp.add_constraint(vec![(x, rat_int(scale))], Relation::Le, rat_int(3 * scale));
        lp.solve_rational()
    };
    let base = build(1);
    let scaled = build(2);
    assert_eq!(base.value, scaled.value);
    assert_eq!(scaled.dual[0], base.dual[0].clone() / rat_int(2));
}

#[test]
fn free_variables_solve() {
    // min x + y s.t. x + y >= 2, x - y = 1, y free.
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_var(VarKind::NonNegative);
    let y = lp.add_var(VarKind::Free);
    lp.objective_coeff(x, one());
    lp.objective_coeff(y, one());
    lp.add_constraint(vec![(x, one()), (y, one())], Relation::Ge, rat_int(2));
    lp.add_constraint(vec![(x, one()), (y, -one())], Relation::Eq, rat_int(1));
    let sol = lp.solve_rational();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.value, rat_int(2));
    assert_eq!(sol.primal[x], rat(3, 2));
    assert_eq!(sol.primal[y], rat(1, 2));
}

#[test]
fn negative_rhs_rows_normalize() {
    // max -x s.t. -x <= -2  (i.e. x >= 2)
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var(VarKind::NonNegative);
    lp.objective_coeff(x, -one());
    lp.add_constraint(vec![(x, -one())], Relation::Le, rat_int(-2));
    let sol = lp.solve_rational();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.value, rat_int(-2));
    assert_eq!(sol.primal[x], rat_int(2));
    // Strong duality with the original (unnormalized) row data.
    assert_eq!(sol.dual[0].clone() * rat_int(-2), sol.value);
}

#[test]
fn redundant_equality_rows_are_tolerated() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var(VarKind::NonNegative);
    let y = lp.add_var(VarKind::NonNegative);
    lp.objective_coeff(x, one());
    lp.objective_coeff(y, one());
    lp.add_constraint(vec![(x, one()), (y, one())], Relation::Eq, rat_int(4));
    // Same hyperplane twice.
    lp.add_constraint(vec![(x, rat_int(2)), (y, rat_int(2))], Relation::Eq, rat_int(8));
    let sol = lp.solve_rational();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.value, rat_int(4));
}

fn random_bounded_lp(rng: &mut ChaCha8Rng, nvars: usize, nrows: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize });
    let vars = lp.add_vars(nvars, VarKind::NonNegative);
    for &v in &vars {
        lp.objective_coeff(v, rat(rng.gen_range(-8..=8), rng.gen_range(1..=4)));
    }
    for _ in 0..nrows {
        let coeffs: Vec<(usize, Rational)> = vars
            .iter()
            .filter_map(|&v| {
                rng.gen_bool(0.8)
                    .then(|| (v, rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))))
            })
            .collect();
        // Nonnegative rhs keeps the origin feasible for Le rows.
        lp.add_constraint(coeffs, Relation::Le, rat(rng.gen_range(0..=12), 1));
    }
    // Box to force boundedness.
    let coeffs: Vec<(usize, Rational)> = vars.iter().map(|&v| (v, one())).collect();
    lp.add_constraint(coeffs, Relation::Le, rat_int(20));
    lp
}

/// Exact rank of the rows via Gaussian elimination.
fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut mat: Vec<Vec<Rational>> = rows.to_vec();
    let cols = mat.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot_row) = (rank..mat.len()).find(|&r| !mat[r][c].is_zero()) else {
            continue;
        };
        mat.swap(rank, pivot_row);
        let pivot = mat[rank][c].clone();
        for r in 0..mat.len() {
            if r != rank && !mat[r][c].is_zero() {
                let factor = &mat[r][c] / &pivot;
                for j in 0..cols {
                    let delta = &factor * &mat[rank][j];
                    mat[r][j] -= delta;
                }
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    rank
}

#[test]
fn equality_constrained_duals_satisfy_complementary_slackness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        // min c'x s.t. sum x_i = K, x <= caps: feasible by construction.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let vars = lp.add_vars(3, VarKind::NonNegative);
        for &v in &vars {
            lp.objective_coeff(v, rat(rng.gen_range(1..=8), rng.gen_range(1..=4)));
        }
        let coeffs: Vec<(usize, Rational)> = vars.iter().map(|&v| (v, one())).collect();
        lp.add_constraint(coeffs, Relation::Eq, rat_int(6));
        for &v in &vars {
            lp.add_upper_bound(v, rat_int(rng.gen_range(3..=5)));
        }
        let sol = lp.solve_rational();
        assert_eq!(sol.status, LpStatus::Optimal);
        let dual_obj: Rational = lp
            .rows()
            .iter()
            .zip(&sol.dual)
            .map(|(row, y)| y * &row.rhs)
            .sum();
        assert_eq!(dual_obj, sol.value, "c'x = y'b");
        for (row, y) in lp.rows().iter().zip(&sol.dual) {
            if !y.is_zero() {
                let lhs: Rational = row.coeffs.iter().map(|(v, c)| c * &sol.primal[*v]).sum();
                assert_eq!(lhs, row.rhs);
            }
        }
    }
}

#[test]
fn random_lps_satisfy_duality_and_vertex_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..40 {
        let lp = random_bounded_lp(&mut rng, 3, 4);
        let sol = lp.solve_rational();
        assert_eq!(sol.status, LpStatus::Optimal);

        // Primal feasibility, exactly.
        for row in lp.rows() {
            let lhs: Rational = row.coeffs.iter().map(|(v, c)| c * &sol.primal[*v]).sum();
            match row.relation {
                Relation::Le => assert!(lhs <= row.rhs),
                Relation::Ge => assert!(lhs >= row.rhs),
                Relation::Eq => assert_eq!(lhs, row.rhs),
            }
        }
        for x in &sol.primal {
            assert!(!x.is_negative());
        }

        // Strong duality: c'x = y'b.
        let dual_obj: Rational = lp
            .rows()
            .iter()
            .zip(&sol.dual)
            .map(|(row, y)| y * &row.rhs)
            .sum();
        assert_eq!(dual_obj, sol.value);

        // Complementary slackness: positive dual => tight row.
        for (row, y) in lp.rows().iter().zip(&sol.dual) {
            if !y.is_zero() {
                let lhs: Rational = row.coeffs.iter().map(|(v, c)| c * &sol.primal[*v]).sum();
                assert_eq!(lhs, row.rhs, "nonzero dual on a slack row");
            }
        }

        // Vertex solutions activate >= nvars linearly independent
        // constraints (rows at equality plus active nonnegativity bounds).
        assert!(sol.is_vertex);
        let mut active: Vec<Vec<Rational>> = Vec::new();
        for row in lp.rows() {
            let lhs: Rational = row.coeffs.iter().map(|(v, c)| c * &sol.primal[*v]).sum();
            if lhs == row.rhs {
                let mut dense = vec![Rational::zero(); lp.num_vars()];
                for (v, c) in &row.coeffs {
                    dense[*v] = c.clone();
                }
                active.push(dense);
            }
        }
        for (v, x) in sol.primal.iter().enumerate() {
            if x.is_zero() {
                let mut dense = vec![Rational::zero(); lp.num_vars()];
                dense[v] = Rational::one();
                active.push(dense);
            }
        }
        assert!(rank(&active) >= lp.num_vars());
    }
}

#[test]
fn mixed_relation_lps_keep_the_origin_and_strong_duality() {
    // Rows chosen so the origin stays feasible: Le with nonnegative rhs,
    // Ge with nonpositive rhs, homogeneous Eq. Exercises artificials,
    // drive-out, and equality duals.
    let mut rng = ChaCha8Rng::seed_from_u64(311);
    for case in 0..30 {
        let mut lp = LinearProgram::new(if case % 2 == 0 { Sense::Maximize } else { Sense::Minimize });
        let vars = lp.add_vars(3, VarKind::NonNegative);
        for &v in &vars {
            lp.objective_coeff(v, rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)));
        }
        for _ in 0..4 {
            let coeffs: Vec<(usize, Rational)> = vars
                .iter()
                .filter_map(|&v| {
                    rng.gen_bool(0.7)
                        .then(|| (v, rat(rng.gen_range(-5..=5), rng.gen_range(1..=2))))
                })
                .collect();
            match rng.gen_range(0..3) {
                0 => lp.add_constraint(coeffs, Relation::Le, rat_int(rng.gen_range(0..=8))),
                1 => lp.add_constraint(coeffs, Relation::Ge, rat_int(-rng.gen_range(0..=8))),
                _ => lp.add_constraint(coeffs, Relation::Eq, rat_int(0)),
            };
        }
        let box_coeffs: Vec<(usize, Rational)> = vars.iter().map(|&v| (v, one())).collect();
        lp.add_constraint(box_coeffs, Relation::Le, rat_int(15));

        let sol = lp.solve_rational();
        assert_eq!(sol.status, LpStatus::Optimal, "case {case}");
        for row in lp.rows() {
            let lhs: Rational = row.coeffs.iter().map(|(v, c)| c * &sol.primal[*v]).sum();
            match row.relation {
                Relation::Le => assert!(lhs <= row.rhs),
                Relation::Ge => assert!(lhs >= row.rhs),
                Relation::Eq => assert_eq!(lhs, row.rhs),
            }
        }
        let dual_obj: Rational = lp
            .rows()
            .iter()
            .zip(&sol.dual)
            .map(|(row, y)| y * &row.rhs)
            .sum();
        assert_eq!(dual_obj, sol.value, "case {case}: strong duality");
    }
}

#[test]
fn results_invariant_under_row_and_column_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let lp = random_bounded_lp(&mut rng, 3, 4);
        let base = lp.solve_rational();

        // Permute rows.
        let mut permuted = LinearProgram::new(lp.sense);
        permuted.add_vars(lp.num_vars(), VarKind::NonNegative);
        for (v, c) in lp.objective() {
            permuted.objective_coeff(*v, c.clone());
        }
        let order: Vec<usize> = (0..lp.num_rows()).rev().collect();
        for &r in &order {
            let row = &lp.rows()[r];
            permuted.add_constraint(row.coeffs.clone(), row.relation, row.rhs.clone());
        }
        let perm_sol = permuted.solve_rational();
        assert_eq!(perm_sol.value, base.value);

        // Permute columns (reverse variable order).
        let nv = lp.num_vars();
        let mut col_perm = LinearProgram::new(lp.sense);
        col_perm.add_vars(nv, VarKind::NonNegative);
        for (v, c) in lp.objective() {
            col_perm.objective_coeff(nv - 1 - *v, c.clone());
        }
        for row in lp.rows() {
            let coeffs = row
                .coeffs
                .iter()
                .map(|(v, c)| (nv - 1 - *v, c.clone()))
                .collect();
            col_perm.add_constraint(coeffs, row.relation, row.rhs.clone());
        }
        assert_eq!(col_perm.solve_rational().value, base.value);
    }
}

#[test]
fn float_backend_matches_exact_and_falls_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    for _ in 0..25 {
        let lp = random_bounded_lp(&mut rng, 3, 4);
        let exact = lp.solve_rational();
        match lp.solve_f64() {
            Ok(float) => {
                assert_eq!(float.status, exact.status);
                let v = crate::rational::to_f64(&exact.value);
                assert!((float.value - v).abs() <= 1e-6 * (1.0 + v.abs()));
            }
            Err(_) => {
                // Fallback path: auto must land on the exact answer.
                match lp.solve_auto() {
                    AutoSolution::Exact(sol) => assert_eq!(sol.value, exact.value),
                    AutoSolution::Float(_) => panic!("auto should have fallen back"),
                }
            }
        }
    }
}

#[test]
fn restricting_to_active_set_is_idempotent() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var(VarKind::NonNegative);
    let y = lp.add_var(VarKind::NonNegative);
    lp.objective_coeff(x, one());
    lp.objective_coeff(y, one());
    let r0 = lp.add_constraint(vec![(x, one()), (y, one())], Relation::Le, rat_int(2));
    lp.add_constraint(vec![(x, one())], Relation::Le, rat_int(5));
    let sol = lp.solve_rational();
    assert_eq!(sol.value, rat_int(2));
    let restricted = lp.restrict_and_resolve(&[r0]);
    assert_eq!(restricted.status, LpStatus::Optimal);
    assert_eq!(restricted.value, sol.value);
}

#[test]
fn degenerate_face_restriction_returns_a_face_vertex() {
    // Square [0,2]^2 with objective x: the optimal face is the right edge.
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var(VarKind::NonNegative);
    let y = lp.add_var(VarKind::NonNegative);
    lp.objective_coeff(x, one());
    let rx = lp.add_upper_bound(x, rat_int(2));
    lp.add_upper_bound(y, rat_int(2));
    let sol = lp.restrict_and_resolve(&[rx]);
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.value, rat_int(2));
    assert_eq!(sol.primal[x], rat_int(2));
    // A vertex of the face: y at one of its bounds.
    assert!(sol.is_vertex);
    assert!(sol.primal[y] == rat_int(0) || sol.primal[y] == rat_int(2));
}

#[test]
fn infeasible_restriction_is_reported() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var(VarKind::NonNegative);
    lp.objective_coeff(x, one());
    let r0 = lp.add_constraint(vec![(x, one())], Relation::Le, rat_int(1));
    let r1 = lp.add_constraint(vec![(x, one())], Relation::Le, rat_int(3));
    // Forcing both x = 1 and x = 3 is contradictory.
    let sol = lp.restrict_and_resolve(&[r0, r1]);
    assert_eq!(sol.status, LpStatus::Infeasible);
}

#[test]
fn lp_format_dump_mentions_all_rows() {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_var(VarKind::Free);
    lp.objective_coeff(x, one());
    lp.add_constraint(vec![(x, one())], Relation::Ge, rat_int(1));
    let dump = lp.to_lp_format();
    assert!(dump.contains("Minimize"));
    assert!(dump.contains("c0:"));
    assert!(dump.contains("x0 free"));
}
