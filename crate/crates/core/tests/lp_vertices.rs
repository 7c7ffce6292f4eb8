mod common;

use common::{enumerate_vertices, random_feasible};
use handsoff::{kkt_residual, solve_lp, LpProblem, LpStatus, Matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let p = random_feasible(&mut rng);
        let sol = solve_lp(&p, 1e-9);
        assert_eq!(sol.status, LpStatus::Optimal, "case {case}");
        let best = enumerate_vertices(&p);
        assert!((sol.objective - best).abs() <= 1e-9, "case {case}: {} vs {best}", sol.objective);
        assert!(kkt_residual(&p, &sol.z, &sol.duals).unwrap() <= 1e-8);
        assert!(p.eq_residual(&sol.z) <= 1e-9);
    }
}

#[test]
fn solutions_are_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let p = random_feasible(&mut rng);
        let sol = solve_lp(&p, 1e-9);
        let fractional = sol.z.iter().filter(|v| **v > 1e-9 && **v < 1.0 - 1e-9).count();
        assert!(fractional <= p.num_rows(), "{fractional} fractional entries");
    }
}

#[test]
fn degenerate_and_duplicate_rows() {
    // Duplicated constraint rows and a right-hand side at a corner.
    let a = Matrix::from_rows(&[[1.0, 1.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]]).unwrap();
    let p = LpProblem::new(vec![1.0, 2.0, -1.0, 3.0], a, vec![1.0, 1.0, 0.0]).unwrap();
    let sol = solve_lp(&p, 1e-9);
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective - 1.0).abs() <= 1e-12);
    assert_eq!(sol.z, vec![1.0, 0.0, 0.0, 0.0]);
}
