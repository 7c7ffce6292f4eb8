use handsoff::linalg::solve;
use handsoff::{
    build_discrete, expm, simulate, zoh_discretize, ControlProblem, LinearSystem, Matrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut impl Rng, r: usize, c: usize, scale: f64) -> Matrix {
    let data = (0..r * c).map(|_| rng.gen_range(-scale..scale)).collect();
    Matrix::new(r, c, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_inverse_is_expm_of_negation(seed in any::<u64>(), n in 1usize..5, scale in 0.01f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, n, n, scale);
        let prod = expm(&m).unwrap().matmul(&expm(&m.scale(-1.0)).unwrap()).unwrap();
        let err = prod.max_abs_diff(&Matrix::identity(n));
        prop_assert!(err <= 1e-9 * expm(&m).unwrap().norm_1().powi(2).max(1.0), "err {err}");
    }

    #[test]
    fn expm_of_diagonal(d in prop::collection::vec(-5.0f64..5.0, 1..5)) {
        let n = d.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        let e = expm(&m).unwrap();
        for i in 0..n {
            prop_assert!((e[(i, i)] - d[i].exp()).abs() <= 1e-13 * d[i].exp().max(1.0));
        }
    }
}

#[test]
fn double_integrator_closed_form() {
    let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
    let bext = Matrix::from_rows(&[[0.0, 0.0], [1.0, -1.0]]).unwrap();
    for delta in [1e-3, 0.005, 0.1, 0.5, 1.0, 3.0] {
        let (ad, bd) = zoh_discretize(&a, &bext, delta).unwrap();
        let ad_exact = Matrix::from_rows(&[[1.0, delta], [0.0, 1.0]]).unwrap();
        let h = delta * delta / 2.0;
        let bd_exact = Matrix::from_rows(&[[h, -h], [delta, -delta]]).unwrap();
        assert!(ad.max_abs_diff(&ad_exact) <= 1e-12);
        assert!(bd.max_abs_diff(&bd_exact) <= 1e-12);
    }
}

#[test]
fn zoh_matches_trapezoid_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let n = rng.gen_range(1..4);
        let m = rng.gen_range(1..3);
        let a = random_matrix(&mut rng, n, n, 1.5);
        let b = random_matrix(&mut rng, n, m, 1.0);
        let delta = rng.gen_range(0.05..1.0);
        let (_, bd) = zoh_discretize(&a, &b, delta).unwrap();

        let steps = 10_000;
        let h = delta / steps as f64;
        let mut acc = Matrix::zeros(n, m);
        for k in 0..=steps {
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            let f = expm(&a.scale(k as f64 * h)).unwrap().matmul(&b).unwrap();
            acc = acc.add(&f.scale(w * h)).unwrap();
        }
        let err = bd.max_abs_diff(&acc);
        assert!(err <= 1e-7, "trapezoid mismatch {err}");
    }
}

#[test]
fn phi_blocks_are_powers_times_bd() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sys = LinearSystem::new(random_matrix(&mut rng, 3, 3, 1.0), random_matrix(&mut rng, 3, 2, 1.0))
        .unwrap();
    let problem = ControlProblem::new(sys, vec![0.3, -0.2, 1.0], 2.0).unwrap();
    let steps = 7;
    let dp = build_discrete(&problem, steps).unwrap();
    assert_eq!(dp.phi.cols(), 2 * 2 * steps);
    assert!((dp.delta * steps as f64 - 2.0).abs() <= 1e-12);
    for k in 0..steps {
        let expected = dp.ad.powi(steps - 1 - k).unwrap().matmul(&dp.bd).unwrap();
        let block = dp.phi.block(0, 4 * k, 3, 4);
        assert!(block.max_abs_diff(&expected) <= 1e-12);
    }
    let zeta = dp.ad.powi(steps).unwrap().mul_vec(&problem.x0).unwrap();
    for (a, b) in zeta.iter().zip(&dp.zeta) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn stacked_form_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let sys = LinearSystem::new(random_matrix(&mut rng, 2, 2, 1.0), random_matrix(&mut rng, 2, 1, 1.0))
        .unwrap();
    let problem = ControlProblem::new(sys, vec![1.0, -0.5], 3.0).unwrap();
    let dp = build_discrete(&problem, 30).unwrap();
    for _ in 0..100 {
        let z: Vec<f64> = (0..dp.num_vars()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let states = simulate(&dp, &dp.x0, &z).unwrap();
        let stacked = dp.terminal_state(&z).unwrap();
        let last = states.last().unwrap();
        for (a, b) in last.iter().zip(&stacked) {
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn solve_recovers_known_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_matrix(&mut rng, 4, 4, 1.0).add(&Matrix::identity(4).scale(4.0)).unwrap();
    let x = random_matrix(&mut rng, 4, 2, 1.0);
    let b = a.matmul(&x).unwrap();
    assert!(solve(&a, &b).unwrap().max_abs_diff(&x) <= 1e-12);
}
