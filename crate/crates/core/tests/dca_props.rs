mod common;

use common::random_system;
use handsoff::cli::random_planted;
use handsoff::{
    bang_off_bang_deviation, brute_force_l0, build_discrete, cost_jd, make_exact_instance,
    recombine, run_dca, simulate, split_control, ControlSignal, DcaConfig, LinearSystem,
    Penalty, WarmStart,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn penalties() -> Vec<Penalty> {
    vec![
        Penalty::lp(0.5, 0.8).unwrap(),
        Penalty::mcp(1.0, 0.5).unwrap(),
        Penalty::scad(0.25, 3.0).unwrap(),
        Penalty::lsp_normalized(0.1, 1e-6).unwrap(),
        Penalty::l1l2(0.1).unwrap(),
        Penalty::capped_l1(0.8, 0.5).unwrap(),
    ]
}

proptest! {
    #[test]
    fn split_then_recombine_is_identity(
        samples in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..20)
    ) {
        let u = ControlSignal::new(0.1, samples).unwrap();
        let sc = split_control(&u);
        prop_assert_eq!(sc.complementarity_violation(), 0.0);
        prop_assert!(sc.z.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(recombine(&sc), u);
    }
}

#[test]
fn descent_and_feasibility_on_planted_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..20u64 {
        let n = rng.gen_range(1..=2);
        let sys = random_system(&mut rng, n);
        let support = rng.gen_range(1..=3);
        let planted = random_planted(8, 1, support, 0.25, case).unwrap();
        let problem = make_exact_instance(&sys, 2.0, 8, &planted).unwrap();
        let dp = build_discrete(&problem, 8).unwrap();
        let end = simulate(&dp, &problem.x0, &split_control(&planted).z).unwrap();
        assert!(end.last().unwrap().iter().all(|v| v.abs() <= 1e-9));

        for pen in penalties() {
            for ws in [WarmStart::Zero, WarmStart::L1] {
                let cfg = DcaConfig { warm_start: ws, ..DcaConfig::default() };
                let res = run_dca(&dp, &pen, &cfg).unwrap();
                for w in res.cost_history.windows(2) {
                    assert!(w[1] <= w[0] + 1e-9, "case {case} {pen}: {:?}", res.cost_history);
                }
                assert!(res.iterate_residuals.iter().all(|r| *r <= 1e-8));
                assert!(res.complementarity_violation <= 1e-9);
                assert!(res.lp_solves <= cfg.max_iter + 1);
            }
        }
    }
}

#[test]
fn bang_off_bang_outputs_satisfy_cost_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..20u64 {
        let sys = random_system(&mut rng, 2);
        let planted = random_planted(8, 1, 2, 0.25, 100 + case).unwrap();
        let dp = build_discrete(&make_exact_instance(&sys, 2.0, 8, &planted).unwrap(), 8).unwrap();
        let bf = brute_force_l0(&dp, 1e-8).unwrap();
        assert!(bf.min_l0.unwrap() <= 2.0 * dp.delta + 1e-12);
        assert!(bf.minimizers.contains(&planted) || bf.min_l0.unwrap() < 2.0 * dp.delta);
        for pen in penalties() {
            let res = run_dca(&dp, &pen, &DcaConfig::default()).unwrap();
            if bang_off_bang_deviation(&res.u_star) <= 1e-6 {
                let c = pen.equivalence_constant().unwrap();
                let j = cost_jd(&pen, &res.z_star).unwrap();
                assert!((j - c * res.l0 / dp.delta).abs() <= 1e-6, "{pen}: {j} vs {}", c * res.l0 / dp.delta);
            }
        }
    }
    // Coarse random grids rarely give bang-off-bang outputs; this one does.
    let problem =
        handsoff::ControlProblem::new(LinearSystem::double_integrator(), vec![1.0, -1.0], 5.0).unwrap();
    let dp = build_discrete(&problem, 200).unwrap();
    let cfg = DcaConfig { warm_start: WarmStart::L1, ..DcaConfig::default() };
    for pen in penalties() {
        let res = run_dca(&dp, &pen, &cfg).unwrap();
        assert!(bang_off_bang_deviation(&res.u_star) <= 1e-9);
        let c = pen.equivalence_constant().unwrap();
        let j = cost_jd(&pen, &res.z_star).unwrap();
        assert!((j - c * res.l0 / dp.delta).abs() <= 1e-6, "{pen}");
    }
}

#[test]
fn run_is_deterministic() {
    let sys = LinearSystem::double_integrator();
    let problem = handsoff::ControlProblem::new(sys, vec![1.0, -1.0], 5.0).unwrap();
    let dp = build_discrete(&problem, 200).unwrap();
    let pen = Penalty::scad(0.25, 3.0).unwrap();
    let a = run_dca(&dp, &pen, &DcaConfig::default()).unwrap();
    let b = run_dca(&dp, &pen, &DcaConfig::default()).unwrap();
    assert_eq!(a.z_star, b.z_star);
    assert_eq!(a.cost_history, b.cost_history);
}
