//! Convex L1 baseline against non-convex penalties on the double integrator.
//!
//! The simplex returns a vertex of the L1 optimal face, which has at most
//! one fractional sample per state. DCA then trades the fuel objective for
//! support length; at N = 500 with a cold start it can stall at a critical
//! point one sample longer than the optimum.

use handsoff::{
    bang_off_bang_deviation, build_discrete, run_dca, solve_l1, ControlProblem, DcaConfig,
    LinearSystem, Penalty,
};

fn main() -> handsoff::Result<()> {
    let problem = ControlProblem::new(LinearSystem::double_integrator(), vec![1.0, -1.0], 5.0)?;
    let dp = build_discrete(&problem, 500)?;
    let cfg = DcaConfig::default();

    let base = solve_l1(&dp, &cfg)?;
    let dca = run_dca(&dp, &Penalty::mcp(1.0, 0.5)?, &cfg)?;
    let lp = run_dca(&dp, &Penalty::lp(0.5, 0.8)?, &cfg)?;
    for (name, res) in [("l1", &base), ("mcp", &dca), ("lp", &lp)] {
        println!(
            "{name:<4} l0 = {:.4} s  ||u||_1 = {:.4}  bob deviation = {:.3e}  LPs = {}",
            res.l0,
            res.u_star.samples.iter().flatten().map(|v| v.abs()).sum::<f64>() * dp.delta,
            bang_off_bang_deviation(&res.u_star),
            res.lp_solves
        );
    }
    println!("\nmcp cost history: {:?}", dca.cost_history);
    println!("lp cost history:  {:?}", lp.cost_history);

    // Coarse plot of both controls.
    for (name, res) in [("l1", &base), ("mcp", &dca), ("lp", &lp)] {
        let line: String = res
            .u_star
            .channel(0)
            .chunks(10)
            .map(|c| {
                let mean = c.iter().sum::<f64>() / c.len() as f64;
                match mean {
                    m if m > 0.5 => '+',
                    m if m < -0.5 => '-',
                    m if m.abs() > 1e-6 => '.',
                    _ => ' ',
                }
            })
            .collect();
        println!("{name:<4}|{line}|");
    }
    Ok(())
}
