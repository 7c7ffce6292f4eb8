//! Sparse steering of the double integrator from x0 = (1, -1) in T = 5 s.
//!
//! Runs every penalty family with an L1 warm start and checks each result
//! against the analytic minimum-support solution.
//!
//! `cargo run --release --example dca_double_integrator -- [N]`

use std::time::Instant;

use handsoff::{
    build_discrete, double_integrator_certificate, run_dca, CertificateTolerances, ControlProblem,
    DcaConfig, LinearSystem, Penalty, WarmStart,
};

fn main() -> handsoff::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let problem = ControlProblem::new(LinearSystem::double_integrator(), vec![1.0, -1.0], 5.0)?;
    let dp = build_discrete(&problem, steps)?;
    let cfg = DcaConfig { warm_start: WarmStart::L1, ..DcaConfig::default() };
    let tols = CertificateTolerances::for_steps(steps);

    let penalties = [
        Penalty::lp(0.5, 0.8)?,
        Penalty::mcp(1.0, 0.5)?,
        Penalty::scad(0.25, 3.0)?,
        Penalty::lsp_normalized(0.1, 1e-6)?,
        Penalty::l1l2(0.1)?,
        Penalty::capped_l1(0.8, 0.5)?,
    ];
    println!("{:<46} {:>9} {:>9} {:>4} {:>8} {:>8}", "penalty", "l0", "dblint", "LPs", "cert", "time");
    for pen in &penalties {
        let t = Instant::now();
        let res = run_dca(&dp, pen, &cfg)?;
        let cert = double_integrator_certificate(&res.u_star, &problem.x0, problem.horizon, &tols)?;
        println!(
            "{:<46} {:>9.5} {:>9.5} {:>4} {:>8} {:>7.2}s",
            pen.to_string(),
            res.l0,
            cert.dblint_measured,
            res.lp_solves,
            if cert.passed { "pass" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
