//! Phase-1 reachability test: can `x0` be steered to the origin in time `T`?

use handsoff::{build_discrete, check_feasible, ControlProblem, LinearSystem};

fn main() -> handsoff::Result<()> {
    let cases = [([1.0, -1.0], 5.0), ([0.0, 0.0], 1.0), ([100.0, 0.0], 1.0), ([0.2, 0.0], 1.0)];
    for (x0, horizon) in cases {
        let problem = ControlProblem::new(LinearSystem::double_integrator(), x0.to_vec(), horizon)?;
        let dp = build_discrete(&problem, 200)?;
        let f = check_feasible(&dp, 1e-8)?;
        println!(
            "x0 = {:?}, T = {horizon}: {} (phase-1 value {:.3e})",
            x0,
            if f.feasible { "reachable" } else { "unreachable" },
            f.phase1_value
        );
    }
    Ok(())
}
