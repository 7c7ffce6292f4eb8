//! The bounded-variable simplex on a small box-constrained LP:
//! minimize cᵀz subject to Az = b, 0 ≤ z ≤ 1.

use handsoff::{kkt_residual, solve_lp, LpProblem, Matrix};

fn main() -> handsoff::Result<()> {
    let a = Matrix::from_rows(&[[1.0, 1.0, 1.0, 0.0], [0.0, 1.0, -1.0, 1.0]])?;
    let p = LpProblem::new(vec![-1.0, 2.0, 0.5, -3.0], a, vec![1.5, 0.25])?;
    let sol = solve_lp(&p, 1e-9);
    println!("status     {:?}", sol.status);
    println!("z          {:?}", sol.z);
    println!("objective  {}", sol.objective);
    println!("duals      {:?}", sol.duals);
    println!("iterations {}", sol.iterations);
    println!("KKT        {:.2e}", kkt_residual(&p, &sol.z, &sol.duals)?);

    let infeasible = LpProblem::new(vec![1.0, 1.0], Matrix::from_rows(&[[1.0, 1.0]])?, vec![3.0])?;
    let sol = solve_lp(&infeasible, 1e-9);
    println!("\nz1 + z2 = 3 on the unit box: {:?}, phase-1 value {}", sol.status, sol.phase1_value);
    Ok(())
}
