//! Matrix exponential and zero-order-hold discretization.

use handsoff::{expm, zoh_discretize, Matrix};

fn main() -> handsoff::Result<()> {
    let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]])?;
    let bext = Matrix::from_rows(&[[0.0, 0.0], [1.0, -1.0]])?;
    let (ad, bd) = zoh_discretize(&a, &bext, 0.5)?;
    println!("double integrator, delta = 0.5");
    println!("Ad = {ad:?}");
    println!("Bd = {bd:?}");

    // Rotation generator: exp(tJ) is a rotation by t radians.
    let t = 40.0;
    let j = Matrix::from_rows(&[[0.0, -t], [t, 0.0]])?;
    let r = expm(&j)?;
    let exact = Matrix::from_rows(&[[t.cos(), -t.sin()], [t.sin(), t.cos()]])?;
    println!("rotation by {t} rad, max error {:.2e}", r.max_abs_diff(&exact));

    let scalar = Matrix::from_rows(&[[-1.0]])?;
    let (ad, bd) = zoh_discretize(&scalar, &Matrix::from_rows(&[[1.0]])?, 1.0)?;
    println!("first-order lag: Ad = {:.12}, Bd = {:.12}", ad[(0, 0)], bd[(0, 0)]);
    Ok(())
}
