//! Plant model, zero-order-hold transcription and feasibility.
//!
//! The decision vector stacks the positive and negative parts of the input
//! sample by sample: `z = [v[0]; w[0]; v[1]; w[1]; …; v[N−1]; w[N−1]]`, each
//! block of length `m`, with `u[k] = v[k] − w[k]` and `z ∈ [0, 1]^{2mN}`.
//! The terminal state is `x[N] = ζ + Φ z`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{zoh_discretize, Matrix};
use crate::lp::{solve_lp, LpProblem, LpStatus};

/// Default tolerance on the phase-1 residual.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-8;

/// `ẋ = A x + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    a: Matrix,
    b: Matrix,
}

impl LinearSystem {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.rows() != a.rows() {
            return Err(Error::Dimension(format!(
                "B has {} rows, A is {}x{}",
                b.rows(),
                a.rows(),
                a.cols()
            )));
        }
        Ok(Self { a, b })
    }

    /// `ẍ = u` written as `x = (position, velocity)`.
    pub fn double_integrator() -> Self {
        let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        Self { a, b }
    }

    pub fn is_double_integrator(&self) -> bool {
        *self == Self::double_integrator()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }
}

/// Steer `x0` to the origin at time `horizon` with `‖u‖∞ ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlProblem {
    pub system: LinearSystem,
    pub x0: Vec<f64>,
    pub horizon: f64,
}

impl ControlProblem {
    pub fn new(system: LinearSystem, x0: Vec<f64>, horizon: f64) -> Result<Self> {
        if x0.len() != system.states() {
            return Err(Error::Dimension(format!(
                "x0 has {} entries, system has {} states",
                x0.len(),
                system.states()
            )));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("x0 must be finite".into()));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self {
            system,
            x0,
            horizon,
        })
    }
}

/// Zero-order-hold transcription of a [`ControlProblem`] on `steps` samples.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub delta: f64,
    pub steps: usize,
    pub inputs: usize,
    /// `e^{AΔ}`.
    pub ad: Matrix,
    /// `∫₀^Δ e^{At} dt · [B, −B]`.
    pub bd: Matrix,
    /// `[Ad^{N−1} Bd, …, Ad Bd, Bd]`.
    pub phi: Matrix,
    /// `Ad^N x0`.
    pub zeta: Vec<f64>,
    pub x0: Vec<f64>,
}

impl DiscreteProblem {
    pub fn states(&self) -> usize {
        self.ad.rows()
    }

    /// Length of the stacked decision vector, `2mN`.
    pub fn num_vars(&self) -> usize {
        2 * self.inputs * self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.delta * self.steps as f64
    }

    /// `ζ + Φ z`.
    pub fn terminal_state(&self, z: &[f64]) -> Result<Vec<f64>> {
        let pz = self.phi.mul_vec(z)?;
        Ok(pz.iter().zip(&self.zeta).map(|(a, b)| a + b).collect())
    }

    /// `‖Φ z + ζ‖∞`.
    pub fn terminal_residual(&self, z: &[f64]) -> Result<f64> {
        Ok(self
            .terminal_state(z)?
            .iter()
            .fold(0.0, |m, v: &f64| m.max(v.abs())))
    }

    /// LP data for `min cᵀz` over the transcribed feasible set.
    pub fn lp(&self, c: Vec<f64>) -> Result<LpProblem> {
        LpProblem::new(c, self.phi.clone(), self.zeta.iter().map(|v| -v).collect())
    }
}

pub fn build_discrete(problem: &ControlProblem, steps: usize) -> Result<DiscreteProblem> {
    if steps == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let sys = &problem.system;
    let n = sys.states();
    let m = sys.inputs();
    let delta = problem.horizon / steps as f64;
    let bext = sys.b().hstack(&sys.b().scale(-1.0))?;
    let (ad, bd) = zoh_discretize(sys.a(), &bext, delta)?;

    let width = 2 * m;
    let mut phi = Matrix::zeros(n, width * steps);
    let mut block = bd.clone();
    for k in (0..steps).rev() {
        phi.set_block(0, k * width, &block);
        if k > 0 {
            block = ad.matmul(&block)?;
        }
    }

    let mut zeta = problem.x0.clone();
    for _ in 0..steps {
        zeta = ad.mul_vec(&zeta)?;
    }

    Ok(DiscreteProblem {
        delta,
        steps,
        inputs: m,
        ad,
        bd,
        phi,
        zeta,
        x0: problem.x0.clone(),
    })
}

/// State sequence `x[0..=N]` of `x[k+1] = Ad x[k] + Bd [v[k]; w[k]]`.
pub fn simulate(dp: &DiscreteProblem, x0: &[f64], z: &[f64]) -> Result<Vec<Vec<f64>>> {
    if z.len() != dp.num_vars() {
        return Err(Error::Dimension(format!(
            "decision vector has {} entries, expected {}",
            z.len(),
            dp.num_vars()
        )));
    }
    if x0.len() != dp.states() {
        return Err(Error::Dimension(format!(
            "x0 has {} entries, expected {}",
            x0.len(),
            dp.states()
        )));
    }
    let width = 2 * dp.inputs;
    let mut states = Vec::with_capacity(dp.steps + 1);
    let mut x = x0.to_vec();
    states.push(x.clone());
    for k in 0..dp.steps {
        let drift = dp.ad.mul_vec(&x)?;
        let forced = dp.bd.mul_vec(&z[k * width..(k + 1) * width])?;
        x = drift.iter().zip(&forced).map(|(a, b)| a + b).collect();
        states.push(x.clone());
    }
    Ok(states)
}

#[derive(Debug, Clone, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// Minimum total slack found by phase 1.
    pub phase1_value: f64,
    pub witness: Option<Vec<f64>>,
}

/// Phase-1 test: is there `z ∈ [0, 1]^{2mN}` with `Φ z + ζ = 0`?
pub fn check_feasible(dp: &DiscreteProblem, tol: f64) -> Result<Feasibility> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let lp = dp.lp(vec![0.0; dp.num_vars()])?;
    let sol = solve_lp(&lp, tol);
    match sol.status {
        LpStatus::Optimal => Ok(Feasibility {
            feasible: true,
            phase1_value: sol.phase1_value,
            witness: Some(sol.z),
        }),
        LpStatus::Infeasible => Ok(Feasibility {
            feasible: false,
            phase1_value: sol.phase1_value,
            witness: None,
        }),
        LpStatus::NumericalFailure => Err(Error::Numerical {
            iteration: sol.iterations,
            detail: format!(
                "feasibility LP failed ({}); equality residual {:e}",
                sol.detail.unwrap_or_default(),
                sol.eq_residual
            ),
        }),
    }
}
