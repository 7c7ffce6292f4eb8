//! The DC algorithm on the transcribed split problem.
//!
//! With `g(z) = Σ zᵢ` (the ℓ¹ norm on the nonnegative box) and
//! `h(z) = Σ φ(zᵢ)`, each iteration linearizes `h` at the current iterate
//! and minimizes `g(z) − sᵀz` over the feasible set, which is the LP
//! `min (1 − s)ᵀ z`. Every LP solution is an exact minimizer, so the cost
//! `g − h` never increases from one feasible iterate to the next.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpSolution, LpStatus, DEFAULT_TOL};
use crate::penalty::{Penalty, DEFAULT_GRID, DEFAULT_LP_EPSILON};
use crate::system::DiscreteProblem;

/// Positive and negative parts of a sampled input, stacked sample by sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitControl {
    pub delta: f64,
    pub steps: usize,
    pub inputs: usize,
    pub z: Vec<f64>,
}

impl SplitControl {
    pub fn new(delta: f64, steps: usize, inputs: usize, z: Vec<f64>) -> Result<Self> {
        if z.len() != 2 * steps * inputs {
            return Err(Error::Dimension(format!(
                "split vector has {} entries, expected 2·{inputs}·{steps}",
                z.len()
            )));
        }
        Ok(Self {
            delta,
            steps,
            inputs,
            z,
        })
    }

    pub fn positive(&self, k: usize) -> &[f64] {
        let w = 2 * self.inputs;
        &self.z[k * w..k * w + self.inputs]
    }

    pub fn negative(&self, k: usize) -> &[f64] {
        let w = 2 * self.inputs;
        &self.z[k * w + self.inputs..(k + 1) * w]
    }

    /// `max_{k,j} min(v[k]ⱼ, w[k]ⱼ)`.
    pub fn complementarity_violation(&self) -> f64 {
        (0..self.steps)
            .flat_map(|k| {
                self.positive(k)
                    .iter()
                    .zip(self.negative(k))
                    .map(|(v, w)| v.min(*w))
            })
            .fold(0.0, f64::max)
    }
}

/// Piecewise-constant input: `samples[k]` is held on `[kΔ, (k+1)Δ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSignal {
    pub delta: f64,
    pub samples: Vec<Vec<f64>>,
}

impl ControlSignal {
    pub fn new(delta: f64, samples: Vec<Vec<f64>>) -> Result<Self> {
        let m = samples.first().map_or(0, Vec::len);
        if m == 0 || samples.iter().any(|s| s.len() != m) {
            return Err(Error::Dimension("control samples must be non-empty and rectangular".into()));
        }
        Ok(Self { delta, samples })
    }

    /// Single-input signal from scalar samples.
    pub fn scalar(delta: f64, samples: &[f64]) -> Result<Self> {
        Self::new(delta, samples.iter().map(|&u| vec![u]).collect())
    }

    pub fn steps(&self) -> usize {
        self.samples.len()
    }

    pub fn inputs(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Channel `j` as a flat vector.
    pub fn channel(&self, j: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s[j]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WarmStart {
    /// `z[0] = 0`; only the first slope depends on it.
    Zero,
    /// `z[0]` is the ℓ¹-optimal transcribed control.
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcaConfig {
    pub cost_tol: f64,
    pub step_tol: f64,
    pub max_iter: usize,
    pub lp_tol: f64,
    /// Magnitude above which a sample counts towards the support.
    pub l0_threshold: f64,
    pub lp_epsilon: f64,
    pub warm_start: WarmStart,
}

impl Default for DcaConfig {
    fn default() -> Self {
        Self {
            cost_tol: 1e-8,
            step_tol: 1e-9,
            max_iter: 50,
            lp_tol: DEFAULT_TOL,
            l0_threshold: 1e-6,
            lp_epsilon: DEFAULT_LP_EPSILON,
            warm_start: WarmStart::Zero,
        }
    }
}

impl DcaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cost_tol", self.cost_tol),
            ("step_tol", self.step_tol),
            ("lp_tol", self.lp_tol),
            ("l0_threshold", self.l0_threshold),
            ("lp_epsilon", self.lp_epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("dca.{name} must be positive, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::Config("dca.max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CostStall,
    IterateStall,
    MaxIterations,
    /// Single LP solve (ℓ¹ baseline).
    Baseline,
}

#[derive(Debug, Clone, Serialize)]
pub struct DcaResult {
    pub z_star: SplitControl,
    pub u_star: ControlSignal,
    /// Cost of each feasible iterate, starting with the warm start when it is
    /// feasible.
    pub cost_history: Vec<f64>,
    /// `‖Φ z[l] + ζ‖∞` for each entry of `cost_history`.
    pub iterate_residuals: Vec<f64>,
    /// DCA iterations, i.e. linearized subproblems solved.
    pub iterations: usize,
    /// All LP solves including the ℓ¹ warm start.
    pub lp_solves: usize,
    pub stop_reason: StopReason,
    /// Support length in seconds.
    pub l0: f64,
    pub feas_residual: f64,
    pub complementarity_violation: f64,
    pub bob_deviation: f64,
    /// KKT residual of the last LP.
    pub kkt_residual: f64,
}

/// `J_d(z) = Σ zᵢ − Σ φ(zᵢ)`.
pub fn cost_jd(pen: &Penalty, sc: &SplitControl) -> Result<f64> {
    let slack = 1e-9;
    if let Some(bad) = sc.z.iter().find(|v| **v < -slack || **v > 1.0 + slack) {
        return Err(Error::Domain(format!("split entry {bad} outside [0, 1]")));
    }
    Ok(cost_unchecked(pen, &sc.z))
}

fn cost_unchecked(pen: &Penalty, z: &[f64]) -> f64 {
    z.iter().map(|&x| x - pen.phi(x)).sum()
}

/// `v = max(u, 0)`, `w = max(−u, 0)`.
pub fn split_control(u: &ControlSignal) -> SplitControl {
    let m = u.inputs();
    let mut z = Vec::with_capacity(2 * m * u.steps());
    for s in &u.samples {
        z.extend(s.iter().map(|x| x.max(0.0)));
        z.extend(s.iter().map(|x| (-x).max(0.0)));
    }
    SplitControl {
        delta: u.delta,
        steps: u.steps(),
        inputs: m,
        z,
    }
}

/// `u = v − w`.
pub fn recombine(sc: &SplitControl) -> ControlSignal {
    let samples = (0..sc.steps)
        .map(|k| {
            sc.positive(k)
                .iter()
                .zip(sc.negative(k))
                .map(|(v, w)| v - w)
                .collect()
        })
        .collect();
    ControlSignal {
        delta: sc.delta,
        samples,
    }
}

/// `Δ · #{(k, j) : |u[k]ⱼ| > θ}`.
pub fn l0_measure(u: &ControlSignal, theta: f64) -> f64 {
    let count = u.samples.iter().flatten().filter(|v| v.abs() > theta).count();
    count as f64 * u.delta
}

/// Largest distance of any sample to `{−1, 0, 1}`.
pub fn bang_off_bang_deviation(u: &ControlSignal) -> f64 {
    u.samples
        .iter()
        .flatten()
        .map(|&x| [-1.0, 0.0, 1.0].iter().map(|t| (x - t).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn lp_or_error(dp: &DiscreteProblem, c: Vec<f64>, tol: f64, iteration: usize) -> Result<LpSolution> {
    let sol = solve_lp(&dp.lp(c)?, tol);
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        LpStatus::Infeasible => Err(Error::Infeasible {
            phase1_value: sol.phase1_value,
        }),
        LpStatus::NumericalFailure => Err(Error::Numerical {
            iteration,
            detail: format!(
                "LP subproblem failed: {} (equality residual {:e})",
                sol.detail.unwrap_or_default(),
                sol.eq_residual
            ),
        }),
    }
}

fn finish(
    dp: &DiscreteProblem,
    cfg: &DcaConfig,
    z: Vec<f64>,
    history: (Vec<f64>, Vec<f64>),
    counts: (usize, usize),
    stop_reason: StopReason,
    kkt_residual: f64,
) -> Result<DcaResult> {
    let z_star = SplitControl::new(dp.delta, dp.steps, dp.inputs, z)?;
    let u_star = recombine(&z_star);
    Ok(DcaResult {
        l0: l0_measure(&u_star, cfg.l0_threshold),
        feas_residual: dp.terminal_residual(&z_star.z)?,
        complementarity_violation: z_star.complementarity_violation(),
        bob_deviation: bang_off_bang_deviation(&u_star),
        z_star,
        u_star,
        cost_history: history.0,
        iterate_residuals: history.1,
        iterations: counts.0,
        lp_solves: counts.1,
        stop_reason,
        kkt_residual,
    })
}

/// The ℓ¹-optimal transcribed control: one LP with unit costs.
pub fn solve_l1(dp: &DiscreteProblem, cfg: &DcaConfig) -> Result<DcaResult> {
    cfg.validate()?;
    let sol = lp_or_error(dp, vec![1.0; dp.num_vars()], cfg.lp_tol, 0)?;
    let cost = sol.z.iter().sum();
    let res = dp.terminal_residual(&sol.z)?;
    finish(
        dp,
        cfg,
        sol.z,
        (vec![cost], vec![res]),
        (0, 1),
        StopReason::Baseline,
        sol.kkt_residual,
    )
}

/// Runs the DC algorithm from the configured warm start.
pub fn run_dca(dp: &DiscreteProblem, pen: &Penalty, cfg: &DcaConfig) -> Result<DcaResult> {
    cfg.validate()?;
    let report = pen.validate_assumption(DEFAULT_GRID);
    if !report.passed {
        return Err(Error::AssumptionViolated {
            violated: report.violated,
            worst_margin: report.worst_margin,
            witness_u: report.witness_u,
        });
    }

    let q = dp.num_vars();
    let mut history = Vec::new();
    let mut residuals = Vec::new();
    let mut lp_solves = 0;
    let mut kkt = f64::NAN;

    let mut z = match cfg.warm_start {
        WarmStart::Zero => vec![0.0; q],
        WarmStart::L1 => {
            let sol = lp_or_error(dp, vec![1.0; q], cfg.lp_tol, 0)?;
            lp_solves += 1;
            kkt = sol.kkt_residual;
            history.push(cost_unchecked(pen, &sol.z));
            residuals.push(dp.terminal_residual(&sol.z)?);
            sol.z
        }
    };

    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    for l in 0..cfg.max_iter {
        let mut c = Vec::with_capacity(q);
        for &zi in &z {
            c.push(1.0 - pen.phi_subgradient(zi.clamp(0.0, 1.0), cfg.lp_epsilon)?);
        }
        let sol = lp_or_error(dp, c, cfg.lp_tol, l + 1)?;
        lp_solves += 1;
        iterations += 1;
        kkt = sol.kkt_residual;

        let cost = cost_unchecked(pen, &sol.z);
        let step = z
            .iter()
            .zip(&sol.z)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let stalled_cost = history
            .last()
            .is_some_and(|prev: &f64| (cost - prev).abs() <= cfg.cost_tol);
        history.push(cost);
        residuals.push(dp.terminal_residual(&sol.z)?);
        z = sol.z;

        if step <= cfg.step_tol {
            stop = StopReason::IterateStall;
            break;
        }
        if stalled_cost {
            stop = StopReason::CostStall;
            break;
        }
    }

    finish(
        dp,
        cfg,
        z,
        (history, residuals),
        (iterations, lp_solves),
        stop,
        kkt,
    )
}
