//! Ground truth to check solver output against.
//!
//! * [`double_integrator_certificate`]: for `ẍ = u` with `x0 = (ξ₁, ξ₂)`,
//!   the minimum-support controls are exactly the `{0, 1}`-valued inputs
//!   with support length `−ξ₂` and `∫₀ᵀ∫₀^θ u dt dθ = −ξ₁ − ξ₂T`.
//! * [`brute_force_l0`]: exhaustive search over `{−1, 0, 1}^{mN}`.
//! * [`make_exact_instance`]: picks `x0` so that a chosen grid signal is
//!   exactly feasible.

use serde::Serialize;

use crate::dca::{l0_measure, split_control, ControlSignal};
use crate::error::{Error, Result};
use crate::linalg::{expm, zoh_discretize};
use crate::system::{build_discrete, simulate, ControlProblem, DiscreteProblem, LinearSystem};

/// Exhaustive search is limited to `3^16` candidates.
pub const MAX_BRUTE_FORCE_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateTolerances {
    /// Largest distance to `{0, 1}` for a sample to count as exact.
    pub value: f64,
    /// Fractional samples tolerated per support edge.
    pub fractional_per_edge: usize,
    pub l0: f64,
    pub double_integral: f64,
    pub terminal: f64,
    /// Support threshold used when measuring `L⁰`.
    pub theta: f64,
}

impl CertificateTolerances {
    /// Tolerances for a grid with `steps` samples: the double-integral check
    /// uses a left Riemann sum whose error is `O(Δ)`.
    pub fn for_steps(steps: usize) -> Self {
        let coarse = steps < 1000;
        Self {
            value: 1e-3,
            fractional_per_edge: 2,
            l0: if coarse { 0.05 } else { 0.01 },
            double_integral: if coarse { 0.1 } else { 0.05 },
            terminal: 1e-6,
            theta: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    /// Largest distance of any sample from `{0, 1}`.
    pub value_deviation: f64,
    pub fractional_samples: usize,
    pub support_edges: usize,
    pub l0_measured: f64,
    pub l0_expected: f64,
    pub dblint_measured: f64,
    pub dblint_expected: f64,
    pub terminal_norm: f64,
    pub value_ok: bool,
    pub l0_ok: bool,
    pub dblint_ok: bool,
    pub terminal_ok: bool,
    pub passed: bool,
}

/// Checks `u` against the analytic characterization of the minimum-support
/// controls of the double integrator.
pub fn double_integrator_certificate(
    u: &ControlSignal,
    x0: &[f64],
    horizon: f64,
    tols: &CertificateTolerances,
) -> Result<CertificateReport> {
    if u.inputs() != 1 {
        return Err(Error::Dimension(format!(
            "double integrator has one input, signal has {}",
            u.inputs()
        )));
    }
    if x0.len() != 2 {
        return Err(Error::Dimension(format!(
            "double integrator has two states, x0 has {}",
            x0.len()
        )));
    }
    let (xi1, xi2) = (x0[0], x0[1]);
    let s = u.channel(0);
    let n = s.len();
    let delta = u.delta;

    let dist01 = |x: f64| x.abs().min((x - 1.0).abs());
    let value_deviation = s.iter().map(|&x| dist01(x)).fold(0.0, f64::max);
    let fractional: Vec<usize> = (0..n).filter(|&k| dist01(s[k]) > tols.value).collect();
    let in_support = |k: usize| s[k].abs() > tols.theta;
    let mut edges = usize::from(n > 0 && in_support(0)) + usize::from(n > 0 && in_support(n - 1));
    edges += (1..n).filter(|&k| in_support(k) != in_support(k - 1)).count();
    // Fractional samples must sit strictly between 0 and 1 and touch an edge.
    let near_edge = |k: usize| {
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(n - 1);
        (lo..=hi).any(|i| in_support(i) != in_support(k))
            || in_support(k) && (lo == 0 || hi == n - 1)
    };
    let value_ok = fractional.len() <= tols.fractional_per_edge * edges
        && fractional
            .iter()
            .all(|&k| s[k] > -tols.value && s[k] < 1.0 + tols.value && near_edge(k));

    let l0_measured = l0_measure(u, tols.theta);
    let l0_expected = -xi2;

    let mut running = 0.0;
    let mut outer = 0.0;
    for &x in &s {
        outer += running;
        running += x;
    }
    let dblint_measured = delta * delta * outer;
    let dblint_expected = -xi1 - xi2 * horizon;

    let problem = ControlProblem::new(LinearSystem::double_integrator(), x0.to_vec(), horizon)?;
    let dp = build_discrete(&problem, n)?;
    let states = simulate(&dp, x0, &split_control(u).z)?;
    let terminal_norm = states
        .last()
        .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
        .unwrap_or(0.0);

    let l0_ok = (l0_measured - l0_expected).abs() <= tols.l0;
    let dblint_ok = (dblint_measured - dblint_expected).abs() <= tols.double_integral;
    let terminal_ok = terminal_norm <= tols.terminal;
    Ok(CertificateReport {
        value_deviation,
        fractional_samples: fractional.len(),
        support_edges: edges,
        l0_measured,
        l0_expected,
        dblint_measured,
        dblint_expected,
        terminal_norm,
        value_ok,
        l0_ok,
        dblint_ok,
        terminal_ok,
        passed: value_ok && l0_ok && dblint_ok && terminal_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult {
    /// `None` when no grid point is `eps`-feasible.
    pub min_l0: Option<f64>,
    pub minimizers: Vec<ControlSignal>,
    pub candidates: u64,
}

/// Minimum support over all `u ∈ {−1, 0, 1}^{mN}` with
/// `‖Φ split(u) + ζ‖∞ ≤ eps`.
pub fn brute_force_l0(dp: &DiscreteProblem, eps: f64) -> Result<BruteForceResult> {
    let m = dp.inputs;
    let slots = m * dp.steps;
    if slots > MAX_BRUTE_FORCE_SAMPLES {
        return Err(Error::OracleSize(format!(
            "{slots} input samples exceed the limit of {MAX_BRUTE_FORCE_SAMPLES}"
        )));
    }
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("eps must be non-negative, got {eps}")));
    }
    let n = dp.states();
    // Column of Φ driven by +1 on slot i (the v-part); −1 uses its negative.
    let cols: Vec<Vec<f64>> = (0..slots)
        .map(|i| {
            let (k, j) = (i / m, i % m);
            dp.phi.column(2 * m * k + j)
        })
        .collect();

    const VALUES: [f64; 3] = [0.0, 1.0, -1.0];
    let mut digits = vec![0u8; slots];
    let mut sum = dp.zeta.clone();
    let mut nonzero = 0usize;
    let mut best: Option<usize> = None;
    let mut minimizers: Vec<Vec<f64>> = Vec::new();
    let mut candidates = 0u64;
    // Incremental sums drift; anything within this slack is rechecked exactly.
    let recheck = eps + 1e-9 * (1.0 + dp.zeta.iter().fold(0.0_f64, |a, v| a.max(v.abs())));

    loop {
        candidates += 1;
        if best.is_none_or(|b| nonzero <= b)
            && sum.iter().all(|v| v.abs() <= recheck)
        {
            let u: Vec<f64> = digits.iter().map(|&d| VALUES[d as usize]).collect();
            let mut exact = dp.zeta.clone();
            for (i, &x) in u.iter().enumerate() {
                if x != 0.0 {
                    for r in 0..n {
                        exact[r] += x * cols[i][r];
                    }
                }
            }
            if exact.iter().all(|v| v.abs() <= eps) {
                match best {
                    Some(b) if nonzero == b => minimizers.push(u),
                    _ => {
                        best = Some(nonzero);
                        minimizers = vec![u];
                    }
                }
            }
        }

        // Odometer step with incremental update of ζ + Φ z.
        let mut i = 0;
        loop {
            if i == slots {
                let min_l0 = best.map(|b| b as f64 * dp.delta);
                let minimizers = minimizers
                    .into_iter()
                    .map(|flat| {
                        ControlSignal::new(dp.delta, flat.chunks(m).map(<[f64]>::to_vec).collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                return Ok(BruteForceResult {
                    min_l0,
                    minimizers,
                    candidates,
                });
            }
            let old = VALUES[digits[i] as usize];
            digits[i] = (digits[i] + 1) % 3;
            let new = VALUES[digits[i] as usize];
            let d = new - old;
            for r in 0..n {
                sum[r] += d * cols[i][r];
            }
            nonzero = nonzero + usize::from(new != 0.0) - usize::from(old != 0.0);
            if digits[i] != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// Builds the problem whose initial state is `x0 = −Ad^{−N} Φ split(planted)`,
/// so `planted` steers it exactly to the origin on the `N`-sample grid.
pub fn make_exact_instance(
    system: &LinearSystem,
    horizon: f64,
    steps: usize,
    planted: &ControlSignal,
) -> Result<ControlProblem> {
    if planted.steps() != steps {
        return Err(Error::Dimension(format!(
            "planted signal has {} samples, grid has {steps}",
            planted.steps()
        )));
    }
    if planted.inputs() != system.inputs() {
        return Err(Error::Dimension(format!(
            "planted signal has {} channels, system has {} inputs",
            planted.inputs(),
            system.inputs()
        )));
    }
    if !(horizon > 0.0) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    let delta = horizon / steps as f64;
    let bext = system.b().hstack(&system.b().scale(-1.0))?;
    let (ad, bd) = zoh_discretize(system.a(), &bext, delta)?;
    let z = split_control(planted).z;
    let w = 2 * system.inputs();

    let mut x = vec![0.0; system.states()];
    for k in 0..steps {
        let drift = ad.mul_vec(&x)?;
        let forced = bd.mul_vec(&z[k * w..(k + 1) * w])?;
        x = drift.iter().zip(&forced).map(|(a, b)| a + b).collect();
    }
    let back = expm(&system.a().scale(-delta))?;
    for _ in 0..steps {
        x = back.mul_vec(&x)?;
    }
    ControlProblem::new(system.clone(), x.iter().map(|v| 0.0 - v).collect(), horizon)
}
