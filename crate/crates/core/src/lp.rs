//! Bounded-variable revised simplex for
//!
//! ```text
//! minimize cᵀz  subject to  Aeq z = beq,  0 ≤ z ≤ 1
//! ```
//!
//! The equality block has as many rows as the plant has states, so the basis
//! is tiny and is refactorized from scratch every iteration. Phase 1 adds one
//! artificial column per row; phase 2 pins those artificials to zero instead
//! of removing them, so a redundant row simply keeps its artificial basic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};

pub const DEFAULT_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-10;
/// Final values this close to a bound are reported on the bound.
const BOUND_SNAP: f64 = 1e-11;
const DEGENERATE_STEP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub a_eq: Matrix,
    pub b_eq: Vec<f64>,
}

impl LpProblem {
    pub fn new(c: Vec<f64>, a_eq: Matrix, b_eq: Vec<f64>) -> Result<Self> {
        if c.len() != a_eq.cols() {
            return Err(Error::Dimension(format!(
                "{} cost entries for {} variables",
                c.len(),
                a_eq.cols()
            )));
        }
        if b_eq.len() != a_eq.rows() {
            return Err(Error::Dimension(format!(
                "{} right-hand sides for {} rows",
                b_eq.len(),
                a_eq.rows()
            )));
        }
        if c.iter().chain(&b_eq).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite LP data".into()));
        }
        Ok(Self { c, a_eq, b_eq })
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b_eq.len()
    }

    /// `‖Aeq z − beq‖∞`.
    pub fn eq_residual(&self, z: &[f64]) -> f64 {
        self.a_eq
            .mul_vec(z)
            .expect("dimension checked at construction")
            .iter()
            .zip(&self.b_eq)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub z: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    pub eq_residual: f64,
    pub kkt_residual: f64,
    /// Simplex iterations over both phases, bound flips included.
    pub iterations: usize,
    /// Equality multipliers `y` with reduced costs `c − Aeqᵀ y`.
    pub duals: Vec<f64>,
    /// Sum of artificials at the end of phase 1.
    pub phase1_value: f64,
    pub detail: Option<String>,
}

/// First-order optimality residual of `z` with multipliers `duals`.
///
/// Returns the largest of the equality residual, the box violation, and the
/// sign violation of each reduced cost `dⱼ = cⱼ − aⱼᵀy` given where `zⱼ` sits
/// (`dⱼ ≥ 0` at the lower bound, `dⱼ ≤ 0` at the upper bound, `dⱼ = 0`
/// strictly inside).
pub fn kkt_residual(p: &LpProblem, z: &[f64], duals: &[f64]) -> Result<f64> {
    if z.len() != p.num_vars() || duals.len() != p.num_rows() {
        return Err(Error::Dimension(format!(
            "kkt check with {} primal / {} dual entries for a {}x{} problem",
            z.len(),
            duals.len(),
            p.num_rows(),
            p.num_vars()
        )));
    }
    let at_bound = DEFAULT_TOL;
    let aty = p.a_eq.tr_mul_vec(duals)?;
    let mut worst = p.eq_residual(z);
    for ((&zj, &cj), &ay) in z.iter().zip(&p.c).zip(&aty) {
        let d = cj - ay;
        worst = worst.max(-zj).max(zj - 1.0);
        let slack = if zj <= at_bound {
            (-d).max(0.0)
        } else if zj >= 1.0 - at_bound {
            d.max(0.0)
        } else {
            d.abs()
        };
        worst = worst.max(slack);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic,
    Lower,
    Upper,
}

#[derive(Debug)]
enum PhaseEnd {
    Optimal,
    Failed(String),
}

struct Simplex<'a> {
    p: &'a LpProblem,
    n: usize,
    q: usize,
    // Column-major copy of Aeq.
    cols: Vec<f64>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    iterations: usize,
    max_iterations: usize,
    tol: f64,
}

impl<'a> Simplex<'a> {
    fn new(p: &'a LpProblem, tol: f64) -> Self {
        let n = p.num_rows();
        let q = p.num_vars();
        let mut cols = vec![0.0; n * q];
        for r in 0..n {
            for (j, &v) in p.a_eq.row(r).iter().enumerate() {
                cols[j * n + r] = v;
            }
        }
        let total = q + n;
        let mut x = vec![0.0; total];
        let mut state = vec![VarState::Lower; total];
        // Start each structural variable at the bound its cost prefers.
        for j in 0..q {
            if p.c[j] < 0.0 {
                x[j] = 1.0;
                state[j] = VarState::Upper;
            }
        }
        let mut resid = p.b_eq.clone();
        for j in 0..q {
            if x[j] != 0.0 {
                for r in 0..n {
                    resid[r] -= cols[j * n + r] * x[j];
                }
            }
        }
        let art_sign: Vec<f64> = resid.iter().map(|&r| if r >= 0.0 { 1.0 } else { -1.0 }).collect();
        let mut basis = Vec::with_capacity(n);
        for r in 0..n {
            x[q + r] = resid[r].abs();
            state[q + r] = VarState::Basic;
            basis.push(q + r);
        }
        let mut lower = vec![0.0; total];
        let mut upper = vec![1.0; total];
        for r in 0..n {
            lower[q + r] = 0.0;
            upper[q + r] = f64::INFINITY;
        }
        Self {
            p,
            n,
            q,
            cols,
            art_sign,
            lower,
            upper,
            x,
            state,
            basis,
            iterations: 0,
            max_iterations: 50 * total + 1000,
            tol,
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.q {
            self.cols[j * self.n..(j + 1) * self.n].to_vec()
        } else {
            let mut e = vec![0.0; self.n];
            e[j - self.q] = self.art_sign[j - self.q];
            e
        }
    }

    fn factor(&self) -> Option<Lu> {
        let n = self.n;
        let mut b = vec![0.0; n * n];
        for (k, &j) in self.basis.iter().enumerate() {
            let col = self.column(j);
            for r in 0..n {
                b[r * n + k] = col[r];
            }
        }
        Lu::factor(n, &b, 1e-14)
    }

    /// Recomputes basic values from the nonbasic ones.
    fn refresh_basic(&mut self, lu: &Lu) {
        let n = self.n;
        let mut rhs = self.p.b_eq.clone();
        for j in 0..self.q + n {
            if self.state[j] != VarState::Basic && self.x[j] != 0.0 {
                let col = self.column(j);
                for r in 0..n {
                    rhs[r] -= col[r] * self.x[j];
                }
            }
        }
        let xb = lu.solve(&rhs);
        for (k, &j) in self.basis.iter().enumerate() {
            self.x[j] = xb[k];
        }
    }

    fn duals(&self, lu: &Lu, cost: &[f64]) -> Vec<f64> {
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        lu.solve_transpose(&cb)
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        if j < self.q {
            let col = &self.cols[j * self.n..(j + 1) * self.n];
            cost[j] - col.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
        } else {
            let r = j - self.q;
            cost[j] - self.art_sign[r] * y[r]
        }
    }

    fn run_phase(&mut self, cost: &[f64]) -> PhaseEnd {
        let total = self.q + self.n;
        let bland_after = 3 * self.q.max(1);
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= self.max_iterations {
                return PhaseEnd::Failed(format!("iteration limit {} reached", self.max_iterations));
            }
            let Some(lu) = self.factor() else {
                return PhaseEnd::Failed("singular basis".into());
            };
            self.refresh_basic(&lu);
            let y = self.duals(&lu, cost);

            // Pricing.
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..total {
                let dir = match self.state[j] {
                    VarState::Basic => continue,
                    _ if self.upper[j] <= self.lower[j] => continue,
                    VarState::Lower => 1.0,
                    VarState::Upper => -1.0,
                };
                let d = self.reduced_cost(j, cost, &y);
                let gain = -dir * d;
                if gain <= self.tol {
                    continue;
                }
                match entering {
                    None => entering = Some((j, gain)),
                    Some((_, best)) if !bland && gain > best => entering = Some((j, gain)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some((e, _)) = entering else {
                return PhaseEnd::Optimal;
            };
            self.iterations += 1;

            let dir = if self.state[e] == VarState::Lower { 1.0 } else { -1.0 };
            let alpha = lu.solve(&self.column(e));
            let amax = alpha.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
            let piv_tol = PIVOT_TOL * amax.max(1.0);

            // Ratio test; `None` as leaving row means the entering variable
            // reaches its own opposite bound first.
            let mut step = self.upper[e] - self.lower[e];
            let mut leave: Option<(usize, f64)> = None;
            for (r, &a) in alpha.iter().enumerate() {
                if a.abs() <= piv_tol {
                    continue;
                }
                let bv = self.basis[r];
                let rate = dir * a;
                let t = if rate > 0.0 {
                    (self.x[bv] - self.lower[bv]) / rate
                } else if self.upper[bv].is_finite() {
                    (self.upper[bv] - self.x[bv]) / -rate
                } else {
                    continue;
                };
                let t = t.max(0.0);
                // Ties prefer a bound flip, then (Bland) the lowest variable
                // index or (otherwise) the largest pivot.
                let better = if t < step - 1e-12 {
                    true
                } else if t <= step + 1e-12 {
                    match leave {
                        Some((lr, _)) if bland => bv < self.basis[lr],
                        Some((lr, _)) => a.abs() > alpha[lr].abs(),
                        None => false,
                    }
                } else {
                    false
                };
                if better {
                    step = t;
                    leave = Some((r, rate));
                }
            }
            if !step.is_finite() {
                return PhaseEnd::Failed("unbounded ray in a bounded problem".into());
            }

            self.x[e] += dir * step;
            for (r, &a) in alpha.iter().enumerate() {
                let bv = self.basis[r];
                self.x[bv] -= dir * step * a;
            }
            match leave {
                None => {
                    let (s, v) = if dir > 0.0 {
                        (VarState::Upper, self.upper[e])
                    } else {
                        (VarState::Lower, self.lower[e])
                    };
                    self.state[e] = s;
                    self.x[e] = v;
                }
                Some((r, rate)) => {
                    let bv = self.basis[r];
                    let (s, v) = if rate > 0.0 {
                        (VarState::Lower, self.lower[bv])
                    } else {
                        (VarState::Upper, self.upper[bv])
                    };
                    self.state[bv] = s;
                    self.x[bv] = v;
                    self.state[e] = VarState::Basic;
                    self.basis[r] = e;
                }
            }

            if step <= DEGENERATE_STEP {
                degenerate_run += 1;
                if degenerate_run > bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
        }
    }
}

/// Solves the box-constrained equality LP. Always reports residuals; never
/// panics on numerical trouble.
pub fn solve_lp(p: &LpProblem, tol: f64) -> LpSolution {
    let q = p.num_vars();
    let n = p.num_rows();
    let mut s = Simplex::new(p, tol);

    let mut cost1 = vec![0.0; q + n];
    for c in cost1.iter_mut().skip(q) {
        *c = 1.0;
    }
    let failure = |s: &Simplex, msg: String, phase1: f64| LpSolution {
        z: s.x[..q].to_vec(),
        objective: f64::NAN,
        status: LpStatus::NumericalFailure,
        eq_residual: p.eq_residual(&s.x[..q]),
        kkt_residual: f64::INFINITY,
        iterations: s.iterations,
        duals: vec![0.0; n],
        phase1_value: phase1,
        detail: Some(msg),
    };

    if let PhaseEnd::Failed(msg) = s.run_phase(&cost1) {
        return failure(&s, format!("phase 1: {msg}"), f64::NAN);
    }
    let phase1_value: f64 = s.x[q..].iter().map(|v| v.abs()).sum();
    if phase1_value > tol {
        let z = s.x[..q].to_vec();
        return LpSolution {
            objective: f64::NAN,
            status: LpStatus::Infeasible,
            eq_residual: p.eq_residual(&z),
            kkt_residual: f64::INFINITY,
            iterations: s.iterations,
            duals: vec![0.0; n],
            phase1_value,
            detail: None,
            z,
        };
    }

    for r in 0..n {
        s.upper[q + r] = 0.0;
        if s.state[q + r] != VarState::Basic {
            s.x[q + r] = 0.0;
            s.state[q + r] = VarState::Lower;
        }
    }
    let mut cost2 = p.c.clone();
    cost2.extend(std::iter::repeat_n(0.0, n));
    if let PhaseEnd::Failed(msg) = s.run_phase(&cost2) {
        return failure(&s, format!("phase 2: {msg}"), phase1_value);
    }
    let Some(lu) = s.factor() else {
        return failure(&s, "singular final basis".into(), phase1_value);
    };
    s.refresh_basic(&lu);
    let duals = s.duals(&lu, &cost2);
    // Round-off in basic values would otherwise show up as support.
    let z: Vec<f64> = s.x[..q]
        .iter()
        .map(|&v| {
            if v <= BOUND_SNAP {
                0.0
            } else if v >= 1.0 - BOUND_SNAP {
                1.0
            } else {
                v
            }
        })
        .collect();
    let objective = z.iter().zip(&p.c).map(|(a, b)| a * b).sum();
    let eq_residual = p.eq_residual(&z);
    let kkt = kkt_residual(p, &z, &duals).unwrap_or(f64::INFINITY);
    LpSolution {
        z,
        objective,
        status: LpStatus::Optimal,
        eq_residual,
        kkt_residual: kkt,
        iterations: s.iterations,
        duals,
        phase1_value,
        detail: None,
    }
}
