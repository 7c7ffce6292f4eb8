//! Sparsity-promoting penalties `ψ` and the gap function `φ(u) = |u| − ψ(u)`.
//!
//! The non-convex running cost is `|u| − φ(u) = ψ(u)`. On `[0, 1]` every
//! catalog `φ` is convex, so `h(z) = Σ φ(zᵢ)` is the convex part subtracted
//! in the DC split and `phi_subgradient` supplies the linearization slope.
//!
//! Parameters are accepted on the closure of each family's admissible range
//! (where the formula stays well defined); boundary values such as an
//! `L1L2` weight of exactly one are then diagnosed by
//! [`Penalty::validate_assumption`] rather than rejected up front.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default clamp for the `Lp` slope at the origin.
pub const DEFAULT_LP_EPSILON: f64 = 1e-8;
/// Default slack demanded by the grid check of the strict inequalities.
pub const DEFAULT_MARGIN: f64 = 1e-12;
/// Default grid size for the assumption check.
pub const DEFAULT_GRID: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    /// `λ|u|^p`.
    Lp,
    /// Minimax concave penalty.
    Mcp,
    /// Smoothly clipped absolute deviation.
    Scad,
    /// Log-sum penalty `λ log(1 + |u|/α)`.
    Lsp,
    /// `λ min(|u|, α)`.
    CappedL1,
    /// `|u| − λu²`.
    L1l2,
}

impl PenaltyKind {
    pub fn name(self) -> &'static str {
        match self {
            PenaltyKind::Lp => "lp",
            PenaltyKind::Mcp => "mcp",
            PenaltyKind::Scad => "scad",
            PenaltyKind::Lsp => "lsp",
            PenaltyKind::CappedL1 => "capped_l1",
            PenaltyKind::L1l2 => "l1l2",
        }
    }

    /// Admissible range of the family, as printed in parameter errors.
    pub fn admissible_range(self) -> &'static str {
        match self {
            PenaltyKind::Lp => "lambda > 0, 0 < p < 1",
            PenaltyKind::Mcp => "lambda > 0, alpha > 0",
            PenaltyKind::Scad => "0 < lambda < 1, alpha > 1",
            PenaltyKind::Lsp => "lambda > 0, alpha > 0",
            PenaltyKind::CappedL1 => "lambda > 0, 0 < alpha < 1",
            PenaltyKind::L1l2 => "0 < lambda < 1",
        }
    }

    pub const ALL: [PenaltyKind; 6] = [
        PenaltyKind::Lp,
        PenaltyKind::Mcp,
        PenaltyKind::Scad,
        PenaltyKind::Lsp,
        PenaltyKind::CappedL1,
        PenaltyKind::L1l2,
    ];
}

impl FromStr for PenaltyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PenaltyKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown penalty kind {s:?}")))
    }
}

/// One scalar penalty, applied identically to every input channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Penalty {
    kind: PenaltyKind,
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
}

/// Which part of the separability/evenness/bound/uniformity assumption failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AssumptionTag {
    A1,
    A2,
    A3,
    A4,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub passed: bool,
    pub violated: Vec<AssumptionTag>,
    /// Smallest slack found among the bound checks; negative or below the
    /// margin when violated.
    pub worst_margin: f64,
    pub witness_u: f64,
    /// Strict inequalities can only be checked on a finite grid.
    pub grid_verified: bool,
    pub grid_size: usize,
}

impl Penalty {
    /// Builds a penalty, checking parameters against the closure of the
    /// family's range. `alpha` is required for MCP, SCAD, LSP and capped-L1;
    /// `p` only for Lp.
    pub fn new(kind: PenaltyKind, lambda: f64, alpha: Option<f64>, p: Option<f64>) -> Result<Self> {
        let err = |detail: String| Error::Parameter {
            penalty: kind.name(),
            detail,
            range: kind.admissible_range(),
        };
        let need = |name: &str, v: Option<f64>| -> Result<f64> {
            match v {
                Some(x) if x.is_finite() => Ok(x),
                Some(x) => Err(err(format!("{name} = {x} is not finite"))),
                None => Err(err(format!("missing {name}"))),
            }
        };
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(err(format!("lambda = {lambda}")));
        }
        let (alpha, p) = match kind {
            PenaltyKind::Lp => {
                let p = need("p", p)?;
                if !(p > 0.0 && p <= 1.0) {
                    return Err(err(format!("p = {p}")));
                }
                (None, Some(p))
            }
            PenaltyKind::Mcp | PenaltyKind::Lsp => {
                let a = need("alpha", alpha)?;
                if a <= 0.0 {
                    return Err(err(format!("alpha = {a}")));
                }
                (Some(a), None)
            }
            PenaltyKind::Scad => {
                let a = need("alpha", alpha)?;
                if lambda > 1.0 {
                    return Err(err(format!("lambda = {lambda}")));
                }
                if a <= 1.0 {
                    return Err(err(format!("alpha = {a}")));
                }
                (Some(a), None)
            }
            PenaltyKind::CappedL1 => {
                let a = need("alpha", alpha)?;
                if !(a > 0.0 && a <= 1.0) {
                    return Err(err(format!("alpha = {a}")));
                }
                (Some(a), None)
            }
            PenaltyKind::L1l2 => {
                if lambda > 1.0 {
                    return Err(err(format!("lambda = {lambda}")));
                }
                (None, None)
            }
        };
        Ok(Self {
            kind,
            lambda,
            alpha,
            p,
        })
    }

    pub fn lp(p: f64, lambda: f64) -> Result<Self> {
        Self::new(PenaltyKind::Lp, lambda, None, Some(p))
    }

    pub fn mcp(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(PenaltyKind::Mcp, lambda, Some(alpha), None)
    }

    pub fn scad(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(PenaltyKind::Scad, lambda, Some(alpha), None)
    }

    pub fn lsp(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(PenaltyKind::Lsp, lambda, Some(alpha), None)
    }

    /// Log-sum penalty scaled so that `ψ(1) = unit_value`, i.e.
    /// `λ = unit_value / log(1 + 1/α)`.
    pub fn lsp_normalized(unit_value: f64, alpha: f64) -> Result<Self> {
        Self::lsp(unit_value / (1.0 / alpha).ln_1p(), alpha)
    }

    pub fn capped_l1(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(PenaltyKind::CappedL1, lambda, Some(alpha), None)
    }

    pub fn l1l2(lambda: f64) -> Result<Self> {
        Self::new(PenaltyKind::L1l2, lambda, None, None)
    }

    pub fn kind(&self) -> PenaltyKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn p(&self) -> Option<f64> {
        self.p
    }

    fn a(&self) -> f64 {
        self.alpha.unwrap_or(f64::NAN)
    }

    /// The penalty `ψ(u)`.
    pub fn psi(&self, u: f64) -> f64 {
        let x = u.abs();
        let lam = self.lambda;
        match self.kind {
            PenaltyKind::Lp => lam * x.powf(self.p.unwrap_or(1.0)),
            PenaltyKind::Mcp => {
                let a = self.a();
                if x <= a * lam {
                    lam * x - x * x / (2.0 * a)
                } else {
                    a * lam * lam / 2.0
                }
            }
            PenaltyKind::Scad => {
                let a = self.a();
                if x <= lam {
                    lam * x
                } else if x <= a * lam {
                    -(x * x - 2.0 * a * lam * x + lam * lam) / (2.0 * (a - 1.0))
                } else {
                    (a + 1.0) * lam * lam / 2.0
                }
            }
            PenaltyKind::Lsp => lam * (x / self.a()).ln_1p(),
            PenaltyKind::CappedL1 => lam * x.min(self.a()),
            PenaltyKind::L1l2 => x - lam * x * x,
        }
    }

    /// The gap `φ(u) = |u| − ψ(u)`.
    pub fn phi(&self, u: f64) -> f64 {
        u.abs() - self.psi(u)
    }

    /// Slope of `ψ` on `[0, 1]`: the branch selected by the same `≤`
    /// comparisons as [`psi`](Self::psi), which is the left derivative at
    /// kinks and the right derivative at zero.
    fn psi_slope(&self, u: f64, lp_epsilon: f64) -> f64 {
        let lam = self.lambda;
        match self.kind {
            PenaltyKind::Lp => {
                let p = self.p.unwrap_or(1.0);
                let x = if u > 0.0 { u } else { lp_epsilon };
                lam * p * x.powf(p - 1.0)
            }
            PenaltyKind::Mcp => {
                let a = self.a();
                if u <= a * lam {
                    lam - u / a
                } else {
                    0.0
                }
            }
            PenaltyKind::Scad => {
                let a = self.a();
                if u <= lam {
                    lam
                } else if u <= a * lam {
                    (a * lam - u) / (a - 1.0)
                } else {
                    0.0
                }
            }
            PenaltyKind::Lsp => lam / (self.a() + u),
            PenaltyKind::CappedL1 => {
                if u <= self.a() {
                    lam
                } else {
                    0.0
                }
            }
            PenaltyKind::L1l2 => 1.0 - 2.0 * lam * u,
        }
    }

    /// One element of `∂φ(u)` for `u ∈ [0, 1]`, chosen deterministically.
    /// For `Lp` the slope at zero is unbounded and is clamped to its value
    /// at `lp_epsilon`.
    pub fn phi_subgradient(&self, u: f64, lp_epsilon: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("subgradient requested at u = {u} outside [0, 1]")));
        }
        if !(lp_epsilon > 0.0) {
            return Err(Error::Domain(format!("lp_epsilon must be positive, got {lp_epsilon}")));
        }
        Ok(1.0 - self.psi_slope(u, lp_epsilon))
    }

    /// Points of `(0, 1)` where `ψ` switches branch.
    pub fn kinks(&self) -> Vec<f64> {
        let lam = self.lambda;
        let pts = match self.kind {
            PenaltyKind::Mcp => vec![self.a() * lam],
            PenaltyKind::Scad => vec![lam, self.a() * lam],
            PenaltyKind::CappedL1 => vec![self.a()],
            _ => vec![],
        };
        pts.into_iter().filter(|&x| x > 0.0 && x < 1.0).collect()
    }

    /// Grid check of the assumption on `φ`.
    ///
    /// Separability and uniformity across channels hold structurally because
    /// one scalar penalty is applied to every channel. Evenness is checked at
    /// `±u`, and the bound conditions `φ(0) = 0`, `φ(u) < φ(1)|u|` on the
    /// open grid and `φ(1) < 1` are checked with slack `margin`.
    pub fn validate_assumption_with(&self, grid_size: usize, margin: f64) -> AssumptionReport {
        let grid_size = grid_size.max(1);
        let mut violated = Vec::new();
        let phi1 = self.phi(1.0);
        let mut worst = (f64::INFINITY, 0.0);
        let note = |slack: f64, u: f64, worst: &mut (f64, f64)| {
            if slack < worst.0 {
                *worst = (slack, u);
            }
        };

        let mut even_ok = true;
        for i in 1..=grid_size {
            let u = i as f64 / grid_size as f64;
            if (self.phi(u) - self.phi(-u)).abs() > margin {
                even_ok = false;
            }
        }
        if !even_ok {
            violated.push(AssumptionTag::A2);
        }

        let mut bound_ok = true;
        let at_zero = self.phi(0.0);
        if at_zero != 0.0 {
            bound_ok = false;
            note(-at_zero.abs(), 0.0, &mut worst);
        }
        let top = 1.0 - phi1;
        note(top, 1.0, &mut worst);
        if top <= margin {
            bound_ok = false;
        }
        for i in 1..grid_size {
            let u = i as f64 / grid_size as f64;
            for x in [u, -u] {
                let slack = phi1 * x.abs() - self.phi(x);
                note(slack, x, &mut worst);
                if slack <= margin {
                    bound_ok = false;
                }
            }
        }
        if !bound_ok {
            violated.push(AssumptionTag::A3);
        }

        AssumptionReport {
            passed: violated.is_empty(),
            violated,
            worst_margin: worst.0,
            witness_u: worst.1,
            grid_verified: true,
            grid_size,
        }
    }

    pub fn validate_assumption(&self, grid_size: usize) -> AssumptionReport {
        self.validate_assumption_with(grid_size, DEFAULT_MARGIN)
    }

    /// `c = 1 − φ(1) = ψ(1)`: on bang-off-bang signals the non-convex cost is
    /// `c` times the support length.
    pub fn equivalence_constant(&self) -> Result<f64> {
        let c = 1.0 - self.phi(1.0);
        if c > 0.0 {
            Ok(c)
        } else {
            Err(Error::AssumptionViolated {
                violated: vec![AssumptionTag::A3],
                worst_margin: c,
                witness_u: 1.0,
            })
        }
    }
}

impl fmt::Display for Penalty {
    /// Inline form accepted by [`FromStr`], e.g. `mcp lambda=1 alpha=0.5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} lambda={}", self.kind.name(), self.lambda)?;
        if let Some(a) = self.alpha {
            write!(f, " alpha={a}")?;
        }
        if let Some(p) = self.p {
            write!(f, " p={p}")?;
        }
        Ok(())
    }
}

impl FromStr for Penalty {
    type Err = Error;

    /// Parses `kind key=value ...` with keys `lambda`, `alpha`, `p` and
    /// `unit` (LSP only: sets `λ = unit / log(1 + 1/α)`).
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let kind: PenaltyKind = parts
            .next()
            .ok_or_else(|| Error::Config("empty penalty spec".into()))?
            .parse()?;
        let mut spec = PenaltySpec {
            kind,
            lambda: None,
            alpha: None,
            p: None,
            unit: None,
        };
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got {kv:?}")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("not a number in {kv:?}")))?;
            let slot = match k {
                "lambda" => &mut spec.lambda,
                "alpha" => &mut spec.alpha,
                "p" => &mut spec.p,
                "unit" => &mut spec.unit,
                _ => return Err(Error::Config(format!("unknown penalty field {k:?}"))),
            };
            *slot = Some(v);
        }
        spec.build()
    }
}

/// Serialized penalty description used in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    /// LSP only: target value of `ψ(1)`, replacing `lambda`.
    #[serde(default)]
    pub unit: Option<f64>,
}

impl PenaltySpec {
    pub fn build(&self) -> Result<Penalty> {
        let lambda = match (self.kind, self.lambda, self.unit) {
            (_, Some(_), Some(_)) => {
                return Err(Error::Config("give either lambda or unit, not both".into()))
            }
            (PenaltyKind::Lsp, None, Some(unit)) => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Config("lsp with unit needs alpha".into()))?;
                unit / (1.0 / alpha).ln_1p()
            }
            (_, None, Some(_)) => {
                return Err(Error::Config("unit is only defined for lsp".into()))
            }
            (_, Some(l), None) => l,
            (kind, None, None) => {
                return Err(Error::Parameter {
                    penalty: kind.name(),
                    detail: "missing lambda".into(),
                    range: kind.admissible_range(),
                })
            }
        };
        Penalty::new(self.kind, lambda, self.alpha, self.p)
    }
}

impl From<Penalty> for PenaltySpec {
    fn from(p: Penalty) -> Self {
        PenaltySpec {
            kind: p.kind,
            lambda: Some(p.lambda),
            alpha: p.alpha,
            p: p.p,
            unit: None,
        }
    }
}
