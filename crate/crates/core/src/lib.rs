//! Maximum hands-off control of continuous-time linear systems.
//!
//! The minimum-support (`L⁰`-optimal) input that steers `ẋ = Ax + Bu` from
//! `x0` to the origin under `‖u‖∞ ≤ 1` is recovered by replacing the `L⁰`
//! cost with a sparsity-promoting penalty `ψ` (MCP, SCAD, log-sum, `Lp`,
//! capped-ℓ¹ or ℓ¹−ℓ²). Whenever `φ(u) = |u| − ψ(u)` satisfies the
//! separability, evenness and bound conditions checked by
//! [`Penalty::validate_assumption`], the penalized problem has exactly the
//! same minimizers as the `L⁰` problem, all of them bang-off-bang.
//!
//! Numerically the problem is transcribed with a zero-order hold
//! ([`system::build_discrete`]), split into nonnegative parts and solved by
//! the DC algorithm ([`dca::run_dca`]), whose convex subproblems are small
//! box-constrained LPs ([`lp::solve_lp`]). The [`oracle`] module checks
//! results against the analytic double-integrator solution and exhaustive
//! search.

pub mod cli;
pub mod dca;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod penalty;
pub mod system;

pub use dca::{
    bang_off_bang_deviation, cost_jd, l0_measure, recombine, run_dca, solve_l1, split_control,
    ControlSignal, DcaConfig, DcaResult, SplitControl, StopReason, WarmStart,
};
pub use error::{Error, Result};
pub use linalg::{expm, zoh_discretize, Matrix};
pub use lp::{kkt_residual, solve_lp, LpProblem, LpSolution, LpStatus};
pub use oracle::{
    brute_force_l0, double_integrator_certificate, make_exact_instance, CertificateReport,
    CertificateTolerances,
};
pub use penalty::{AssumptionReport, AssumptionTag, Penalty, PenaltyKind, PenaltySpec};
pub use system::{build_discrete, check_feasible, simulate, ControlProblem, DiscreteProblem, LinearSystem};
