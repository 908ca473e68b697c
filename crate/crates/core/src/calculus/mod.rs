//! Weighted norms, verifiers for the weak-derivative, Leibniz and
//! integration-by-parts identities, traces, and inequality checks.

mod battery;
mod field;
mod identities;
mod inequality;
mod norms;
mod trace;

pub use battery::{Bump, TestFunctionBattery, BUMP_SCALES, MAX_BUMP_ORDER};
pub use field::{Evaluator, ScalarField};
pub use identities::{ibp_residual, leibniz_residual, power_partial, weak_derivative_residual, ResidualReport, IDENTITY_TOL};
pub use inequality::{
    certified_constant, inequality_check, random_bump, random_radial_polynomial, InequalityKind, InequalitySetup, MarginReport,
    INEQUALITY_TOL,
};
pub use norms::{density_sequence, sobolev_norm, weighted_norm};
pub use trace::{trace_compact, trace_eval, TraceMode, TraceReport};
