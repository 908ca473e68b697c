//! P1 Galerkin discretization of the degenerate weak problem
//! `B_v(f, g) = h(g)` with interior unknowns only, coercivity certificates,
//! the discrete Poincaré constant, and the local-mass divergence study.

mod assemble;
mod coeffs;
mod coercivity;
mod nonintegrability;
mod poincare;
mod solve;
mod space;
mod sparse;
mod study;

pub use assemble::{assemble, weighted_pair, AssembledSystem};
pub use coeffs::{Coefficient, CoefficientSet, GradientFn};
pub use coercivity::{coercivity_check, CoercivityCase, CoercivityReport, GAMMA_RESOLUTION, INF_SAFETY};
pub use nonintegrability::{nonintegrability_check, NonintegrabilityReport};
pub use poincare::{estimate_poincare, PoincareEstimate, POINCARE_TOL};
pub use solve::{bicgstab, cg, dense_lu, solve, BoundCheck, SolveReport, SolverMethod, DENSE_LIMIT};
pub use space::FESpace;
pub use sparse::CsrMatrix;
pub use study::{divergence_study, StudyLevel, StudyRow, StudySetup, StudyTable, StudyThresholds, StudyVerdict, STUDY_HEADER};
