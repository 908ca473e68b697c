use super::assemble::assemble;
use super::coeffs::CoefficientSet;
use super::coercivity::{coercivity_check, CoercivityCase, CoercivityReport};
use super::nonintegrability::{nonintegrability_check, NonintegrabilityReport};
use super::solve::{solve, SolverMethod};
use super::space::FESpace;
use crate::error::{Error, Result};
use crate::experiments::emit::{csv_float, csv_opt};
use crate::geometry::{build_disk_mesh, build_interval_mesh, Domain, QuadratureRule, DEFAULT_ORDER};
use crate::weights::SamplePlan;
use std::fmt::Write;

pub const STUDY_HEADER: &str = "level,rings,dofs,mass,mass_ratio,energy,energy_rel_change,gamma,case";

/// One refinement level: `rings` radial layers (cells in 1D), `sectors`
/// angular divisions (ignored in 1D) and grading exponent `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyLevel {
    pub rings: usize,
    pub sectors: usize,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub level: usize,
    pub rings: usize,
    pub dofs: usize,
    /// `∫_{|x|<K} |f_h|`.
    pub mass: f64,
    pub mass_ratio: Option<f64>,
    /// `‖f_h‖_X`.
    pub energy: f64,
    pub energy_rel_change: Option<f64>,
    /// `|h|/γ`.
    pub bound: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyThresholds {
    /// Minimum per-level growth of the local mass.
    pub growth: f64,
    /// Maximum relative change of the energy over the last two levels.
    pub stability: f64,
    /// Allowed excess of the energy over `|h|/γ`.
    pub bound_slack: f64,
}

impl Default for StudyThresholds {
    fn default() -> Self {
        StudyThresholds { growth: 1.3, stability: 0.05, bound_slack: 1.05 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyVerdict {
    pub min_mass_ratio: f64,
    pub mass_grows: bool,
    pub last_energy_change: f64,
    pub energy_stable: bool,
    pub max_bound_ratio: f64,
    pub bound_holds: bool,
}

impl StudyVerdict {
    /// The discrete signature of a solution that is not locally integrable.
    pub fn divergent(&self) -> bool {
        self.mass_grows && self.energy_stable && self.bound_holds
    }
}

/// Per-level record of the local-mass study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub rows: Vec<StudyRow>,
    pub coercivity: CoercivityReport,
    pub nonintegrability: Option<NonintegrabilityReport>,
    /// Present when at least three levels were computed.
    pub verdict: Option<StudyVerdict>,
}

impl StudyTable {
    pub fn gamma(&self) -> f64 {
        self.coercivity.gamma
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(STUDY_HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.level,
                r.rings,
                r.dofs,
                csv_float(r.mass),
                csv_opt(r.mass_ratio),
                csv_float(r.energy),
                csv_opt(r.energy_rel_change),
                csv_float(self.coercivity.gamma),
                self.coercivity.case
            )
            .unwrap();
        }
        s
    }
}

/// Parameters of [`divergence_study`].
#[derive(Debug, Clone)]
pub struct StudySetup {
    pub domain: Domain,
    pub levels: Vec<StudyLevel>,
    /// Radius of the ball `K` around the origin on which mass is measured.
    pub k_radius: f64,
    pub thresholds: StudyThresholds,
    pub solver: SolverMethod,
    pub tol: f64,
    pub quadrature_order: usize,
}

impl StudySetup {
    pub fn new(domain: Domain, levels: Vec<StudyLevel>, k_radius: f64) -> Self {
        StudySetup {
            domain,
            levels,
            k_radius,
            thresholds: StudyThresholds::default(),
            solver: SolverMethod::Auto,
            tol: 1e-10,
            quadrature_order: DEFAULT_ORDER,
        }
    }
}

fn level_space(domain: &Domain, level: &StudyLevel) -> Result<FESpace> {
    let mesh = match *domain {
        Domain::Ball { radius, dim: 2 } => build_disk_mesh(radius, level.rings, level.sectors, level.q)?,
        Domain::Interval { a, b } => {
            let centre = if a < 0.0 && b > 0.0 { 0.0 } else { a };
            build_interval_mesh(a, b, level.rings, level.q, centre)?
        }
        _ => return Err(Error::invalid("the study runs on an interval or a disk")),
    };
    FESpace::new(mesh)
}

/// Solves on each level and records the local mass `∫_K |f_h|` and the
/// energy `‖f_h‖_X`. Unbounded mass with bounded energy is the discrete
/// signature of a weak solution outside `L¹_loc`.
///
/// Coercivity is checked before any solve; a level that fails to converge
/// aborts the study.
pub fn divergence_study(coeffs: &CoefficientSet, setup: &StudySetup) -> Result<StudyTable> {
    let coercivity = coercivity_check(coeffs, &setup.domain, None, &SamplePlan::coarse());
    if coercivity.case == CoercivityCase::None {
        return Err(Error::Hypothesis(format!("coercivity: no sufficient condition holds ({})", coercivity.details.join("; "))));
    }
    let nonintegrability = nonintegrability_check(coeffs, &setup.domain).ok();
    let gamma = coercivity.gamma;
    let rule = QuadratureRule::for_dim(setup.domain.dim(), setup.quadrature_order);
    let centre = vec![0.0; setup.domain.dim()];
    let mut rows: Vec<StudyRow> = Vec::new();
    for (level, lv) in setup.levels.iter().enumerate() {
        let space = level_space(&setup.domain, lv)?;
        let sys = assemble(coeffs, &space, &rule)?;
        let max_iter = 50 * space.num_dofs() + 1000;
        let rep = solve(&sys, setup.solver, setup.tol, max_iter)?;
        let mass = space.local_mass(&rep.solution, &centre, setup.k_radius, &rule)?;
        let energy = rep.energy_norm;
        let prev = rows.last();
        rows.push(StudyRow {
            level,
            rings: lv.rings,
            dofs: space.num_dofs(),
            mass,
            mass_ratio: prev.map(|p| mass / p.mass),
            energy,
            energy_rel_change: prev.map(|p| (energy - p.energy).abs() / p.energy),
            bound: rep.bound_check(gamma, 1.0).bound,
            iterations: rep.iterations,
        });
    }
    let verdict = (rows.len() >= 3).then(|| {
        let t = &setup.thresholds;
        let min_mass_ratio = rows.iter().filter_map(|r| r.mass_ratio).fold(f64::INFINITY, f64::min);
        let last_energy_change = rows.last().and_then(|r| r.energy_rel_change).unwrap_or(f64::NAN);
        let max_bound_ratio = rows.iter().map(|r| r.energy / r.bound).fold(0.0, f64::max);
        StudyVerdict {
            min_mass_ratio,
            mass_grows: min_mass_ratio >= t.growth,
            last_energy_change,
            energy_stable: last_energy_change <= t.stability,
            max_bound_ratio,
            bound_holds: max_bound_ratio <= t.bound_slack,
        }
    });
    Ok(StudyTable { rows, coercivity, nonintegrability, verdict })
}
