use super::config::{
    missing, Command, DensityConfig, Example8Config, FieldConfig, IdentityKind, InequalityConfig, PoincareConfig, ProblemConfig,
    RunConfig, SampleFamily, SolveConfig, VerifyConfig,
};
use super::emit::{csv_float, write_atomic};
use crate::calculus::{
    certified_constant, density_sequence, ibp_residual, inequality_check, leibniz_residual, random_bump,
    random_radial_polynomial, weak_derivative_residual, InequalityKind, InequalitySetup, ResidualReport, ScalarField,
    TestFunctionBattery,
};
use crate::cutoff::chi_growth_fit;
use crate::error::{Error, Result};
use crate::fem::{
    assemble, coercivity_check, divergence_study, estimate_poincare, nonintegrability_check, solve, Coefficient, CoefficientSet,
    FESpace, SolverMethod, StudyLevel, StudySetup, StudyThresholds,
};
use crate::geometry::{build_disk_mesh, build_interval_mesh, Domain, QuadratureRule, DEFAULT_ORDER};
use crate::multi_index::MultiIndex;
use crate::weights::{SamplePlan, ShapeMap, WeightFamily, WeightFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// A hypothesis or check did not hold.
    Failed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Failed => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Outcome of one run. Contains no timing or host data, so it is identical
/// across reruns of the same configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: Command,
    pub seed: u64,
    pub config_echo: String,
    pub checks: Vec<Check>,
    /// File names written to the output directory, in order.
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn outcome(&self) -> Outcome {
        if self.checks.iter().all(|c| c.passed) {
            Outcome::Pass
        } else {
            Outcome::Failed
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "degenera {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(s, "command: {}", self.command).unwrap();
        writeln!(s, "seed: {}", self.seed).unwrap();
        writeln!(s, "config:").unwrap();
        for line in self.config_echo.lines() {
            writeln!(s, "  {line}").unwrap();
        }
        writeln!(s, "checks:").unwrap();
        for c in &self.checks {
            writeln!(s, "  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
        }
        writeln!(s, "artifacts: {}", self.artifacts.join(" ")).unwrap();
        writeln!(s, "verdict: {}", if self.outcome() == Outcome::Pass { "pass" } else { "fail" }).unwrap();
        s
    }
}

/// Checks plus `(file name, contents)` artifacts of a pipeline.
type PipelineOutput = (Vec<Check>, Vec<(String, String)>);

/// Runs `command` with `config` and writes the CSV artifacts and
/// `report.txt` to `out_dir`. A failed hypothesis is a report with a failed
/// check, not an error; errors are reserved for bad input and execution
/// failures.
pub fn run(command: Command, config: &RunConfig, config_text: &str, out_dir: &Path, seed: u64) -> Result<RunReport> {
    if let Some(c) = config.command {
        if c != command {
            return Err(Error::Config(format!("config is for '{c}' but the command is '{command}'")));
        }
    }
    let result = match command {
        Command::Verify => verify(config, seed),
        Command::Density => density(config),
        Command::Inequality => inequality(config, seed),
        Command::Poincare => poincare(config),
        Command::Solve => solve_cmd(config, seed),
        Command::Example8 => example8(config),
    };
    let (checks, files) = match result {
        Ok(out) => out,
        Err(Error::Hypothesis(msg)) => (vec![Check::new("hypothesis", false, msg)], vec![]),
        Err(e) => return Err(e),
    };
    let mut artifacts = Vec::new();
    for (name, contents) in &files {
        write_atomic(&out_dir.join(name), contents)?;
        artifacts.push(name.clone());
    }
    let report = RunReport { command, seed, config_echo: config_text.to_string(), checks, artifacts };
    write_atomic(&out_dir.join("report.txt"), &report.to_text())?;
    Ok(report)
}

/// Output directory: the command line wins over the config file.
pub fn resolve_out_dir(cli: Option<&Path>, config: &RunConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("degenera-out"))
}

fn section<'a, T>(t: &'a Option<T>, name: &str) -> Result<&'a T> {
    t.as_ref().ok_or_else(|| missing(name))
}

fn interval_of(domain: &Domain) -> Result<(f64, f64)> {
    domain.endpoints().map(|[a, b]| (a, b)).ok_or_else(|| Error::Config("this command needs an interval domain".into()))
}

fn interval_mesh(domain: &Domain, cells: usize) -> Result<crate::geometry::Mesh> {
    let (a, b) = interval_of(domain)?;
    let centre = if a < 0.0 && b > 0.0 { 0.0 } else { a };
    build_interval_mesh(a, b, cells, 1.0, centre)
}

const RESIDUAL_HEADER: &str = "kind,alpha,residual,scale,relative,holds";

fn residual_row(csv: &mut String, kind: &str, alpha: &MultiIndex, r: &ResidualReport, holds: bool) {
    let a: Vec<String> = alpha.components().iter().map(|c| c.to_string()).collect();
    writeln!(csv, "{kind},{},{},{},{},{holds}", a.join(" "), csv_float(r.residual), csv_float(r.scale), csv_float(r.relative))
        .unwrap();
}

/// `f` with every declared derivative flipped in sign.
fn flipped(fc: &FieldConfig, alpha: &MultiIndex) -> Result<ScalarField> {
    let f = fc.build();
    let neg = fc.build_scaled(-1.0);
    let mut out = ScalarField::new(1, move |x| f.value(x));
    for b in alpha.lower_set().into_iter().filter(|b| !b.is_zero()) {
        let d = neg.derivative(&b)?;
        out = out.with_derivative(b, move |x| d(x));
    }
    Ok(out)
}

fn verify(config: &RunConfig, seed: u64) -> Result<PipelineOutput> {
    let vc: &VerifyConfig = section(&config.verify, "verify")?;
    let v = config.weight()?;
    let domain = config.domain()?;
    let alpha = MultiIndex::new(vc.alpha.clone());
    let mesh = interval_mesh(&domain, vc.cells)?;
    let f = vc.f.build();
    let mut singular = v.zero_points();
    singular.extend(f.singular_points().iter().cloned());
    let mut checks = Vec::new();
    let mut csv = format!("{RESIDUAL_HEADER}\n");
    match vc.identity {
        IdentityKind::WeakDerivative => {
            let battery = TestFunctionBattery::build(&domain, &mesh, singular, seed)?;
            let d = f.derivative(&alpha)?;
            let s = vc.candidate_scale;
            let d2 = d.clone();
            let g = ScalarField::new(1, move |x| s * d(x));
            let r = weak_derivative_residual(&f, &g, &v, &alpha, &battery)?;
            let ok = r.holds(vc.tolerance);
            residual_row(&mut csv, "weak_derivative", &alpha, &r, ok);
            checks.push(Check::new(
                "weak-derivative identity",
                ok,
                format!(
                    "relative residual {:e} over {} test functions (tolerance {:e})",
                    r.relative,
                    battery.len(),
                    vc.tolerance
                ),
            ));
            if vc.negative_control {
                let g = ScalarField::new(1, move |x| -s * d2(x));
                let r = weak_derivative_residual(&f, &g, &v, &alpha, &battery)?;
                let ok = r.relative >= vc.control_threshold;
                residual_row(&mut csv, "weak_derivative_flipped", &alpha, &r, !ok);
                checks.push(Check::new(
                    "sign-flipped candidate rejected",
                    ok,
                    format!("relative residual {:e} (needs >= {:e})", r.relative, vc.control_threshold),
                ));
            }
        }
        IdentityKind::Leibniz => {
            let battery = TestFunctionBattery::build(&domain, &mesh, singular, seed)?;
            let r = leibniz_residual(&f, &v, vc.m, &alpha, &battery)?;
            let ok = r.holds(vc.tolerance);
            residual_row(&mut csv, "leibniz", &alpha, &r, ok);
            checks.push(Check::new(
                "Leibniz formula",
                ok,
                format!("relative residual {:e} (tolerance {:e})", r.relative, vc.tolerance),
            ));
            if vc.negative_control {
                let r = leibniz_residual(&flipped(&vc.f, &alpha)?, &v, vc.m, &alpha, &battery)?;
                let ok = r.relative >= vc.control_threshold;
                residual_row(&mut csv, "leibniz_flipped", &alpha, &r, !ok);
                checks.push(Check::new(
                    "flipped derivatives rejected",
                    ok,
                    format!("relative residual {:e} (needs >= {:e})", r.relative, vc.control_threshold),
                ));
            }
        }
        IdentityKind::Ibp => {
            let h = section(&vc.h, "verify.h")?.build();
            let vt = vc.v_tilde.as_ref().map(FieldConfig::build).unwrap_or_else(|| ScalarField::constant(1, 1.0));
            let rule = QuadratureRule::interval(DEFAULT_ORDER);
            let r = ibp_residual(&h, &f, &vt, &v, &alpha, &domain, &mesh, &rule)?;
            if vc.boundary_violating {
                let ok = r.relative >= vc.control_threshold;
                residual_row(&mut csv, "ibp_boundary", &alpha, &r, !ok);
                checks.push(Check::new(
                    "boundary term detected",
                    ok,
                    format!("relative residual {:e} (needs >= {:e})", r.relative, vc.control_threshold),
                ));
            } else {
                let ok = r.holds(vc.tolerance);
                residual_row(&mut csv, "ibp", &alpha, &r, ok);
                checks.push(Check::new(
                    "integration by parts",
                    ok,
                    format!("relative residual {:e} (tolerance {:e})", r.relative, vc.tolerance),
                ));
            }
        }
    }
    Ok((checks, vec![("verify.csv".into(), csv)]))
}

fn density(config: &RunConfig) -> Result<PipelineOutput> {
    let dc: &DensityConfig = section(&config.density, "density")?;
    let v = config.weight()?;
    let domain = config.domain()?;
    if v.dim() != 1 {
        return Err(Error::Config("the density study is one-dimensional".into()));
    }
    let max_order = dc.growth_orders.iter().copied().max().unwrap_or(1).max(dc.m);
    let shape = ShapeMap::abs(1, max_order);
    let mut checks = Vec::new();

    let mut growth = String::from("order,n,sup,fitted_exponent,target\n");
    for &k in &dc.growth_orders {
        let sigma = MultiIndex::new(vec![k]);
        let fit = chi_growth_fit(&v, &shape, &sigma, &dc.n, &domain, &SamplePlan::for_domain(&domain))?;
        for &(n, sup) in &fit.sups {
            writeln!(
                growth,
                "{k},{n},{},{},{}",
                sup.map(csv_float).unwrap_or_default(),
                fit.exponent.map(csv_float).unwrap_or_default(),
                csv_float(fit.target)
            )
            .unwrap();
        }
        let (ok, detail) = match fit.exponent {
            Some(e) => (
                (e - fit.target).abs() <= dc.growth_tolerance,
                format!("fitted exponent {e:.6} vs s = {} (tolerance {})", fit.target, dc.growth_tolerance),
            ),
            None => (false, format!("no fit: {}", fit.warnings.join("; "))),
        };
        checks.push(Check::new(format!("cutoff growth order {k}"), ok, detail));
    }

    let family = WeightFamily::from_shape(v.clone(), ShapeMap::abs(1, dc.m), dc.m, dc.p)?;
    let mesh = interval_mesh(&domain, dc.cells)?;
    let rule = QuadratureRule::interval(DEFAULT_ORDER);
    let seq = density_sequence(&dc.f.build(), &family, &dc.n, &mesh, &rule)?;
    let mut csv = String::from("n,distance\n");
    for (n, d) in &seq {
        writeln!(csv, "{n},{}", csv_float(*d)).unwrap();
    }
    let decreasing = seq.windows(2).all(|w| w[1].1 < w[0].1);
    checks.push(Check::new("density distance strictly decreasing", decreasing, format!("{} values", seq.len())));
    if let (Some(first), Some(last)) = (seq.first(), seq.last()) {
        let ratio = last.1 / first.1;
        checks.push(Check::new(
            "density distance reduction",
            ratio <= dc.final_ratio,
            format!("final/initial = {ratio:.6} (needs <= {})", dc.final_ratio),
        ));
    }
    Ok((checks, vec![("growth.csv".into(), growth), ("density.csv".into(), csv)]))
}

fn parse_kind(s: &str) -> Result<InequalityKind> {
    match s {
        "hardy" => Ok(InequalityKind::Hardy),
        "kebiche" => Ok(InequalityKind::Kebiche),
        "oned" => Ok(InequalityKind::OneD),
        "poincare_cor" => Ok(InequalityKind::PoincareCor),
        _ => Err(Error::Config(format!("unknown inequality kind '{s}' (hardy, kebiche, oned, poincare_cor)"))),
    }
}

fn inequality(config: &RunConfig, seed: u64) -> Result<PipelineOutput> {
    let ic: &InequalityConfig = section(&config.inequality, "inequality")?;
    let kind = parse_kind(&ic.kind)?;
    let v = config.weight()?;
    let domain = config.domain()?;
    let setup = InequalitySetup { kind, p: ic.p, domain: domain.clone(), sigma: ic.sigma, c_omega: ic.c_omega };
    // fail fast on the gradient ratio and the dimension window
    let constant = match kind {
        InequalityKind::Hardy => {
            let d = domain.dim() as f64;
            if !(ic.p < d) {
                return Err(Error::Hypothesis(format!("Hardy inequality needs p < d, got p = {}, d = {d}", ic.p)));
            }
            ic.p / (d - ic.p)
        }
        _ => certified_constant(&v, &setup)?.1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("kind,sample,lhs,rhs,constant,margin,holds\n");
    let mut failures = 0;
    let mut min_rel = f64::INFINITY;
    for i in 0..ic.samples {
        let f = match (ic.family, &domain) {
            (SampleFamily::RadialPolynomial, Domain::Ball { radius, .. }) => {
                random_radial_polynomial(&mut rng, *radius, ic.terms)
            }
            (SampleFamily::Bump, Domain::Interval { a, b }) => random_bump(&mut rng, *a, *b),
            _ => return Err(Error::Config("radial_polynomial samples need a ball, bump samples an interval".into())),
        };
        let r = inequality_check(&setup, &v, &f)?;
        if !r.holds {
            failures += 1;
        }
        let scale = (r.constant_used * r.rhs).abs();
        if scale > 0.0 {
            min_rel = min_rel.min(r.margin / scale);
        }
        writeln!(
            csv,
            "{kind},{i},{},{},{},{},{}",
            csv_float(r.lhs),
            csv_float(r.rhs),
            csv_float(r.constant_used),
            csv_float(r.margin),
            r.holds
        )
        .unwrap();
    }
    let checks = vec![Check::new(
        format!("{kind} inequality"),
        failures == 0,
        format!(
            "constant {constant:.12}, {} of {} samples hold, smallest relative margin {min_rel:e}",
            ic.samples - failures,
            ic.samples
        ),
    )];
    Ok((checks, vec![("inequality.csv".into(), csv)]))
}

fn poincare(config: &RunConfig) -> Result<PipelineOutput> {
    let pc: &PoincareConfig = section(&config.poincare, "poincare")?;
    let v = config.weight()?;
    let domain = config.domain()?;
    let rule = QuadratureRule::interval(DEFAULT_ORDER);
    let mut csv = String::from("cells,dofs,lambda_min,constant,iterations\n");
    let mut values = Vec::new();
    for &n in &pc.cells {
        let space = FESpace::new(interval_mesh(&domain, n)?)?;
        let est = estimate_poincare(&space, &v, &rule)?;
        writeln!(csv, "{n},{},{},{},{}", space.num_dofs(), csv_float(est.lambda_min), csv_float(est.constant), est.iterations)
            .unwrap();
        values.push(est.constant);
    }
    let mut checks = Vec::new();
    let tol = 1e-6;
    let up = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - tol));
    let down = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol));
    let direction = if up && down {
        "constant"
    } else if up {
        "non-decreasing"
    } else {
        "non-increasing"
    };
    checks.push(Check::new("monotone under refinement", up || down, direction));
    if let (Some(expected), Some(&last)) = (pc.expected, values.last()) {
        let rel = (last - expected).abs() / expected.abs();
        checks.push(Check::new(
            "Poincare constant",
            rel <= pc.rel_tolerance,
            format!("{last:.10} vs expected {expected:.10}, relative error {rel:e} (tolerance {})", pc.rel_tolerance),
        ));
    }
    Ok((checks, vec![("poincare.csv".into(), csv)]))
}

fn manufactured(sc: &SolveConfig, method: SolverMethod) -> Result<PipelineOutput> {
    if sc.cells.len() < 2 {
        return Err(Error::Config("the manufactured problem needs at least two cell counts".into()));
    }
    let k = Coefficient::function(|x| (1.0 + PI * PI) * (PI * x[0]).sin());
    let coeffs = CoefficientSet::isotropic(1, 1.0, 1.0, k, WeightFunction::one(1));
    let rule = QuadratureRule::interval(DEFAULT_ORDER);
    let mut csv = String::from("cells,dofs,l2_error,order,energy,iterations,residual\n");
    let mut prev: Option<f64> = None;
    let mut orders = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for &n in &sc.cells {
        let space = FESpace::new(build_interval_mesh(0.0, 1.0, n, 1.0, 0.0)?)?;
        let sys = assemble(&coeffs, &space, &rule)?;
        let rep = solve(&sys, method, sc.tol, 10 * n + 100)?;
        worst_residual = worst_residual.max(rep.residual_norm);
        let err = space.l2_error(&rep.solution, |x| (PI * x[0]).sin(), &rule)?;
        let order = prev.map(|p| (p / err).log2());
        if let Some(o) = order {
            orders.push(o);
        }
        writeln!(
            csv,
            "{n},{},{},{},{},{},{}",
            space.num_dofs(),
            csv_float(err),
            order.map(csv_float).unwrap_or_default(),
            csv_float(rep.energy_norm),
            rep.iterations,
            csv_float(rep.residual_norm)
        )
        .unwrap();
        prev = Some(err);
    }
    let ok = orders.iter().all(|o| (o - sc.expected_order).abs() <= sc.order_tolerance);
    let list: Vec<String> = orders.iter().map(|o| format!("{o:.4}")).collect();
    let checks = vec![
        Check::new(
            "L2 convergence order",
            ok,
            format!("orders [{}] vs {} +- {}", list.join(", "), sc.expected_order, sc.order_tolerance),
        ),
        Check::new("Galerkin residual", worst_residual <= sc.tol, format!("max relative residual {worst_residual:e}")),
    ];
    Ok((checks, vec![("solve.csv".into(), csv)]))
}

fn power_solve(sc: &SolveConfig, m: u32, beta: f64, method: SolverMethod, seed: u64) -> Result<PipelineOutput> {
    let (rings, sectors, q) = sc.mesh.ok_or_else(|| Error::Config("solve.mesh = [rings, sectors, q] is required".into()))?;
    let coeffs = CoefficientSet::power_example(2, m, beta);
    let domain = Domain::disk(1.0)?;
    let coer = coercivity_check(&coeffs, &domain, None, &SamplePlan::coarse());
    if !coer.holds() {
        return Err(Error::Hypothesis(format!("coercivity: {}", coer.details.join("; "))));
    }
    let gamma = coer.gamma;
    let space = FESpace::new(build_disk_mesh(1.0, rings, sectors, q)?)?;
    let rule = QuadratureRule::triangle(DEFAULT_ORDER);
    let sys = assemble(&coeffs, &space, &rule)?;
    let n = space.num_dofs();
    let sym = sys.matrix.symmetric_part();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv_r = String::from("sample,quotient\n");
    let mut min_q = f64::INFINITY;
    for i in 0..sc.rayleigh_samples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let quotient = sym.bilinear(&x, &x) / sys.x_gram.bilinear(&x, &x);
        min_q = min_q.min(quotient);
        writeln!(csv_r, "{i},{}", csv_float(quotient)).unwrap();
    }
    let rep = solve(&sys, method, sc.tol, 50 * n + 1000)?;
    let bc = rep.bound_check(gamma, 1.05);
    let mut csv = String::from("rings,sectors,dofs,energy,load_bound,gamma,bound_ratio,iterations,residual\n");
    writeln!(
        csv,
        "{rings},{sectors},{n},{},{},{},{},{},{}",
        csv_float(rep.energy_norm),
        csv_float(rep.load_bound),
        csv_float(gamma),
        csv_float(bc.ratio),
        rep.iterations,
        csv_float(rep.residual_norm)
    )
    .unwrap();
    let threshold = gamma * (1.0 - 1e-6);
    let checks = vec![
        Check::new("coercivity", true, format!("{}: gamma = {gamma:.9}", coer.case)),
        Check::new(
            "discrete Rayleigh quotient",
            min_q >= threshold,
            format!("min over {} samples {min_q:.12} (needs >= {threshold:.12})", sc.rayleigh_samples),
        ),
        Check::new(
            "a-posteriori bound",
            bc.holds,
            format!("||f_h||_X = {:.9} <= 1.05 |h|/gamma = {:.9}", bc.energy, 1.05 * bc.bound),
        ),
        Check::new("Galerkin residual", rep.residual_norm <= sc.tol, format!("relative residual {:e}", rep.residual_norm)),
    ];
    Ok((checks, vec![("solve.csv".into(), csv), ("rayleigh.csv".into(), csv_r)]))
}

fn solve_cmd(config: &RunConfig, seed: u64) -> Result<PipelineOutput> {
    let sc: &SolveConfig = section(&config.solve, "solve")?;
    let method = sc.method()?;
    match sc.problem {
        ProblemConfig::ManufacturedSine => manufactured(sc, method),
        ProblemConfig::PowerExample { m, beta } => power_solve(sc, m, beta, method, seed),
    }
}

fn example8(config: &RunConfig) -> Result<PipelineOutput> {
    let ec: &Example8Config = section(&config.example8, "example8")?;
    if ec.dim != 2 {
        return Err(Error::Config("the divergence study runs on the unit disk (dim = 2)".into()));
    }
    let domain = match &config.domain {
        Some(d) => d.build()?,
        None => Domain::disk(1.0)?,
    };
    let coeffs = CoefficientSet::power_example(ec.dim, ec.m, ec.beta);
    // fail fast before any solve
    let ni = nonintegrability_check(&coeffs, &domain)?;
    if !ni.holds() {
        let mut failed = Vec::new();
        for (flag, name) in [
            (ni.diffusion, "(1) diffusion coefficients"),
            (ni.drift, "(2) drift coefficients"),
            (ni.reaction, "(3) c in L^inf_{v^-2}"),
            (ni.load_nonnegative, "(4) k >= 0"),
            (ni.load_dual, "(4) k in L^2_{v^-1}"),
            (ni.load_nonintegrable, "(4) k v^-2 not in L^1_loc"),
        ] {
            if !flag {
                failed.push(name);
            }
        }
        return Err(Error::Hypothesis(format!(
            "non-integrability hypothesis failed: {} [{}]",
            failed.join(", "),
            ni.details.join("; ")
        )));
    }
    let levels = ec.levels.iter().map(|&(rings, sectors, q)| StudyLevel { rings, sectors, q }).collect();
    let mut setup = StudySetup::new(domain, levels, ec.k_radius);
    setup.thresholds =
        StudyThresholds { growth: ec.growth_threshold, stability: ec.stability_threshold, bound_slack: ec.bound_slack };
    let table = divergence_study(&coeffs, &setup)?;
    let mut checks = vec![
        Check::new("non-integrability hypotheses", true, "all four hold"),
        Check::new("coercivity", true, format!("{}: gamma = {:.9}", table.coercivity.case, table.gamma())),
    ];
    match &table.verdict {
        None => checks.push(Check::new("verdict", false, "fewer than three levels")),
        Some(v) => {
            checks.push(Check::new(
                "local mass grows",
                v.mass_grows,
                format!("min ratio {:.6} (needs >= {})", v.min_mass_ratio, ec.growth_threshold),
            ));
            checks.push(Check::new(
                "energy stable",
                v.energy_stable,
                format!("last relative change {:e} (needs <= {})", v.last_energy_change, ec.stability_threshold),
            ));
            checks.push(Check::new(
                "a-posteriori bound",
                v.bound_holds,
                format!("max ||f_h||_X / (|h|/gamma) = {:.6} (needs <= {})", v.max_bound_ratio, ec.bound_slack),
            ));
        }
    }
    Ok((checks, vec![("study.csv".into(), table.to_csv())]))
}
