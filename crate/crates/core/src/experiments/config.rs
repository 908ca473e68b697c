use crate::calculus::{Bump, ScalarField};
use crate::error::{Error, Result};
use crate::fem::SolverMethod;
use crate::geometry::Domain;
use crate::multi_index::MultiIndex;
use crate::weights::WeightFunction;
use serde::Deserialize;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Density,
    Inequality,
    Poincare,
    Solve,
    Example8,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Verify => "verify",
            Command::Density => "density",
            Command::Inequality => "inequality",
            Command::Poincare => "poincare",
            Command::Solve => "solve",
            Command::Example8 => "example8",
        })
    }
}

/// A run configuration. Every command reads `weight`, `domain` and its own
/// table; unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present it must match the command given on the command line.
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<String>,
    pub weight: Option<WeightConfig>,
    pub domain: Option<DomainConfig>,
    pub verify: Option<VerifyConfig>,
    pub density: Option<DensityConfig>,
    pub inequality: Option<InequalityConfig>,
    pub poincare: Option<PoincareConfig>,
    pub solve: Option<SolveConfig>,
    pub example8: Option<Example8Config>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn weight(&self) -> Result<WeightFunction> {
        self.weight.as_ref().ok_or_else(|| missing("weight"))?.build()
    }

    pub fn domain(&self) -> Result<Domain> {
        self.domain.as_ref().ok_or_else(|| missing("domain"))?.build()
    }
}

pub(crate) fn missing(table: &str) -> Error {
    Error::Config(format!("missing table [{table}]"))
}

fn default_order() -> usize {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    /// `|x|^exponent` in `dim` dimensions.
    RadialPower {
        exponent: f64,
        dim: usize,
        #[serde(default = "default_order")]
        order: usize,
    },
    One {
        dim: usize,
    },
    AffineTrig {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default = "default_order")]
        order: usize,
    },
    /// `Σ c_k x^k` with declared zeros.
    Polynomial {
        coefficients: Vec<f64>,
        #[serde(default)]
        zeros: Vec<f64>,
        #[serde(default = "default_order")]
        order: usize,
    },
}

impl WeightConfig {
    pub fn build(&self) -> Result<WeightFunction> {
        Ok(match self {
            WeightConfig::RadialPower { exponent, dim, order } => WeightFunction::radial_power(*exponent, *dim, *order),
            WeightConfig::One { dim } => WeightFunction::one(*dim),
            WeightConfig::AffineTrig { offset, amplitude, frequency, order } => {
                if offset.abs() <= amplitude.abs() {
                    return Err(Error::Config("affine_trig weights must satisfy |offset| > |amplitude|".into()));
                }
                WeightFunction::affine_trig(*offset, *amplitude, *frequency, *order)
            }
            WeightConfig::Polynomial { coefficients, zeros, order } => {
                WeightFunction::polynomial(coefficients.clone(), zeros.clone(), *order)
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval { a: f64, b: f64 },
    Disk { radius: f64 },
    Ball { radius: f64, dim: usize },
}

impl DomainConfig {
    pub fn build(&self) -> Result<Domain> {
        match *self {
            DomainConfig::Interval { a, b } => Domain::interval(a, b),
            DomainConfig::Disk { radius } => Domain::disk(radius),
            DomainConfig::Ball { radius, dim } => Domain::ball(radius, dim),
        }
    }
}

fn one() -> f64 {
    1.0
}

/// One-dimensional test fields with their derivatives up to order 3.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    /// `scale·x^exponent`, singular at the origin when `exponent < 0`.
    Power {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `amplitude·sin(frequency·x + phase)`.
    Sin {
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `exp(rate·x)`.
    Exp {
        #[serde(default = "one")]
        rate: f64,
    },
    Constant {
        value: f64,
    },
    /// Smooth bump `amplitude·exp(−1/(1−t²))`, `t = (x − center)/radius`.
    Bump {
        center: f64,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

const FIELD_ORDER: usize = 3;

impl FieldConfig {
    /// The field, scaled by `c`.
    pub fn build_scaled(&self, c: f64) -> ScalarField {
        match *self {
            FieldConfig::Power { exponent, scale } => {
                let pw = move |x: f64, e: f64| if e.fract() == 0.0 { x.powi(e as i32) } else { x.powf(e) };
                let mut f = ScalarField::univariate(move |x| c * scale * pw(x, exponent));
                for k in 1..=FIELD_ORDER {
                    let falling: f64 = (0..k).map(|j| exponent - j as f64).product();
                    f = f.with_univariate_derivative(k, move |x| c * scale * falling * pw(x, exponent - k as f64));
                }
                if exponent < 0.0 {
                    f = f.with_singular_point(vec![0.0]);
                }
                f
            }
            FieldConfig::Sin { frequency, phase, amplitude } => {
                let mut f = ScalarField::univariate(move |x| c * amplitude * (frequency * x + phase).sin());
                for k in 1..=FIELD_ORDER {
                    let shift = k as f64 * std::f64::consts::FRAC_PI_2;
                    let fk = frequency.powi(k as i32);
                    f = f.with_univariate_derivative(k, move |x| c * amplitude * fk * (frequency * x + phase + shift).sin());
                }
                f
            }
            FieldConfig::Exp { rate } => {
                let mut f = ScalarField::univariate(move |x| c * (rate * x).exp());
                for k in 1..=FIELD_ORDER {
                    let rk = rate.powi(k as i32);
                    f = f.with_univariate_derivative(k, move |x| c * rk * (rate * x).exp());
                }
                f
            }
            FieldConfig::Constant { value } => ScalarField::constant(1, c * value),
            FieldConfig::Bump { center, radius, amplitude } => {
                let b = Bump { center: vec![center], radius, amplitude: c * amplitude };
                let b0 = b.clone();
                let mut f = ScalarField::new(1, move |x| b0.value(x));
                for k in 1..=FIELD_ORDER {
                    let bk = b.clone();
                    let a = MultiIndex::new(vec![k]);
                    let a2 = a.clone();
                    f = f.with_derivative(a, move |x| bk.partial(x, &a2));
                }
                f
            }
        }
    }

    pub fn build(&self) -> ScalarField {
        self.build_scaled(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    WeakDerivative,
    Leibniz,
    Ibp,
}

fn default_cells() -> usize {
    16
}

fn default_identity_tol() -> f64 {
    crate::calculus::IDENTITY_TOL
}

fn default_control_threshold() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub identity: IdentityKind,
    pub f: FieldConfig,
    #[serde(default = "default_alpha")]
    pub alpha: Vec<usize>,
    /// Order `m` of the Leibniz identity.
    #[serde(default = "default_m")]
    pub m: usize,
    /// The weak-derivative candidate is `candidate_scale · ∂^α f`.
    #[serde(default = "one")]
    pub candidate_scale: f64,
    /// Also test the sign-flipped candidate, which must fail.
    #[serde(default)]
    pub negative_control: bool,
    /// Test function `h` and factor `ṽ` of the integration-by-parts identity.
    pub h: Option<FieldConfig>,
    pub v_tilde: Option<FieldConfig>,
    /// `true` when `f h a` does not vanish on the boundary, so the identity
    /// is expected to fail by at least `control_threshold`.
    #[serde(default)]
    pub boundary_violating: bool,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_identity_tol")]
    pub tolerance: f64,
    #[serde(default = "default_control_threshold")]
    pub control_threshold: f64,
}

fn default_alpha() -> Vec<usize> {
    vec![1]
}

fn default_m() -> usize {
    1
}

fn default_n_list() -> Vec<usize> {
    vec![4, 8, 16, 32, 64]
}

fn default_growth_tol() -> f64 {
    0.15
}

fn default_density_ratio() -> f64 {
    0.5
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub f: FieldConfig,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_n_list")]
    pub n: Vec<usize>,
    /// Derivative orders whose cutoff growth is fitted.
    #[serde(default = "default_growth_orders")]
    pub growth_orders: Vec<usize>,
    #[serde(default = "default_growth_tol")]
    pub growth_tolerance: f64,
    /// Required bound on `‖f − χ_n f‖` at the last `n` over the first.
    #[serde(default = "default_density_ratio")]
    pub final_ratio: f64,
    #[serde(default = "default_density_cells")]
    pub cells: usize,
}

fn default_growth_orders() -> Vec<usize> {
    vec![1, 2]
}

fn default_density_cells() -> usize {
    4096
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFamily {
    /// `(R − r)·(random polynomial)` radial profiles.
    RadialPolynomial,
    /// Random smooth bumps inside the interval.
    Bump,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityConfig {
    pub kind: String,
    #[serde(default = "default_p")]
    pub p: f64,
    pub sigma: Option<f64>,
    pub c_omega: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub family: SampleFamily,
    #[serde(default = "default_terms")]
    pub terms: usize,
}

fn default_samples() -> usize {
    100
}

fn default_terms() -> usize {
    4
}

fn default_poincare_cells() -> Vec<usize> {
    vec![16, 32, 64, 128]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoincareConfig {
    /// Uniform cell counts on an interval, successively refined.
    #[serde(default = "default_poincare_cells")]
    pub cells: Vec<usize>,
    /// Expected constant at the finest level, checked to `rel_tolerance`.
    pub expected: Option<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tolerance: f64,
}

fn default_rel_tol() -> f64 {
    0.01
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// `−u″ + u = (1 + π²) sin(πx)` on `(0, 1)`, exact solution `sin(πx)`.
    ManufacturedSine,
    /// `−Σ D_i(|x|^{8m} D_i f) + |x|^{4m} f = |x|^{2m−β}` on the unit disk.
    PowerExample { m: u32, beta: f64 },
}

fn default_solver() -> String {
    "auto".into()
}

fn default_solve_tol() -> f64 {
    1e-12
}

fn default_order_target() -> f64 {
    2.0
}

fn default_order_tol() -> f64 {
    0.3
}

fn default_rayleigh() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub problem: ProblemConfig,
    /// Uniform cell counts for the manufactured problem.
    #[serde(default)]
    pub cells: Vec<usize>,
    /// `[rings, sectors, q]` of the disk mesh for the power example.
    pub mesh: Option<(usize, usize, f64)>,
    #[serde(default = "default_solver")]
    pub method: String,
    #[serde(default = "default_solve_tol")]
    pub tol: f64,
    #[serde(default = "default_order_target")]
    pub expected_order: f64,
    #[serde(default = "default_order_tol")]
    pub order_tolerance: f64,
    #[serde(default = "default_rayleigh")]
    pub rayleigh_samples: usize,
}

impl SolveConfig {
    pub fn method(&self) -> Result<SolverMethod> {
        self.method.parse().map_err(|_| Error::Config(format!("unknown solver method '{}'", self.method)))
    }
}

fn default_k_radius() -> f64 {
    0.25
}

fn default_growth() -> f64 {
    1.3
}

fn default_stability() -> f64 {
    0.05
}

fn default_slack() -> f64 {
    1.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example8Config {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub m: u32,
    pub beta: f64,
    /// `[rings, sectors, q]` per level.
    pub levels: Vec<(usize, usize, f64)>,
    #[serde(default = "default_k_radius")]
    pub k_radius: f64,
    #[serde(default = "default_growth")]
    pub growth_threshold: f64,
    #[serde(default = "default_stability")]
    pub stability_threshold: f64,
    #[serde(default = "default_slack")]
    pub bound_slack: f64,
}

fn default_dim() -> usize {
    2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_verify() {
        let c = RunConfig::parse(
            r#"
            seed = 3
            [weight]
            kind = "polynomial"
            coefficients = [0.0, 0.0, 1.0]
            zeros = [0.0]
            [domain]
            kind = "interval"
            a = -1.0
            b = 1.0
            [verify]
            identity = "weak_derivative"
            f = { kind = "power", exponent = -2.0 }
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, 3);
        let v = c.verify.unwrap();
        assert_eq!(v.alpha, vec![1]);
        assert_eq!(v.tolerance, 1e-6);
        let f = v.f.build();
        assert_eq!(f.value(&[0.5]), 4.0);
        assert_eq!(f.eval_derivative(&MultiIndex::new(vec![1]), &[0.5]).unwrap(), -16.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::parse("seeed = 3").unwrap_err();
        assert!(e.to_string().contains("seeed"), "{e}");
        let e = RunConfig::parse("[domain]\nkind = \"interval\"\na = 0.0\nb = 1.0\nc = 2.0").unwrap_err();
        assert!(e.to_string().contains('c'));
    }

    #[test]
    fn field_derivatives_match_differences() {
        let fields = [
            FieldConfig::Sin { frequency: 2.0, phase: 0.3, amplitude: 1.5 },
            FieldConfig::Exp { rate: -0.7 },
            FieldConfig::Power { exponent: 3.0, scale: 2.0 },
            FieldConfig::Bump { center: 0.1, radius: 0.5, amplitude: 1.0 },
        ];
        let h = 1e-5;
        for fc in fields {
            let f = fc.build();
            let d1 = f.derivative(&MultiIndex::new(vec![1])).unwrap();
            let x = 0.2;
            let fd = (f.value(&[x + h]) - f.value(&[x - h])) / (2.0 * h);
            assert!((d1(&[x]) - fd).abs() < 1e-6 * (1.0 + fd.abs()), "{fc:?}");
        }
    }
}
