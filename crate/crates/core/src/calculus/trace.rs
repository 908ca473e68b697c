use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::geometry::{norm2, CompactSet, Domain, Mesh};
use crate::weights::{hypothesis_check, HypothesisKind, HypothesisParams, SamplePlan, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// `Tr₁ f = f|_{∂Ω}`, under the boundary floor `|v| > δ` near `∂Ω`.
    Tr1,
    /// `Tr₂ f = (v² f)|_{∂Ω}`, for `v ∈ 𝒞_b¹`.
    Tr2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// `‖trace‖_{L^p(∂Ω)}`; counting measure on the two endpoints in 1D.
    pub norm: f64,
}

/// The compact set `K` used for the floor check: `Ω` shrunk by 10%.
pub fn trace_compact(domain: &Domain) -> Result<CompactSet> {
    match *domain {
        Domain::Interval { a, b } => {
            let m = 0.1 * (b - a);
            Ok(CompactSet::Interval { lo: a + m, hi: b - m })
        }
        Domain::Ball { radius, .. } => Ok(CompactSet::Ball { radius: 0.9 * radius }),
        Domain::Square { .. } => Err(Error::invalid("traces are implemented on intervals and disks")),
    }
}

/// Value at a boundary point, or its limit along the inward normal by
/// Richardson extrapolation `2g(h) − g(2h)` when the field is singular there.
fn boundary_limit(g: &dyn Fn(&[f64]) -> f64, x: &[f64], inward: &[f64], h: f64) -> Result<f64> {
    let v = g(x);
    if v.is_finite() {
        return Ok(v);
    }
    let at = |t: f64| -> Vec<f64> { x.iter().zip(inward).map(|(a, n)| a + t * n).collect() };
    let (g1, g2) = (g(&at(h)), g(&at(2.0 * h)));
    let lim = 2.0 * g1 - g2;
    if lim.is_finite() {
        Ok(lim)
    } else {
        Err(Error::singular(x, "trace has no finite limit at this boundary point"))
    }
}

pub fn trace_eval(
    f: &ScalarField,
    v: &WeightFunction,
    mode: TraceMode,
    domain: &Domain,
    mesh: &Mesh,
    p: f64,
) -> Result<TraceReport> {
    match mode {
        TraceMode::Tr1 => {
            let params =
                HypothesisParams { domain: Some(domain.clone()), compact: Some(trace_compact(domain)?), ..Default::default() };
            let r = hypothesis_check(HypothesisKind::BoundaryFloor, v, &params, &SamplePlan::for_domain(domain))?;
            if !r.holds {
                let w = r.witness.map(|w| w.label).unwrap_or_default();
                return Err(Error::Hypothesis(format!("boundary floor |v| > delta on Omega \\ K fails for Tr1: {w}")));
            }
        }
        TraceMode::Tr2 => {
            if !v.is_c1_bounded(domain) {
                return Err(Error::Hypothesis("Tr2 needs v and grad v bounded (v in C_b^1)".into()));
            }
        }
    }
    let g = |x: &[f64]| match mode {
        TraceMode::Tr1 => f.value(x),
        TraceMode::Tr2 => {
            let w = v.value(x);
            w * w * f.value(x)
        }
    };
    let h = 1e-7 * domain.diameter();
    let (points, inward): (Vec<Vec<f64>>, Vec<Vec<f64>>) = match *domain {
        Domain::Interval { a, b } => (vec![vec![a], vec![b]], vec![vec![1.0], vec![-1.0]]),
        _ => mesh
            .boundary_nodes()
            .into_iter()
            .map(|i| {
                let x = mesh.node(i).to_vec();
                let r = norm2(&x);
                let n = x.iter().map(|c| -c / r).collect();
                (x, n)
            })
            .unzip(),
    };
    let values = points.iter().zip(&inward).map(|(x, n)| boundary_limit(&g, x, n, h)).collect::<Result<Vec<f64>>>()?;
    let norm = match *domain {
        Domain::Interval { .. } => values.iter().map(|u| u.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        _ => {
            let idx: std::collections::HashMap<usize, usize> =
                mesh.boundary_nodes().into_iter().enumerate().map(|(k, i)| (i, k)).collect();
            let mut s = 0.0;
            for [i, j] in mesh.boundary_edges() {
                let (a, b) = (mesh.node(i), mesh.node(j));
                let len = (a[0] - b[0]).hypot(a[1] - b[1]);
                s += 0.5 * len * (values[idx[&i]].abs().powf(p) + values[idx[&j]].abs().powf(p));
            }
            s.powf(1.0 / p)
        }
    };
    Ok(TraceReport { points, values, norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_disk_mesh, build_interval_mesh};
    use approx::assert_relative_eq;

    fn unit() -> (Domain, Mesh) {
        (Domain::interval(0.0, 1.0).unwrap(), build_interval_mesh(0.0, 1.0, 8, 1.0, 0.0).unwrap())
    }

    #[test]
    fn tr1_of_vanishing_field() {
        let (d, m) = unit();
        let f = ScalarField::univariate(|x| x * (1.0 - x));
        let r = trace_eval(&f, &WeightFunction::affine_trig(2.0, 1.0, 1.0, 1), TraceMode::Tr1, &d, &m, 2.0).unwrap();
        assert_eq!(r.values, vec![0.0, 0.0]);
        assert_eq!(r.norm, 0.0);
    }

    #[test]
    fn tr2_limit_at_degenerate_end() {
        let (d, m) = unit();
        let f = ScalarField::univariate(|x| 1.0 / x);
        let r = trace_eval(&f, &WeightFunction::identity(1), TraceMode::Tr2, &d, &m, 2.0).unwrap();
        assert!(r.values[0].abs() < 1e-12);
        assert_relative_eq!(r.values[1], 1.0);
    }

    #[test]
    fn tr1_needs_floor() {
        let (d, m) = unit();
        let r = trace_eval(&ScalarField::constant(1, 1.0), &WeightFunction::identity(1), TraceMode::Tr1, &d, &m, 2.0);
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn disk_boundary_norm() {
        let d = Domain::disk(1.0).unwrap();
        let m = build_disk_mesh(1.0, 4, 64, 1.0).unwrap();
        let r = trace_eval(&ScalarField::constant(2, 1.0), &WeightFunction::one(2), TraceMode::Tr1, &d, &m, 1.0).unwrap();
        assert!((r.norm - 2.0 * std::f64::consts::PI).abs() < 1e-2);
        let v = WeightFunction::radial_power(0.5, 2, 1);
        assert!(trace_eval(&ScalarField::constant(2, 1.0), &v, TraceMode::Tr2, &d, &m, 1.0).is_err());
    }
}
