//! Weight functions `v`, weight families `{w_α}`, shape maps `s`, and the
//! pointwise hypotheses placed on them.

mod family;
mod function;
mod hypothesis;
mod sampling;
mod shape;

pub use family::{WeightFamily, WeightSpec};
pub use function::{CubicSpline, WeightFunction, WeightKind, ZeroSet};
pub use hypothesis::{
    dimension_window, hypothesis_check, minimal_sigma, HypothesisKind, HypothesisParams, HypothesisReport, Witness, SUP_SAFETY,
};
pub use sampling::SamplePlan;
pub use shape::{validate_shape_map, ShapeKind, ShapeMap};
