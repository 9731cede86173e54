//! Pressure metric, its Weil-Petersson extension and Hessian signatures on
//! deformation families, evaluated from a frozen orbit ensemble.
//!
//! Every quantity is computed at period levels `N` and `N - 1`; the change
//! between them enters each error bar next to the Richardson gap.

mod engine;
mod evaluation;
mod hessian;
mod scans;

pub use engine::{level_spread, DirectionData, Estimate, LevelState, MetricEngine, LEVELS};
pub use evaluation::{
    complex_rotation, conformal_equivalence_check, degeneracy_probe, evaluate_direction, metric_g,
    metric_h_and_wp_identity, pressure_metric_w, ConformalCheck, DegeneracyVerdict, MetricEvaluation, WpIdentity,
};
pub use hessian::{count_signature, hessian_signature, HessianQuantity, HessianSignature};
pub use scans::{
    cross_ratio_reality, hausdorff_path_scan, length_derivative_scan, ps_length_function, shortest_classes,
    CrossRatioReport, LengthRow, LengthScan, PathSample, PathScan, PsLengthCurve,
};
