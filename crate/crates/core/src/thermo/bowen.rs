use serde::{Deserialize, Serialize};

use crate::coding::MarkovCoding;
use crate::error::{Error, Result};
use crate::numerics::{bracketed_root, NumericsConfig};

use super::ensemble::{LengthSpectrum, OrbitEnsemble};
use super::operator::{Discretization, TransferOperator};
use super::rpf::pressure;

pub const DEFAULT_BRACKET: (f64, f64) = (0.01, 2.5);
/// Bisection width before the secant polish.
pub const BISECT_WIDTH: f64 = 1e-8;
/// Target change of pressure between successive refinements.
pub const REFINEMENT_TARGET: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Operator,
    Orbit,
}

#[derive(Clone, Debug, Serialize)]
pub struct BowenSolveResult {
    pub engine: Engine,
    pub s_star: f64,
    pub bracket: (f64, f64),
    /// `|P(s* phi)|` for the operator engine.
    pub residual: f64,
    pub iterations: usize,
    /// Cylinder depth, collocation nodes or top period.
    pub resolution: usize,
    /// Change under the last refinement (operator) or consecutive-level gap (orbit).
    pub error_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Discretization>,
}

/// Root of `s -> P(s phi)` for one discretization.
pub fn bowen_dimension_operator(
    op: &TransferOperator,
    bracket: (f64, f64),
    cfg: &NumericsConfig,
) -> Result<BowenSolveResult> {
    let mut start: Option<Vec<f64>> = None;
    let root = bracketed_root(
        |s| {
            let (p, v) = pressure(op, &op.scaled_phi(s), start.as_deref(), cfg)?;
            start = Some(v);
            Ok(p)
        },
        bracket.0,
        bracket.1,
        BISECT_WIDTH,
        cfg,
    )?;
    Ok(BowenSolveResult {
        engine: Engine::Operator,
        s_star: root.root,
        bracket,
        residual: root.residual,
        iterations: root.iterations,
        resolution: op.scheme.resolution(),
        error_estimate: f64::NAN,
        scheme: Some(op.scheme),
    })
}

/// Settings for the adaptive operator engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSettings {
    pub start: Discretization,
    pub max_refinements: usize,
    pub target: f64,
    pub bracket: (f64, f64),
}

impl OperatorSettings {
    /// Collocation for interval codings, cylinders otherwise.
    pub fn for_coding(coding: &MarkovCoding) -> OperatorSettings {
        let start = match coding.chart {
            Some(_) => Discretization::Collocation { nodes: 8 },
            None => Discretization::Cylinders { depth: 4 },
        };
        let max_refinements = match start {
            Discretization::Collocation { .. } => 2,
            Discretization::Cylinders { .. } => 6,
        };
        OperatorSettings { start, max_refinements, target: REFINEMENT_TARGET, bracket: DEFAULT_BRACKET }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementStep {
    pub resolution: usize,
    pub s_star: f64,
    /// `|P_new(s*_previous)|`, the pressure change at the previous root.
    pub pressure_change: Option<f64>,
}

/// Largest cylinder count the adaptive engine will build.
pub const MAX_CYLINDERS: usize = 400_000;

/// Operator-engine dimension, refining until the pressure at the previous
/// root moves by less than the target.
pub fn operator_dimension(
    coding: &MarkovCoding,
    settings: &OperatorSettings,
    cfg: &NumericsConfig,
) -> Result<(BowenSolveResult, Vec<RefinementStep>)> {
    let mut scheme = settings.start;
    let mut steps: Vec<RefinementStep> = Vec::new();
    let mut best: Option<BowenSolveResult> = None;
    for _ in 0..=settings.max_refinements {
        if let Discretization::Cylinders { depth } = scheme {
            if estimated_cylinders(coding, depth) > MAX_CYLINDERS && best.is_some() {
                break;
            }
        }
        let op = TransferOperator::new(coding, scheme)?;
        let change = match &best {
            Some(prev) => Some(pressure(&op, &op.scaled_phi(prev.s_star), None, cfg)?.0.abs()),
            None => None,
        };
        let bracket = match &best {
            Some(prev) => narrow_bracket(&op, prev.s_star, change.unwrap_or(1.0), settings.bracket, cfg)?,
            None => settings.bracket,
        };
        let mut r = bowen_dimension_operator(&op, bracket, cfg)?;
        r.bracket = settings.bracket;
        steps.push(RefinementStep { resolution: scheme.resolution(), s_star: r.s_star, pressure_change: change });
        r.error_estimate = change.unwrap_or(f64::NAN);
        best = Some(r);
        if change.map(|c| c < settings.target).unwrap_or(false) {
            break;
        }
        scheme = scheme.refined();
    }
    let best = best.ok_or_else(|| Error::Config("no refinement levels".into()))?;
    Ok((best, steps))
}

fn estimated_cylinders(coding: &MarkovCoding, depth: usize) -> usize {
    let rho = coding.transitions.spectral_radius();
    (coding.n_cells() as f64 * rho.powi(depth as i32 - 1)) as usize
}

/// A bracket around the previous root, widened until the pressure changes sign.
fn narrow_bracket(
    op: &TransferOperator,
    center: f64,
    change: f64,
    fallback: (f64, f64),
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    let mut half = (100.0 * change).max(1e-7);
    while half < 0.5 {
        let (lo, hi) = ((center - half).max(fallback.0), (center + half).min(fallback.1));
        let plo = pressure(op, &op.scaled_phi(lo), None, cfg)?.0;
        let phi = pressure(op, &op.scaled_phi(hi), None, cfg)?.0;
        if plo > 0.0 && phi < 0.0 {
            return Ok((lo, hi));
        }
        half *= 10.0;
    }
    Ok(fallback)
}

/// Orbit-engine dimension from the top two period levels of a spectrum.
pub fn orbit_dimension(spectrum: &LengthSpectrum, bracket: (f64, f64)) -> Result<BowenSolveResult> {
    let n = spectrum.levels.len();
    if n < 2 {
        return Err(Error::InsufficientData("orbit dimension needs two period levels".into()));
    }
    let top = spectrum.top().dimension(bracket)?;
    let below = spectrum.levels[n - 2].dimension(bracket)?;
    Ok(BowenSolveResult {
        engine: Engine::Orbit,
        s_star: top,
        bracket,
        residual: spectrum.top().pressure(top).abs(),
        iterations: 0,
        resolution: spectrum.top().period,
        error_estimate: (top - below).abs(),
        scheme: None,
    })
}

/// Orbit-engine dimension of a coding's own group.
pub fn orbit_dimension_of(coding: &MarkovCoding, n_max: usize, bracket: (f64, f64)) -> Result<BowenSolveResult> {
    let e = OrbitEnsemble::build(coding, n_max)?;
    orbit_dimension(&e.base_spectrum(), bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::schottky_coding;
    use crate::groups::{build_schottky, Circle};
    use crate::mobius::C64;

    #[test]
    fn schottky_engines_agree() {
        let g = build_schottky(&[
            Circle::new(C64::new(-3.0, 0.0), 1.0),
            Circle::new(C64::new(3.0, 0.0), 1.0),
            Circle::new(C64::new(0.0, -3.0), 1.0),
            Circle::new(C64::new(0.0, 3.0), 1.0),
        ])
        .unwrap();
        let c = schottky_coding(&g).unwrap();
        let cfg = NumericsConfig::default();
        let (op, _) = operator_dimension(&c, &OperatorSettings::for_coding(&c), &cfg).unwrap();
        let orb = orbit_dimension_of(&c, 10, DEFAULT_BRACKET).unwrap();
        assert!(op.residual <= 1e-10);
        assert!((op.s_star - orb.s_star).abs() < 5e-3f64.max(3.0 * orb.error_estimate), "{op:?} {orb:?}");
    }
}
