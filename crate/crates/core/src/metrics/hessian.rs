use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::TangentVector;
use crate::numerics::{combine, combine_mixed, compensated_sum, cross_offsets, FdResult, Order, STENCIL};

use super::engine::{Estimate, LevelState, MetricEngine, LEVELS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianQuantity {
    /// The dimension `h`.
    Dimension,
    /// `h F`, with `F` the normalized length for the basepoint's equilibrium state.
    DimensionTimesLength,
}

#[derive(Clone, Debug, Serialize)]
pub struct HessianSignature {
    pub labels: Vec<String>,
    pub quantity: HessianQuantity,
    pub gradient: Vec<Estimate>,
    pub matrix: Vec<Vec<f64>>,
    /// Richardson gap or largest level change, whichever is larger.
    pub entry_errors: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    /// Counts of positive, negative and zero eigenvalues.
    pub signature: (usize, usize, usize),
}

/// Eigenvalues above `threshold`, below `-threshold`, and the rest.
pub fn count_signature(eigenvalues: &[f64], threshold: f64) -> (usize, usize, usize) {
    let r = eigenvalues.iter().filter(|e| **e > threshold).count();
    let s = eigenvalues.iter().filter(|e| **e < -threshold).count();
    (r, s, eigenvalues.len() - r - s)
}

struct Evaluator<'e, 'a> {
    engine: &'e MetricEngine<'a>,
    quantity: HessianQuantity,
    base: Vec<f64>,
    /// Base weights and `sum w L` per level, for `F`.
    weights: [(Vec<f64>, f64); LEVELS],
}

impl Evaluator<'_, '_> {
    fn at(&self, tau: &[f64]) -> Result<[f64; LEVELS]> {
        let states = self.engine.states(tau)?;
        Ok(std::array::from_fn(|i| self.value(&states[i], i)))
    }

    fn value(&self, s: &LevelState, level: usize) -> f64 {
        match self.quantity {
            HessianQuantity::Dimension => s.h,
            HessianQuantity::DimensionTimesLength => {
                let (w, norm) = &self.weights[level];
                s.h * compensated_sum(w.iter().zip(&s.lengths.lengths).map(|(w, l)| w * l)) / norm
            }
        }
    }

    fn point(&self, u: &[f64], a: f64, v: &[f64], b: f64) -> Vec<f64> {
        self.base.iter().zip(u.iter().zip(v)).map(|(x, (p, q))| x + a * p + b * q).collect()
    }
}

fn estimate(levels: [FdResult; LEVELS]) -> Estimate {
    Estimate::across_levels(&levels.map(Estimate::from))
}

/// Finite-difference Hessian of `quantity` on the chart spanned by `chart`,
/// all vectors sharing one basepoint.
///
/// Fails with [`Error::NotCritical`] when a gradient component exceeds three
/// times the tolerance plus its error bar, which includes the level changes.
pub fn hessian_signature(
    engine: &MetricEngine,
    chart: &[TangentVector],
    quantity: HessianQuantity,
) -> Result<HessianSignature> {
    let base = chart.first().ok_or_else(|| Error::Config("empty chart".into()))?.base.clone();
    if chart.iter().any(|v| v.base != base) {
        return Err(Error::Config("chart vectors have different basepoints".into()));
    }
    let states = engine.states(&base)?;
    let weights = states.each_ref().map(|s| {
        let w = s.lengths.weights(s.h);
        let norm = compensated_sum(w.iter().zip(&s.lengths.lengths).map(|(w, l)| w * l));
        (w, norm)
    });
    let ev = Evaluator { engine, quantity, base, weights };
    let step = engine.cfg.fd_step;
    let zero = vec![0.0; ev.base.len()];
    let n = chart.len();

    let mut gradient = Vec::with_capacity(n);
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    let mut errors = vec![vec![0.0; n]; n];
    for (i, v) in chart.iter().enumerate() {
        let vals: Vec<[f64; LEVELS]> =
            STENCIL.par_iter().map(|o| ev.at(&ev.point(&v.direction, o * step, &zero, 0.0))).collect::<Result<_>>()?;
        let level = |k: usize| -> [f64; 7] { std::array::from_fn(|j| vals[j][k]) };
        let g = estimate(std::array::from_fn(|k| combine(&level(k), step, Order::First)));
        let d = estimate(std::array::from_fn(|k| combine(&level(k), step, Order::Second)));
        if g.value.abs() > 3.0 * engine.cfg.fd_tolerance + g.error {
            return Err(Error::NotCritical { index: i, value: g.value });
        }
        gradient.push(g);
        matrix[(i, i)] = d.value;
        errors[i][i] = d.error;
    }
    for i in 0..n {
        for j in i + 1..n {
            let (u, v) = (&chart[i].direction, &chart[j].direction);
            let vals: Vec<[f64; LEVELS]> = cross_offsets(step)
                .par_iter()
                .map(|(a, b)| ev.at(&ev.point(u, *a, v, *b)))
                .collect::<Result<_>>()?;
            let level = |k: usize| -> [f64; 8] { std::array::from_fn(|m| vals[m][k]) };
            let e = estimate(std::array::from_fn(|k| combine_mixed(&level(k), step)));
            matrix[(i, j)] = e.value;
            matrix[(j, i)] = e.value;
            errors[i][j] = e.error;
            errors[j][i] = e.error;
        }
    }
    let threshold = 5.0 * errors.iter().flatten().fold(0.0f64, |m, e| m.max(*e));
    let mut eigenvalues: Vec<f64> = matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(HessianSignature {
        labels: chart.iter().map(|v| v.label.clone()).collect(),
        quantity,
        gradient,
        matrix: (0..n).map(|i| matrix.row(i).iter().copied().collect()).collect(),
        entry_errors: errors,
        signature: count_signature(&eigenvalues, threshold),
        eigenvalues,
        threshold,
    })
}
