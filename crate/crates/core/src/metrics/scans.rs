use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{Representation, TangentVector, Word};
use crate::mobius::{cross_ratio, eigenvalue_path, RiemannPoint};
use crate::numerics::{combine, compensated_sum, Order, STENCIL};
use crate::thermo::{operator_dimension, Engine, OperatorSettings};

use super::engine::{level_spread, MetricEngine, LEVELS};

/// One sample of a path scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PathSample {
    pub tau: f64,
    pub h: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "hF")]
    pub hf: f64,
    /// Refinement change of `h` at this sample.
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathScan {
    pub label: String,
    pub engine: Engine,
    pub samples: Vec<PathSample>,
    /// Largest refinement change relative to the one at `tau = 0`; a large
    /// value flags samples the estimator resolves worse than the basepoint.
    pub refinement_flag: bool,
}

impl PathScan {
    /// `(tau, h, F, hF)` rows.
    pub fn rows(&self) -> Vec<[f64; 4]> {
        self.samples.iter().map(|s| [s.tau, s.h, s.f, s.hf]).collect()
    }
}

/// Normalized length `F(tau)` along a path, weighted by the equilibrium
/// state of the path's basepoint.
#[derive(Clone, Debug, Serialize)]
pub struct PsLengthCurve {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub level: usize,
    /// Largest change between consecutive carried levels.
    pub gap: f64,
}

struct LengthWeights {
    weights: [Vec<f64>; LEVELS],
    norms: [f64; LEVELS],
}

impl LengthWeights {
    fn at(engine: &MetricEngine, base: &[f64]) -> Result<LengthWeights> {
        let states = engine.states(base)?;
        let weights = states.each_ref().map(|s| s.lengths.weights(s.h));
        let norms = std::array::from_fn(|i| {
            compensated_sum(weights[i].iter().zip(&states[i].lengths.lengths).map(|(w, l)| w * l))
        });
        Ok(LengthWeights { weights, norms })
    }

    fn f(&self, level: usize, lengths: &[f64]) -> f64 {
        compensated_sum(self.weights[level].iter().zip(lengths).map(|(w, l)| w * l)) / self.norms[level]
    }
}

pub fn ps_length_function(engine: &MetricEngine, v: &TangentVector, taus: &[f64]) -> Result<PsLengthCurve> {
    let lw = LengthWeights::at(engine, &v.base)?;
    let per_level: Vec<[f64; LEVELS]> = taus
        .par_iter()
        .map(|t| {
            let states = engine.states(&v.point(*t))?;
            Ok(std::array::from_fn(|i| lw.f(i, &states[i].lengths.lengths)))
        })
        .collect::<Result<_>>()?;
    Ok(PsLengthCurve {
        taus: taus.to_vec(),
        values: per_level.iter().map(|p| p[LEVELS - 1]).collect(),
        level: engine.level,
        gap: per_level.iter().map(|p| level_spread(p)).fold(0.0, f64::max),
    })
}

/// Dimension along `v.point(tau)`.
///
/// The orbit engine anchors its period-`N` values at the operator
/// dimension of the family origin. The operator engine transports the base
/// coding, so it only applies while the path stays fuchsian.
pub fn hausdorff_path_scan(
    engine: &MetricEngine,
    v: &TangentVector,
    taus: &[f64],
    which: Engine,
) -> Result<PathScan> {
    let lw = LengthWeights::at(engine, &v.base)?;
    let samples: Vec<PathSample> = taus
        .iter()
        .map(|&tau| -> Result<PathSample> {
            let p = v.point(tau);
            let states = engine.states(&p)?;
            let f = lw.f(LEVELS - 1, &states[LEVELS - 1].lengths.lengths);
            let (h, error) = match which {
                Engine::Orbit => {
                    let hs = engine.anchor(&states);
                    (hs[LEVELS - 1], level_spread(&hs))
                }
                Engine::Operator => {
                    let rho = engine.family.evaluate(&p)?;
                    let coding = engine.ensemble.coding().transported(&rho)?;
                    let (r, _) = operator_dimension(&coding, &OperatorSettings::for_coding(&coding), &engine.cfg)?;
                    (r.s_star, r.error_estimate.max(r.residual))
                }
            };
            Ok(PathSample { tau, h, f, hf: h * f, error })
        })
        .zip(taus)
        .map(|(r, &at)| r.map_err(|e| Error::EvaluatorFailure { at, source: Box::new(e) }))
        .collect::<Result<_>>()?;
    let at_zero = samples.iter().find(|s| s.tau == 0.0).map(|s| s.error).unwrap_or(0.0);
    let worst = samples.iter().map(|s| s.error).fold(0.0, f64::max);
    Ok(PathScan {
        label: v.label.clone(),
        engine: which,
        refinement_flag: worst > 10.0 * at_zero.max(engine.cfg.fd_tolerance),
        samples,
    })
}

/// Per-class derivatives along `v`.
#[derive(Clone, Debug, Serialize)]
pub struct LengthRow {
    pub word: String,
    pub length: f64,
    /// `(h L)'`.
    pub hl_dot: f64,
    pub l_dot: f64,
    /// `|L' - k L|`.
    pub residual: f64,
    /// `Re(lambda' / lambda)`.
    pub lambda_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthScan {
    pub label: String,
    /// `k = -h'/h` at the basepoint.
    pub k_hat: f64,
    pub rows: Vec<LengthRow>,
    /// Classes that stopped being loxodromic on the stencil.
    pub skipped: Vec<String>,
}

impl LengthScan {
    pub fn max_abs(&self, f: impl Fn(&LengthRow) -> f64) -> f64 {
        self.rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max)
    }
}

/// `(h L)'`, `L'`, `k` and `Re(lambda'/lambda)` for each class along `v`.
pub fn length_derivative_scan(engine: &MetricEngine, v: &TangentVector, classes: &[Word]) -> Result<LengthScan> {
    let step = engine.cfg.fd_step;
    let points: Vec<Vec<f64>> = STENCIL.iter().map(|o| v.point(o * step)).collect();
    let reps: Vec<Representation> = points.iter().map(|p| engine.family.evaluate(p)).collect::<Result<_>>()?;
    let hs: Vec<f64> = points.par_iter().map(|p| engine.raw_dimension(p)).collect::<Result<_>>()?;
    let hs: [f64; 7] = hs.try_into().expect("seven stencil points");
    let h0 = hs[3];
    let h_dot = combine(&hs, step, Order::First).value;
    let k_hat = -h_dot / h0;
    let names = engine.family.base().names();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for w in classes {
        let row = (|| -> Result<LengthRow> {
            let maps = reps.iter().map(|r| r.evaluate_word(w)).collect::<Result<Vec<_>>>()?;
            let lambdas = eigenvalue_path(&maps)?;
            let ls: [f64; 7] = std::array::from_fn(|i| 2.0 * lambdas[i].norm().ln());
            let log_abs: [f64; 7] = std::array::from_fn(|i| lambdas[i].norm().ln());
            let hl: [f64; 7] = std::array::from_fn(|i| hs[i] * ls[i]);
            let l_dot = combine(&ls, step, Order::First).value;
            Ok(LengthRow {
                word: w.display(names).to_string(),
                length: ls[3],
                hl_dot: combine(&hl, step, Order::First).value,
                l_dot,
                residual: (l_dot - k_hat * ls[3]).abs(),
                lambda_ratio: combine(&log_abs, step, Order::First).value,
            })
        })();
        match row {
            Ok(r) => rows.push(r),
            Err(Error::NotLoxodromic(_)) => skipped.push(w.display(names).to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(LengthScan { label: v.label.clone(), k_hat, rows, skipped })
}

/// The `count` shortest classes on `rho` among `classes`.
pub fn shortest_classes(rho: &Representation, classes: &[Word], count: usize) -> Result<Vec<Word>> {
    let mut with_len: Vec<(f64, &Word)> = classes
        .iter()
        .filter_map(|w| rho.evaluate_word(w).and_then(|m| m.translation_length()).ok().map(|l| (l, w)))
        .collect();
    with_len.sort_by(|a, b| a.0.total_cmp(&b.0));
    if with_len.len() < count {
        return Err(Error::InsufficientData(format!("{} loxodromic classes, {count} requested", with_len.len())));
    }
    Ok(with_len.into_iter().take(count).map(|(_, w)| w.clone()).collect())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CrossRatioReport {
    pub samples: usize,
    pub max_imag: f64,
}

/// Imaginary parts of cross ratios of random 4-tuples of axis endpoints.
pub fn cross_ratio_reality(rho: &Representation, classes: &[Word], samples: usize, seed: u64) -> Result<CrossRatioReport> {
    let mut endpoints: Vec<RiemannPoint> = Vec::new();
    for w in classes {
        if let Ok((a, b)) = rho.evaluate_word(w).and_then(|m| m.fixed_points()) {
            endpoints.extend([a, b]);
        }
    }
    if endpoints.len() < 4 {
        return Err(Error::InsufficientData("fewer than four axis endpoints".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_imag: f64 = 0.0;
    let mut taken = 0;
    let mut attempts = 0;
    while taken < samples {
        attempts += 1;
        if attempts > 100 * samples {
            return Err(Error::InsufficientData("too many coincident endpoints".into()));
        }
        let pick: Vec<RiemannPoint> = endpoints.choose_multiple(&mut rng, 4).copied().collect();
        match cross_ratio(pick[0], pick[1], pick[2], pick[3]) {
            Ok(c) => {
                max_imag = max_imag.max(c.im.abs());
                taken += 1;
            }
            Err(Error::DegenerateConfiguration(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(CrossRatioReport { samples, max_imag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_regular_4g_gon_group, enumerate_conjugacy_classes, ClassFilter};

    #[test]
    fn shortest_classes_are_sorted_and_cross_ratios_real() {
        let (_, rho) = build_regular_4g_gon_group(2).unwrap();
        let classes = enumerate_conjugacy_classes(rho.rank(), Some(&rho), 3, ClassFilter { primitive_only: true });
        let short = shortest_classes(&rho, &classes, 12).unwrap();
        let lengths: Vec<f64> =
            short.iter().map(|w| rho.evaluate_word(w).unwrap().translation_length().unwrap()).collect();
        assert!(lengths.windows(2).all(|p| p[0] <= p[1]));
        assert!(shortest_classes(&rho, &classes, classes.len() + 1).is_err());

        let report = cross_ratio_reality(&rho, &short, 50, 7).unwrap();
        assert_eq!(report.samples, 50);
        assert!(report.max_imag < 1e-9);
    }
}
