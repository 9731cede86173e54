use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{DeformationFamily, TangentVector};
use crate::numerics::{combine, combine_parts, compensated_sum, FdResult, NumericsConfig, Order, STENCIL};
use crate::thermo::{LevelLengths, OrbitEnsemble, DEFAULT_BRACKET};

/// A value with its error bar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Estimate {
        Estimate { value, error: error.abs() }
    }

    /// True if the value exceeds `k` error bars.
    pub fn exceeds(&self, k: f64) -> bool {
        self.value > k * self.error
    }

    /// The top level's value, with an error bar covering its own error and
    /// every change between consecutive levels (coarsest first).
    pub fn across_levels(levels: &[Estimate]) -> Estimate {
        let top = levels.last().expect("at least one level");
        let values: Vec<f64> = levels.iter().map(|e| e.value).collect();
        Estimate::new(top.value, top.error.max(level_spread(&values)))
    }
}

/// Period levels carried for truncation estimates: `N - 2`, `N - 1` and `N`.
pub const LEVELS: usize = 3;

/// Largest change between consecutive entries.
pub fn level_spread(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

/// Lengths and orbit-engine dimension of one period level at one parameter.
#[derive(Clone, Debug)]
pub struct LevelState {
    pub lengths: LevelLengths,
    pub h: f64,
}

/// Evaluates orbit-engine quantities along a deformation family.
///
/// Dimensions are read from the period-`level` pressure, with the two
/// levels below evaluated alongside for truncation estimates; [`Self::anchored`]
/// shifts them so that the family origin takes a reference value (the
/// operator-engine dimension of the base).
#[derive(Clone, Debug)]
pub struct MetricEngine<'a> {
    pub family: &'a DeformationFamily,
    pub ensemble: &'a OrbitEnsemble,
    pub cfg: NumericsConfig,
    pub bracket: (f64, f64),
    pub level: usize,
    pub reference_h: f64,
    origin_h: [f64; LEVELS],
}

impl<'a> MetricEngine<'a> {
    pub fn new(
        family: &'a DeformationFamily,
        ensemble: &'a OrbitEnsemble,
        cfg: &NumericsConfig,
        reference_h: f64,
    ) -> Result<MetricEngine<'a>> {
        Self::at_level(family, ensemble, cfg, reference_h, ensemble.n_max())
    }

    pub fn at_level(
        family: &'a DeformationFamily,
        ensemble: &'a OrbitEnsemble,
        cfg: &NumericsConfig,
        reference_h: f64,
        level: usize,
    ) -> Result<MetricEngine<'a>> {
        if level < LEVELS + 1 || level > ensemble.n_max() {
            return Err(Error::Config(format!("period level {level} outside {}..={}", LEVELS + 1, ensemble.n_max())));
        }
        let mut e = MetricEngine {
            family,
            ensemble,
            cfg: cfg.clone(),
            bracket: DEFAULT_BRACKET,
            level,
            reference_h,
            origin_h: [f64::NAN; LEVELS],
        };
        e.origin_h = e.states(&family.origin())?.map(|s| s.h);
        Ok(e)
    }

    pub fn state(&self, tau: &[f64], level: usize) -> Result<LevelState> {
        let rho = self.family.evaluate(tau)?;
        let lengths = self.ensemble.levels_at(&rho, &[level])?.pop().expect("one level requested");
        let h = lengths.dimension(self.bracket)?;
        Ok(LevelState { lengths, h })
    }

    /// States of the carried levels at `tau`, coarsest first.
    pub fn states(&self, tau: &[f64]) -> Result<[LevelState; LEVELS]> {
        let rho = self.family.evaluate(tau)?;
        let periods: [usize; LEVELS] = std::array::from_fn(|i| self.level + 1 + i - LEVELS);
        let mut levels = self.ensemble.levels_at(&rho, &periods)?.into_iter();
        let states: Vec<LevelState> = (0..LEVELS)
            .map(|_| {
                let lengths = levels.next().expect("one entry per requested level");
                let h = lengths.dimension(self.bracket)?;
                Ok(LevelState { lengths, h })
            })
            .collect::<Result<_>>()?;
        Ok(states.try_into().unwrap_or_else(|_| unreachable!()))
    }

    /// Period-level dimension at `tau`.
    pub fn raw_dimension(&self, tau: &[f64]) -> Result<f64> {
        Ok(self.state(tau, self.level)?.h)
    }

    /// Dimension at `tau` shifted so the family origin reads `reference_h`.
    pub fn anchored(&self, tau: &[f64]) -> Result<f64> {
        Ok(self.raw_dimension(tau)? - self.origin_dimension() + self.reference_h)
    }

    /// Anchored dimensions of the carried levels, coarsest first.
    pub fn anchored_levels(&self, tau: &[f64]) -> Result<[f64; LEVELS]> {
        Ok(self.anchor(&self.states(tau)?))
    }

    /// Anchored dimensions of already computed states.
    pub fn anchor(&self, states: &[LevelState; LEVELS]) -> [f64; LEVELS] {
        std::array::from_fn(|i| states[i].h - self.origin_h[i] + self.reference_h)
    }

    /// Level-`N` dimension at the family origin.
    pub fn origin_dimension(&self) -> f64 {
        self.origin_h[LEVELS - 1]
    }

    /// States on the 7-point stencil `v.point(STENCIL[i] * step)`, one
    /// stencil per carried level.
    pub fn stencil(&self, v: &TangentVector) -> Result<[Vec<LevelState>; LEVELS]> {
        let step = self.cfg.fd_step;
        let points: Vec<[LevelState; LEVELS]> =
            STENCIL.par_iter().map(|o| self.states(&v.point(o * step))).collect::<Result<_>>()?;
        let mut by_level: [Vec<LevelState>; LEVELS] = std::array::from_fn(|_| Vec::with_capacity(STENCIL.len()));
        for states in points {
            for (level, s) in by_level.iter_mut().zip(states) {
                level.push(s);
            }
        }
        Ok(by_level)
    }

    /// Every derivative along `v` at each carried level, coarsest first.
    pub fn direction_data(&self, v: &TangentVector) -> Result<[DirectionData; LEVELS]> {
        let step = self.cfg.fd_step;
        Ok(self.stencil(v)?.map(|states| DirectionData::from_stencil(&states, step)))
    }
}

/// Derivatives along one direction at one period level.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionData {
    pub period: usize,
    pub h: f64,
    pub h1: Estimate,
    pub h2: Estimate,
    pub f1: Estimate,
    pub f2: Estimate,
    /// `(h F)''` by differencing the product.
    pub g_direct: Estimate,
    /// `h'' F + 2 h' F' + h F''` with `F(0) = 1`.
    pub g_decomposed: f64,
    /// `Var(Phi', m) / (-int Phi dm)`.
    pub w_variance: f64,
    /// `int Phi'' dm / int Phi dm`.
    pub w_second: f64,
    /// Finite-difference error of the two forms (Richardson gap).
    pub w_fd_error: f64,
    /// `max |S_n Phi'| / n` over the orbits.
    pub max_phi_dot: f64,
    #[serde(skip)]
    pub phi_dot: Vec<f64>,
    #[serde(skip)]
    pub weights: Vec<f64>,
}

impl DirectionData {
    pub fn from_stencil(states: &[LevelState], step: f64) -> DirectionData {
        let base = &states[3];
        let n = base.lengths.period as f64;
        let count = base.lengths.lengths.len();
        let weights = base.lengths.weights(base.h);
        let wl0 = compensated_sum(weights.iter().zip(&base.lengths.lengths).map(|(w, l)| w * l));
        let hs: [f64; 7] = std::array::from_fn(|i| states[i].h);
        let fs: [f64; 7] = std::array::from_fn(|i| {
            compensated_sum(weights.iter().zip(&states[i].lengths.lengths).map(|(w, l)| w * l)) / wl0
        });
        let hf: [f64; 7] = std::array::from_fn(|i| hs[i] * fs[i]);
        let h1 = combine(&hs, step, Order::First);
        let h2 = combine(&hs, step, Order::Second);
        let f1 = combine(&fs, step, Order::First);
        let f2 = combine(&fs, step, Order::Second);
        let g = combine(&hf, step, Order::Second);
        // Birkhoff sums S_n Phi_t = -h(t) L(t) per orbit.
        let mut phi_dot = Vec::with_capacity(count);
        let mut phi_dot_fine = Vec::with_capacity(count);
        let (mut dd, mut dd_fine) = (0.0, 0.0);
        for (k, w) in weights.iter().enumerate() {
            let vals: [f64; 7] = std::array::from_fn(|i| -states[i].h * states[i].lengths.lengths[k]);
            let (d1, d1f) = combine_parts(&vals, step, Order::First);
            let (d2, d2f) = combine_parts(&vals, step, Order::Second);
            phi_dot.push(d1);
            phi_dot_fine.push(d1f);
            dd += w * d2;
            dd_fine += w * d2f;
        }
        let int_phi = -base.h * wl0 / n;
        let variance = |d: &[f64]| {
            let mean = compensated_sum(weights.iter().zip(d).map(|(w, x)| w * x));
            compensated_sum(weights.iter().zip(d).map(|(w, x)| w * (x - mean).powi(2))) / n
        };
        let w_variance = variance(&phi_dot) / (-int_phi);
        let w_second = dd / n / int_phi;
        let w_fd_error =
            (w_variance - variance(&phi_dot_fine) / (-int_phi)).abs().max((w_second - dd_fine / n / int_phi).abs());
        let max_phi_dot = phi_dot.iter().fold(0.0f64, |m, x| m.max(x.abs())) / n;
        DirectionData {
            period: base.lengths.period,
            h: base.h,
            h1: h1.into(),
            h2: h2.into(),
            f1: f1.into(),
            f2: f2.into(),
            g_direct: Estimate::new(g.value, g.error),
            g_decomposed: h2.value + 2.0 * h1.value * f1.value + base.h * f2.value,
            w_variance,
            w_second,
            w_fd_error,
            max_phi_dot,
            phi_dot,
            weights,
        }
    }
}

impl From<FdResult> for Estimate {
    fn from(r: FdResult) -> Estimate {
        Estimate::new(r.value, r.error)
    }
}
