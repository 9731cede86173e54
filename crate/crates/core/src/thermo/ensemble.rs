use rayon::prelude::*;
use serde::Serialize;

use crate::coding::{orbit_group_element, periodic_orbits, MarkovCoding};
use crate::error::{Error, Result};
use crate::groups::Representation;
use crate::mobius::{length_from_trace, MoebiusMap};
use crate::numerics::compensated_sum;

/// Fewest orbits accepted at the top level of an ensemble.
pub const MIN_TOP_LEVEL: usize = 50;
/// Fixed points closer than this (in chart parameter) to a partition endpoint are flagged.
pub const NEAR_ENDPOINT: f64 = 1e-12;
const PARALLEL_CHUNK: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleOrbit {
    pub cells: Vec<u32>,
    /// Periodic points of the shift on this cycle.
    pub multiplicity: usize,
    /// `L_{gamma_z}` at the coding's representation.
    pub base_length: f64,
    /// `|S_n phi(z) + L_{gamma_z}|` along the actual orbit of the fixed point.
    pub birkhoff_residual: f64,
    pub near_endpoint: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitLevel {
    pub period: usize,
    pub orbits: Vec<EnsembleOrbit>,
}

/// Periodic orbits of a coding up to a maximal period, re-evaluable on any
/// representation with the same marking.
#[derive(Clone, Debug)]
pub struct OrbitEnsemble {
    pub levels: Vec<OrbitLevel>,
    /// Cycles dropped because their group element is not loxodromic.
    pub excluded: usize,
    /// Cycles kept although an orbit point lies on a partition endpoint.
    pub near_endpoint: usize,
    pub max_birkhoff_residual: f64,
    cell_branch: Vec<u32>,
    coding: MarkovCoding,
}

impl OrbitEnsemble {
    pub fn build(coding: &MarkovCoding, n_max: usize) -> Result<OrbitEnsemble> {
        if n_max < 2 {
            return Err(Error::Config("orbit ensembles need at least two period levels".into()));
        }
        let mut levels = Vec::with_capacity(n_max);
        let (mut excluded, mut near_endpoint) = (0, 0);
        let mut max_birkhoff_residual: f64 = 0.0;
        for n in 1..=n_max {
            let cycles = periodic_orbits(&coding.transitions, n, false);
            let evaluated: Vec<Option<EnsembleOrbit>> = cycles
                .par_iter()
                .with_min_len(PARALLEL_CHUNK)
                .map(|c| {
                    let e = orbit_group_element(coding, &c.cells).ok()?;
                    let length = e.gamma.translation_length().ok()?;
                    Some(EnsembleOrbit {
                        cells: c.cells.clone(),
                        multiplicity: c.multiplicity(),
                        base_length: length,
                        birkhoff_residual: (e.birkhoff_phi + length).abs(),
                        near_endpoint: e.endpoint_distance <= NEAR_ENDPOINT,
                    })
                })
                .collect();
            let mut orbits = Vec::with_capacity(evaluated.len());
            for o in evaluated {
                match o {
                    Some(o) => {
                        near_endpoint += o.near_endpoint as usize;
                        max_birkhoff_residual = max_birkhoff_residual.max(o.birkhoff_residual);
                        orbits.push(o);
                    }
                    None => excluded += 1,
                }
            }
            levels.push(OrbitLevel { period: n, orbits });
        }
        let top = levels.last().map(|l| l.orbits.len()).unwrap_or(0);
        if top < MIN_TOP_LEVEL {
            return Err(Error::EnsembleTooSmall(top));
        }
        Ok(OrbitEnsemble {
            levels,
            excluded,
            near_endpoint,
            max_birkhoff_residual,
            cell_branch: coding.cells.iter().map(|c| c.branch as u32).collect(),
            coding: coding.clone(),
        })
    }

    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    pub fn coding(&self) -> &MarkovCoding {
        &self.coding
    }

    /// Lengths at the coding's own representation.
    pub fn base_spectrum(&self) -> LengthSpectrum {
        LengthSpectrum {
            levels: self
                .levels
                .iter()
                .map(|l| LevelLengths {
                    period: l.period,
                    multiplicity: l.orbits.iter().map(|o| o.multiplicity as f64).collect(),
                    lengths: l.orbits.iter().map(|o| o.base_length).collect(),
                })
                .collect(),
        }
    }

    /// `L_{gamma_z}` for every orbit, with the branches evaluated on `rho`.
    pub fn spectrum(&self, rho: &Representation) -> Result<LengthSpectrum> {
        let periods: Vec<usize> = (1..=self.n_max()).collect();
        Ok(LengthSpectrum { levels: self.levels_at(rho, &periods)? })
    }

    /// Lengths of the orbits of the given periods on `rho`.
    pub fn levels_at(&self, rho: &Representation, periods: &[usize]) -> Result<Vec<LevelLengths>> {
        let branches: Vec<MoebiusMap> =
            self.coding.branches.iter().map(|b| rho.evaluate_word(&b.word)).collect::<Result<_>>()?;
        periods
            .iter()
            .map(|&n| {
                let l = self
                    .levels
                    .get(n.wrapping_sub(1))
                    .ok_or_else(|| Error::Config(format!("ensemble has no period {n}")))?;
                let lengths = l
                    .orbits
                    .par_iter()
                    .with_min_len(PARALLEL_CHUNK)
                    .map(|o| {
                        let mut g = MoebiusMap::IDENTITY;
                        for &k in &o.cells {
                            g = branches[self.cell_branch[k as usize] as usize] * g;
                        }
                        length_from_trace(g.trace())
                    })
                    .collect();
                Ok(LevelLengths {
                    period: l.period,
                    multiplicity: l.orbits.iter().map(|o| o.multiplicity as f64).collect(),
                    lengths,
                })
            })
            .collect()
    }
}

/// Orbit lengths of one period.
#[derive(Clone, Debug)]
pub struct LevelLengths {
    pub period: usize,
    pub multiplicity: Vec<f64>,
    pub lengths: Vec<f64>,
}

impl LevelLengths {
    /// `(1/n) log sum_{sigma^n x = x} e^{values(x)}`, for Birkhoff sums given per orbit.
    pub fn pressure_of(&self, values: &[f64]) -> f64 {
        let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum = compensated_sum(self.multiplicity.iter().zip(values).map(|(m, v)| m * (v - top).exp()));
        (top + sum.ln()) / self.period as f64
    }

    /// `P_n(s) = (1/n) log sum e^{-s L}`.
    pub fn pressure(&self, s: f64) -> f64 {
        let top = self.lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let sum = compensated_sum(self.multiplicity.iter().zip(&self.lengths).map(|(m, l)| m * (-s * (l - top)).exp()));
        (-s * top + sum.ln()) / self.period as f64
    }

    /// Normalized weights `w ~ e^{S_n f}` for Birkhoff sums `values`.
    pub fn weights_of(&self, values: &[f64]) -> Vec<f64> {
        let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = self.multiplicity.iter().zip(values).map(|(m, v)| m * (v - top).exp()).collect();
        let total = compensated_sum(raw.iter().copied());
        raw.into_iter().map(|w| w / total).collect()
    }

    /// Equilibrium weights of `-s L`.
    pub fn weights(&self, s: f64) -> Vec<f64> {
        let values: Vec<f64> = self.lengths.iter().map(|l| -s * l).collect();
        self.weights_of(&values)
    }

    /// Root of `P_n(s) = 0` on `bracket`, by Newton's method from the left end
    /// (monotone for a convex decreasing function).
    pub fn dimension(&self, bracket: (f64, f64)) -> Result<f64> {
        let (lo, hi) = bracket;
        let (flo, fhi) = (self.pressure(lo), self.pressure(hi));
        if !(flo > 0.0 && fhi < 0.0) {
            return Err(Error::BracketFailure { lo, hi, flo, fhi });
        }
        let n = self.period as f64;
        let mut s = lo;
        for _ in 0..200 {
            let w = self.weights(s);
            let slope = -compensated_sum(w.iter().zip(&self.lengths).map(|(a, b)| a * b)) / n;
            let step = self.pressure(s) / slope;
            let next = (s - step).clamp(lo, hi);
            if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
                return Ok(next);
            }
            s = next;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug)]
pub struct LengthSpectrum {
    pub levels: Vec<LevelLengths>,
}

impl LengthSpectrum {
    pub fn top(&self) -> &LevelLengths {
        self.levels.last().expect("ensembles have levels")
    }

    pub fn level(&self, period: usize) -> &LevelLengths {
        &self.levels[period - 1]
    }

    /// Dimension estimates per period level.
    pub fn dimensions(&self, bracket: (f64, f64)) -> Result<Vec<f64>> {
        self.levels.iter().map(|l| l.dimension(bracket)).collect()
    }
}

/// Outcome of testing whether an observable is a coboundary.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LivsicVerdict {
    /// `max |S_n g(x)| / n` over the periodic orbits tested.
    pub max_normalized_sum: f64,
    pub tolerance: f64,
    pub coboundary: bool,
}

/// Livsic criterion on periodic data `(period, S_n g)`.
pub fn livsic_test(sums: impl IntoIterator<Item = (usize, f64)>, tolerance: f64) -> LivsicVerdict {
    let max_normalized_sum = sums.into_iter().map(|(n, s)| s.abs() / n as f64).fold(0.0, f64::max);
    LivsicVerdict { max_normalized_sum, tolerance, coboundary: max_normalized_sum <= tolerance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{schottky_coding, TransitionMatrix, periodic_orbits};
    use crate::groups::{build_schottky, Circle};
    use crate::mobius::C64;

    fn coding() -> MarkovCoding {
        let g = build_schottky(&[
            Circle::new(C64::new(-3.0, 0.0), 1.0),
            Circle::new(C64::new(3.0, 0.0), 1.0),
            Circle::new(C64::new(0.0, -3.0), 1.0),
            Circle::new(C64::new(0.0, 3.0), 1.0),
        ])
        .unwrap();
        schottky_coding(&g).unwrap()
    }

    #[test]
    fn zero_temperature_counts_periodic_points() {
        let c = coding();
        let e = OrbitEnsemble::build(&c, 6).unwrap();
        let spec = e.base_spectrum();
        for l in &spec.levels {
            let count = c.transitions.periodic_point_count(l.period) as f64;
            assert!((l.pressure(0.0) - count.ln() / l.period as f64).abs() < 1e-13);
            let w = l.weights(1.0);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert!(e.max_birkhoff_residual < 1e-8);
        assert_eq!(e.excluded, 0);
    }

    #[test]
    fn spectrum_on_own_representation_is_base() {
        let c = coding();
        let e = OrbitEnsemble::build(&c, 5).unwrap();
        let a = e.base_spectrum();
        let b = e.spectrum(&c.rho).unwrap();
        for (x, y) in a.levels.iter().zip(&b.levels) {
            for (p, q) in x.lengths.iter().zip(&y.lengths) {
                assert!((p - q).abs() < 1e-10 * p.max(1.0));
            }
        }
    }

    #[test]
    fn level_dimension_solves_pressure() {
        let c = coding();
        let e = OrbitEnsemble::build(&c, 6).unwrap();
        let top = e.base_spectrum();
        let s = top.top().dimension((0.01, 2.5)).unwrap();
        assert!(top.top().pressure(s).abs() < 1e-14);
        assert!(s > 0.0 && s < 1.0);
    }

    #[test]
    fn telescoping_sums_are_coboundaries() {
        let a = TransitionMatrix::full_shift_without_backtracking(4, |i| i ^ 1).unwrap();
        let u = |k: u32| if k == 0 { 1.0 } else { 0.0 };
        let mut sums = Vec::new();
        let mut ones = Vec::new();
        for n in 1..=6 {
            for o in periodic_orbits(&a, n, false) {
                let s: f64 = (0..n).map(|i| u(o.cells[(i + 1) % n]) - u(o.cells[i])).sum();
                sums.push((n, s));
                ones.push((n, n as f64));
            }
        }
        let v = livsic_test(sums, 1e-12);
        assert!(v.coboundary && v.max_normalized_sum == 0.0);
        assert!(!livsic_test(ones, 1e-6).coboundary);
    }
}
