use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mobius::{MoebiusMap, C64};

use super::{Letter, Representation};

const BIN_WIDTH: f64 = 0.5;

/// Fingerprint of an element of PSL(2,C), robust to rounding.
pub(crate) fn fingerprint(m: &MoebiusMap) -> u64 {
    let e = m.entries();
    let scale = e.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = e.iter().find(|z| z.norm() > 1e-6 * scale).copied().unwrap_or(C64::new(1.0, 0.0));
    let sign = if lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0) { -1.0 } else { 1.0 };
    let q = |x: f64| (x * sign / scale * 1e7).round() as i64;
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for z in e {
        (q(z.re), q(z.im)).hash(&mut h);
    }
    h.finish()
}

/// Distinct group elements by word length, as `(element, last letter)` per level.
/// Calls `visit(element, level)` once per distinct element, identity included.
fn sweep(rho: &Representation, max_len: usize, mut visit: impl FnMut(&MoebiusMap, usize)) {
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(fingerprint(&MoebiusMap::IDENTITY));
    visit(&MoebiusMap::IDENTITY, 0);
    let letters: Vec<(Letter, MoebiusMap)> =
        (0..2 * rho.rank()).map(Letter::from_index).map(|l| (l, rho.image(l))).collect();
    let mut frontier: Vec<(MoebiusMap, Option<Letter>)> = vec![(MoebiusMap::IDENTITY, None)];
    for level in 1..=max_len {
        let mut next = Vec::new();
        for (m, last) in &frontier {
            for (l, g) in &letters {
                if *last == Some(l.inverse()) {
                    continue;
                }
                let p = (*m * *g).normalized();
                if seen.insert(fingerprint(&p)) {
                    visit(&p, level);
                    if level < max_len {
                        next.push((p, Some(*l)));
                    }
                }
            }
        }
        frontier = next;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// Radius up to which all elements are believed counted.
    pub complete_radius: f64,
    /// `(R, N(R))` for the bins used in the fit.
    pub bins: Vec<(f64, usize)>,
    pub elements: usize,
}

/// Growth-rate estimate of the exponent of convergence of the Poincaré series,
/// from orbit counts of the basepoint above 0 at height 1.
pub fn poincare_delta_estimate(rho: &Representation, max_len: usize) -> Result<DeltaEstimate> {
    let mut displacements: Vec<f64> = Vec::new();
    let mut top_min = f64::INFINITY;
    sweep(rho, max_len, |m, level| {
        let d = m.h3_displacement();
        displacements.push(d);
        if level == max_len {
            top_min = top_min.min(d);
        }
    });
    if max_len < 2 {
        return Err(Error::InsufficientData(format!("max_len {max_len} resolves no radius bins")));
    }
    displacements.sort_by(f64::total_cmp);
    let complete_radius = top_min;
    let nbins = (complete_radius / BIN_WIDTH).floor() as usize;
    let mut bins = Vec::new();
    for k in 1..nbins {
        // The last full bin below the completeness radius is discarded.
        let r = k as f64 * BIN_WIDTH;
        let count = displacements.partition_point(|d| *d <= r);
        bins.push((r, count));
    }
    // Fit over the upper half of the resolvable range, where the exponential dominates.
    let start = bins.iter().position(|(r, _)| *r >= complete_radius / 2.0).unwrap_or(bins.len());
    let fit: Vec<(f64, f64)> = bins[start..].iter().map(|&(r, n)| (r, (n as f64).ln())).collect();
    if fit.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} radius bins below completeness radius {complete_radius:.3}",
            fit.len()
        )));
    }
    let n = fit.len() as f64;
    let (sx, sy) = fit.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = fit.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    Ok(DeltaEstimate { delta: sxy / sxx, complete_radius, bins: bins[start..].to_vec(), elements: displacements.len() })
}

/// Normalized Poincaré-series weights on the orbit of the basepoint.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitMeasure {
    /// Orbit points `(z, t)` in upper half-space coordinates.
    pub points: Vec<(C64, f64)>,
    pub weights: Vec<f64>,
    /// Word length of the element that produced each point.
    pub levels: Vec<usize>,
}

impl OrbitMeasure {
    /// Largest distance from an orbit point to the hemisphere over the given circle.
    pub fn max_distance_to_hemisphere(&self, center: C64, radius: f64) -> f64 {
        self.points
            .iter()
            .map(|(z, t)| (((z - center).norm_sqr() + t * t).sqrt() - radius).abs())
            .fold(0.0, f64::max)
    }

    /// Total weight carried by elements of word length at most `len`.
    pub fn mass_up_to_level(&self, len: usize) -> f64 {
        self.weights.iter().zip(&self.levels).filter(|(_, l)| **l <= len).map(|(w, _)| w).sum()
    }
}

fn act_on_basepoint(m: &MoebiusMap) -> (C64, f64) {
    let den = m.c.norm_sqr() + m.d.norm_sqr();
    ((m.b * m.d.conj() + m.a * m.c.conj()) / den, 1.0 / den)
}

pub fn ps_orbit_measure_approx(rho: &Representation, s: f64, max_len: usize) -> Result<OrbitMeasure> {
    let mut points = Vec::new();
    let mut logw = Vec::new();
    let mut levels = Vec::new();
    sweep(rho, max_len, |m, level| {
        points.push(act_on_basepoint(m));
        logw.push(-s * m.h3_displacement());
        levels.push(level);
    });
    if points.len() < 2 {
        return Err(Error::InsufficientData("orbit has a single point".into()));
    }
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(OrbitMeasure { points, weights: raw.iter().map(|w| w / total).collect(), levels })
}
