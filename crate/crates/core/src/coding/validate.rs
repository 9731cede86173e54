use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circle::Geodesic;
use crate::error::Result;
use crate::groups::{Letter, Word};
use crate::mobius::{MoebiusMap, RiemannPoint, C64};

use super::{CellShape, CodingKind, MarkovCoding, MARKOV_TOL};

/// Sample points per cell for the expansion estimate.
pub const EXPANSION_NODES: usize = 32;
const LEMMA7_MAX_WORD: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct Lemma7Report {
    pub samples: usize,
    pub checks: usize,
    pub passes: usize,
    pub pass_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub cells: usize,
    pub markov_residual: f64,
    pub markov_ok: bool,
    /// `min |(f^n)'|` over sample points, for `n = 1..=depth`.
    pub expansion: Vec<f64>,
    /// First iterate with minimal derivative above one, and that minimum.
    pub expansion_constant: Option<(usize, f64)>,
    pub aperiodicity_witness: Option<usize>,
    pub lemma7: Option<Lemma7Report>,
    pub branch_fallbacks: usize,
    pub passed: bool,
}

/// Checks the Markov property, expansion up to `depth` iterates, aperiodicity
/// and, for Bowen–Series codings, the invariance of geodesics abutting the
/// fundamental domain (sampled with `samples` random geodesics).
pub fn validate_coding(coding: &MarkovCoding, depth: usize, samples: usize, seed: u64) -> Result<ValidationReport> {
    let expansion = expansion_profile(coding, depth);
    let expansion_constant = expansion.iter().enumerate().find(|(_, m)| **m > 1.0).map(|(i, m)| (i + 1, *m));
    let lemma7 = match coding.kind {
        CodingKind::BowenSeries => Some(lemma7_sampling(coding, samples, seed)?),
        CodingKind::Schottky => None,
    };
    let markov_ok = coding.markov_residual <= MARKOV_TOL;
    let passed = markov_ok
        && expansion_constant.is_some()
        && coding.transitions.aperiodicity_witness.is_some()
        && lemma7.as_ref().map(|l| l.passes == l.checks && l.checks > 0).unwrap_or(true);
    Ok(ValidationReport {
        cells: coding.n_cells(),
        markov_residual: coding.markov_residual,
        markov_ok,
        expansion,
        expansion_constant,
        aperiodicity_witness: coding.transitions.aperiodicity_witness,
        lemma7,
        branch_fallbacks: coding.fallbacks.len(),
        passed,
    })
}

/// Interior sample points of cell `k` (Chebyshev nodes of the parameter range,
/// or limit points for disk cells).
pub fn sample_points(coding: &MarkovCoding, k: usize, count: usize) -> Vec<C64> {
    match (coding.chart, coding.cells[k].shape) {
        (Some(chart), CellShape::Interval { lo, hi }) => (0..count)
            .map(|m| {
                let x = ((2 * m + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
                chart.point(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
            })
            .collect(),
        _ => {
            let succ = coding.transitions.successors(k);
            let inv = coding.branch(k).inverse;
            let mut pts: Vec<C64> = Vec::new();
            'outer: for &j in succ {
                for &l in coding.transitions.successors(j as usize) {
                    let z = inv.apply_c(coding.branch(j as usize).inverse.apply_c(coding.anchor(l as usize)));
                    pts.push(z);
                    if pts.len() == count {
                        break 'outer;
                    }
                }
            }
            pts
        }
    }
}

fn expansion_profile(coding: &MarkovCoding, depth: usize) -> Vec<f64> {
    let mut mins = vec![f64::INFINITY; depth];
    for k in 0..coding.n_cells() {
        for z in sample_points(coding, k, EXPANSION_NODES) {
            let mut w = z;
            let mut cell = k;
            let mut log_d = 0.0;
            for slot in mins.iter_mut() {
                let m = coding.map(cell);
                log_d += m.derivative_norm(w).ln();
                w = m.apply_c(w);
                *slot = slot.min(log_d.exp());
                match coding.locate(w) {
                    Some(c) => cell = c,
                    None => break,
                }
            }
        }
    }
    mins
}

fn random_reduced_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_index(rng.gen_range(0..2 * rank));
        if letters.last().map(|p| *p == l.inverse()).unwrap_or(false) {
            continue;
        }
        letters.push(l);
    }
    Word::new(letters)
}

fn lemma7_sampling(coding: &MarkovCoding, samples: usize, seed: u64) -> Result<Lemma7Report> {
    let rho = &coding.rho;
    let polygons: Vec<Vec<C64>> = coding
        .domains
        .iter()
        .map(|w| {
            let m = rho.evaluate_word(w)?;
            Ok(coding.polygon.iter().map(|v| m.apply_c(*v)).collect())
        })
        .collect::<Result<_>>()?;
    let abuts = |a: C64, b: C64| {
        let g = Geodesic::new(a / a.norm(), b / b.norm());
        polygons.iter().any(|p| g.meets_polygon(p, 1e-12))
    };
    let axes: Vec<(C64, C64)> = rho
        .generators()
        .iter()
        .filter_map(|g| match g.fixed_points() {
            Ok((RiemannPoint::Finite(a), RiemannPoint::Finite(b))) => Some((a, b)),
            _ => None,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut accepted, mut checks, mut passes) = (0, 0, 0);
    let mut attempts = 0;
    while accepted < samples && attempts < 1000 * samples.max(1) {
        attempts += 1;
        let (a0, b0) = axes[rng.gen_range(0..axes.len())];
        let len = rng.gen_range(0..=LEMMA7_MAX_WORD);
        let u: MoebiusMap = rho.evaluate_word(&random_reduced_word(&mut rng, rho.rank(), len))?;
        let (a, b) = (u.apply_c(a0), u.apply_c(b0));
        if !abuts(a, b) {
            continue;
        }
        accepted += 1;
        for (x, y) in [(a, b), (b, a)] {
            let Some(k) = coding.locate(x) else { continue };
            let g = coding.map(k);
            checks += 1;
            if abuts(g.apply_c(x), g.apply_c(y)) {
                passes += 1;
            }
        }
    }
    Ok(Lemma7Report {
        samples: accepted,
        checks,
        passes,
        pass_fraction: if checks == 0 { 0.0 } else { passes as f64 / checks as f64 },
    })
}
