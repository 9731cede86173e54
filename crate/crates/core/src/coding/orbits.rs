use serde::Serialize;

use crate::error::{Error, Result};
use crate::mobius::{MoebiusMap, RiemannPoint, C64};

use super::{MarkovCoding, TransitionMatrix};

/// A periodic cell sequence, stored as its lexicographically least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolicOrbit {
    pub cells: Vec<u32>,
    pub primitive_period: usize,
}

impl SymbolicOrbit {
    /// Canonical form of an admissible cycle.
    pub fn new(cells: &[u32]) -> SymbolicOrbit {
        let n = cells.len();
        let best = (0..n)
            .min_by(|&a, &b| (0..n).map(|i| cells[(a + i) % n]).cmp((0..n).map(|i| cells[(b + i) % n])))
            .unwrap_or(0);
        let cells: Vec<u32> = (0..n).map(|i| cells[(best + i) % n]).collect();
        let primitive_period = primitive_period(&cells);
        SymbolicOrbit { cells, primitive_period }
    }

    pub fn period(&self) -> usize {
        self.cells.len()
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_period == self.cells.len()
    }

    /// Number of distinct periodic points of the shift on this cycle.
    pub fn multiplicity(&self) -> usize {
        self.primitive_period
    }

    pub fn rotated(&self, by: usize) -> Vec<u32> {
        let n = self.cells.len();
        (0..n).map(|i| self.cells[(by + i) % n]).collect()
    }
}

fn primitive_period(cells: &[u32]) -> usize {
    let n = cells.len();
    (1..=n).find(|&p| n % p == 0 && (0..n).all(|i| cells[i] == cells[(i + p) % n])).unwrap_or(n)
}

fn is_least_rotation(c: &[u32]) -> bool {
    let n = c.len();
    (1..n).all(|r| {
        for i in 0..n {
            let (a, b) = (c[i], c[(r + i) % n]);
            if a != b {
                return a < b;
            }
        }
        true
    })
}

/// All admissible cycles of length `n`, one per rotation class.
///
/// Cycles are enumerated from their smallest symbol, so the search visits
/// only words over symbols at least the first one.
pub fn periodic_orbits(a: &TransitionMatrix, n: usize, primitive_only: bool) -> Vec<SymbolicOrbit> {
    let d = a.dim();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut closes = vec![false; d];
    let mut path: Vec<u32> = Vec::with_capacity(n);
    for k0 in 0..d {
        closes.iter_mut().for_each(|c| *c = false);
        for (i, row) in a.rows().iter().enumerate() {
            if row.binary_search(&(k0 as u32)).is_ok() {
                closes[i] = true;
            }
        }
        path.clear();
        path.push(k0 as u32);
        extend(a, n, k0 as u32, &closes, &mut path, &mut |c: &[u32]| {
            if is_least_rotation(c) {
                let p = primitive_period(c);
                if !primitive_only || p == n {
                    out.push(SymbolicOrbit { cells: c.to_vec(), primitive_period: p });
                }
            }
        });
    }
    out
}

fn extend(
    a: &TransitionMatrix,
    n: usize,
    k0: u32,
    closes: &[bool],
    path: &mut Vec<u32>,
    emit: &mut impl FnMut(&[u32]),
) {
    let last = *path.last().expect("path starts nonempty") as usize;
    if path.len() == n {
        if closes[last] {
            emit(path);
        }
        return;
    }
    let succ = a.successors(last);
    let from = succ.partition_point(|&j| j < k0);
    for &j in &succ[from..] {
        path.push(j);
        extend(a, n, k0, closes, path, emit);
        path.pop();
    }
}

/// The group element `gamma_z = T_{k_{n-1}} ... T_{k_0}` of a cycle and its
/// expanding fixed point.
#[derive(Clone, Debug)]
pub struct OrbitElement {
    pub gamma: MoebiusMap,
    pub fixed_point: C64,
    /// Distance of the fixed point from the closure of its first cell, in chart parameter.
    pub cell_residual: f64,
    /// `|f^n(z) - z|` computed by iterating the branches.
    pub return_residual: f64,
    /// Birkhoff sum `S_n phi` along the actual orbit of the fixed point.
    pub birkhoff_phi: f64,
    /// Smallest chart distance from a point of the orbit to a cell endpoint.
    pub endpoint_distance: f64,
}

/// Group element and fixed point of a periodic cell sequence.
pub fn orbit_group_element(coding: &MarkovCoding, orbit: &[u32]) -> Result<OrbitElement> {
    let mut gamma = MoebiusMap::IDENTITY;
    for &k in orbit {
        gamma = *coding.map(k as usize) * gamma;
    }
    // Factors have unit determinant; renormalizing a long product would
    // divide by a determinant that has lost every significant digit.
    let cycle = || orbit.iter().map(|&k| k as usize).collect::<Vec<_>>();
    let z = match gamma.fixed_points() {
        Ok((RiemannPoint::Finite(z), _)) => z,
        _ => return Err(Error::NonLoxodromicCycle(cycle())),
    };
    // Each orbit point is the fixed point of its own rotation of the cycle, so
    // rounding is not amplified by iterating the expanding branches.
    let n = orbit.len();
    let mut birkhoff = 0.0;
    let mut endpoint_distance = f64::INFINITY;
    let mut w = z;
    for i in 0..n {
        if i > 0 {
            let mut g = MoebiusMap::IDENTITY;
            for j in 0..n {
                g = *coding.map(orbit[(i + j) % n] as usize) * g;
            }
            w = match g.fixed_points() {
                Ok((RiemannPoint::Finite(p), _)) => p,
                _ => return Err(Error::NonLoxodromicCycle(cycle())),
            };
        }
        let k = orbit[i] as usize;
        if let Some(chart) = coding.chart {
            let (_, dist) = super::nearest_endpoint(&coding.endpoints, chart, chart.param(w));
            endpoint_distance = endpoint_distance.min(dist);
        }
        birkhoff += coding.phi(k, w);
    }
    let w = coding.map(orbit[n - 1] as usize).apply_c(w);
    let cell_residual = cell_distance(coding, orbit[0] as usize, z);
    Ok(OrbitElement {
        gamma,
        fixed_point: z,
        cell_residual,
        return_residual: (w - z).norm(),
        birkhoff_phi: birkhoff,
        endpoint_distance,
    })
}

fn cell_distance(coding: &MarkovCoding, k: usize, z: C64) -> f64 {
    match (coding.chart, coding.param_range(k)) {
        (Some(chart), Some((lo, hi))) => {
            let t = coding.local_param(k, z);
            if t >= lo && t <= hi {
                0.0
            } else {
                chart.param_distance(t, lo).min(chart.param_distance(t, hi))
            }
        }
        _ => match coding.cells[k].shape {
            super::CellShape::Disk { center, radius } => {
                ((z - C64::new(center[0], center[1])).norm() - radius).max(0.0)
            }
            super::CellShape::Interval { .. } => f64::INFINITY,
        },
    }
}
