//! Expanding Markov maps coding the limit set, and their symbolic dynamics.
//!
//! A [`MarkovCoding`] is a finite family of cells covering the limit set, a
//! group element per cell (the branch of the map `f` there) and the 0/1
//! transition matrix. Cells of circle and line codings are parametrized
//! through a [`Chart`], so a globally conjugated coding keeps its cell
//! parameters and only changes the chart and the branch maps.

mod bowen;
mod cylinders;
mod orbits;
mod schottky;
mod transitions;
mod validate;

pub use bowen::build_bowen_series_partition;
pub use cylinders::{admissible_words, coding_project_pi, is_bad_point, refine_cylinders, Cylinder, CylinderSet};
pub use orbits::{orbit_group_element, periodic_orbits, OrbitElement, SymbolicOrbit};
pub use schottky::schottky_coding;
pub use transitions::TransitionMatrix;
pub use validate::{validate_coding, Lemma7Report, ValidationReport};

use std::f64::consts::TAU;

use serde::Serialize;

use crate::circle::norm_angle;
use crate::error::{Error, Result};
use crate::groups::{Circle, Group, Representation, Word};
use crate::mobius::{MoebiusMap, RiemannPoint, C64};

/// Tolerance for matching image endpoints against cell endpoints.
pub const MARKOV_TOL: f64 = 1e-9;

/// Coordinates on the curve carrying the limit set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    /// `t -> K(e^{it})`.
    Circle(MoebiusMap),
    /// `x -> K(x)`.
    Line(MoebiusMap),
}

impl Chart {
    pub fn point(&self, t: f64) -> C64 {
        match self {
            Chart::Circle(k) => k.apply_c(C64::from_polar(1.0, t)),
            Chart::Line(k) => k.apply_c(C64::new(t, 0.0)),
        }
    }

    /// Parameter of `z`; circle parameters are reduced to `[0, 2pi)`.
    pub fn param(&self, z: C64) -> f64 {
        match self {
            Chart::Circle(k) => norm_angle(k.inverse().apply_c(z).arg()),
            Chart::Line(k) => k.inverse().apply_c(z).re,
        }
    }

    pub fn param_of(&self, z: RiemannPoint) -> Option<f64> {
        let k = self.map();
        match k.inverse().apply(z) {
            RiemannPoint::Infinity => None,
            RiemannPoint::Finite(w) => Some(match self {
                Chart::Circle(_) => norm_angle(w.arg()),
                Chart::Line(_) => w.re,
            }),
        }
    }

    pub fn map(&self) -> MoebiusMap {
        match self {
            Chart::Circle(k) | Chart::Line(k) => *k,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Chart::Circle(_))
    }

    /// `|d point / dt|`.
    pub fn speed(&self, t: f64) -> f64 {
        match self {
            Chart::Circle(k) => k.derivative_norm(C64::from_polar(1.0, t)),
            Chart::Line(k) => k.derivative_norm(C64::new(t, 0.0)),
        }
    }

    /// Precomposes the chart with a global conjugation `K`.
    pub fn conjugated(&self, k: &MoebiusMap) -> Chart {
        match self {
            Chart::Circle(m) => Chart::Circle(k.compose(m)),
            Chart::Line(m) => Chart::Line(k.compose(m)),
        }
    }

    /// Distance between parameters, modulo `2pi` for circle charts.
    pub fn param_distance(&self, a: f64, b: f64) -> f64 {
        match self {
            Chart::Circle(_) => {
                let d = (a - b).rem_euclid(TAU);
                d.min(TAU - d)
            }
            Chart::Line(_) => (a - b).abs(),
        }
    }
}

/// Geometry of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum CellShape {
    /// Chart parameters `[lo, hi)`; for circle charts `hi` may exceed `2pi`.
    Interval { lo: f64, hi: f64 },
    /// A closed round disk in the plane.
    Disk { center: [f64; 2], radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub shape: CellShape,
    pub branch: usize,
}

/// A branch of `f`: the group element applied on cells assigned to it.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub word: Word,
    pub map: MoebiusMap,
    pub inverse: MoebiusMap,
}

impl Branch {
    pub fn new(rho: &Representation, word: Word) -> Result<Branch> {
        let map = rho.evaluate_word(&word)?;
        Ok(Branch { word, inverse: map.inverse(), map })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodingKind {
    BowenSeries,
    Schottky,
}

/// Which fixed point of a witness element a partition endpoint is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointLabel {
    Expanding,
    Attracting,
}

/// A partition endpoint recorded as a fixed point of a group element, so the
/// endpoint can be located again after the representation moves.
#[derive(Clone, Debug, PartialEq)]
pub struct EndpointWitness {
    pub word: Word,
    pub label: FixedPointLabel,
}

impl EndpointWitness {
    pub fn locate(&self, rho: &Representation) -> Result<RiemannPoint> {
        let (e, a) = rho.evaluate_word(&self.word)?.fixed_points()?;
        Ok(match self.label {
            FixedPointLabel::Expanding => e,
            FixedPointLabel::Attracting => a,
        })
    }
}

/// An expanding Markov map for a group, as cells, branches and transitions.
#[derive(Clone, Debug)]
pub struct MarkovCoding {
    pub kind: CodingKind,
    pub chart: Option<Chart>,
    pub cells: Vec<Cell>,
    pub branches: Vec<Branch>,
    pub transitions: TransitionMatrix,
    pub rho: Representation,
    /// Interval codings: the endpoint set `R`. Circle charts list cell starts
    /// increasing and unwrapped (spanning less than `2pi`); line charts list
    /// every segment end in order.
    pub endpoints: Vec<f64>,
    pub witnesses: Vec<EndpointWitness>,
    /// Cells whose branch fell back from the smallest admissible index.
    pub fallbacks: Vec<usize>,
    pub markov_residual: f64,
    /// Words of the translates of the fundamental domain touching it.
    pub domains: Vec<Word>,
    pub polygon: Vec<C64>,
}

impl MarkovCoding {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn branch(&self, k: usize) -> &Branch {
        &self.branches[self.cells[k].branch]
    }

    #[inline]
    pub fn map(&self, k: usize) -> &MoebiusMap {
        &self.branches[self.cells[k].branch].map
    }

    /// `phi(z) = -log |f'(z)|` for `z` in cell `k`.
    #[inline]
    pub fn phi(&self, k: usize, z: C64) -> f64 {
        -self.map(k).derivative_norm(z).ln()
    }

    /// `-log |f'|` measured in chart parameters; differs from [`Self::phi`] by a
    /// coboundary and equals it for charts with `K = 1`.
    pub fn chart_phi(&self, k: usize, z: C64) -> f64 {
        match self.chart {
            Some(chart) => {
                let w = self.map(k).apply_c(z);
                self.phi(k, z) - chart.speed(chart.param(z)).ln() + chart.speed(chart.param(w)).ln()
            }
            None => self.phi(k, z),
        }
    }

    /// Parameter range of an interval cell.
    pub fn param_range(&self, k: usize) -> Option<(f64, f64)> {
        match self.cells[k].shape {
            CellShape::Interval { lo, hi } => Some((lo, hi)),
            CellShape::Disk { .. } => None,
        }
    }

    /// Parameter of `z` unwrapped into the range of interval cell `k`.
    pub fn local_param(&self, k: usize, z: C64) -> f64 {
        let chart = self.chart.expect("interval cells need a chart");
        let (lo, _) = self.param_range(k).expect("interval cell");
        let t = chart.param(z);
        if chart.is_periodic() {
            let o = (t - lo).rem_euclid(TAU);
            // Points just below `lo` wrap to the far end; keep them next to `lo`.
            if o > TAU - 1e-6 {
                lo + o - TAU
            } else {
                lo + o
            }
        } else {
            t
        }
    }

    /// A point of the limit set inside cell `k`.
    pub fn anchor(&self, k: usize) -> C64 {
        match (self.cells[k].shape, self.chart) {
            (CellShape::Interval { lo, hi }, Some(chart)) => chart.point(0.5 * (lo + hi)),
            _ => match self.map(k).fixed_points() {
                Ok((RiemannPoint::Finite(z), _)) => z,
                _ => self.disk_center(k),
            },
        }
    }

    fn disk_center(&self, k: usize) -> C64 {
        match self.cells[k].shape {
            CellShape::Disk { center, .. } => C64::new(center[0], center[1]),
            CellShape::Interval { lo, hi } => {
                self.chart.map(|c| c.point(0.5 * (lo + hi))).unwrap_or_default()
            }
        }
    }

    /// The cell containing parameter `t`, half-open on the right.
    pub fn locate_param(&self, t: f64) -> Option<usize> {
        let chart = self.chart?;
        if chart.is_periodic() {
            let r = &self.endpoints;
            let u = r[0] + (t - r[0]).rem_euclid(TAU);
            Some(r.partition_point(|x| *x <= u).max(1) - 1)
        } else {
            self.cells.iter().position(|c| match c.shape {
                CellShape::Interval { lo, hi } => t >= lo && t < hi,
                CellShape::Disk { .. } => false,
            })
        }
    }

    /// The cell containing the point `z` of the limit set.
    pub fn locate(&self, z: C64) -> Option<usize> {
        match self.chart {
            Some(chart) => self.locate_param(chart.param(z)),
            None => self.cells.iter().position(|c| match c.shape {
                CellShape::Disk { center, radius } => (z - C64::new(center[0], center[1])).norm() <= radius,
                CellShape::Interval { .. } => false,
            }),
        }
    }

    /// The coding of `K rho K^-1`: same cells in the conjugated chart.
    pub fn conjugated(&self, k: &MoebiusMap) -> Result<MarkovCoding> {
        let rho = self.rho.conjugated(k);
        let mut out = self.clone();
        out.branches = self.branches.iter().map(|b| Branch::new(&rho, b.word.clone())).collect::<Result<_>>()?;
        out.chart = self.chart.map(|c| c.conjugated(k));
        for cell in &mut out.cells {
            if let CellShape::Disk { center, radius } = cell.shape {
                let img = image_circle(k, Circle::new(C64::new(center[0], center[1]), radius))?;
                cell.shape = CellShape::Disk { center: [img.center.re, img.center.im], radius: img.radius };
            }
        }
        out.polygon = self.polygon.iter().map(|v| k.apply_c(*v)).collect();
        out.rho = rho;
        Ok(out)
    }

    /// Interval coding of another representation in the same conjugacy
    /// class of markings, with endpoints relocated through their witnesses.
    ///
    /// Valid while the new representation stays fuchsian for the chart and the
    /// cyclic order of the endpoints is preserved.
    pub fn transported(&self, rho: &Representation) -> Result<MarkovCoding> {
        let chart = self.chart.ok_or_else(|| Error::DegenerateConfiguration("coding has no chart".into()))?;
        if self.witnesses.len() != self.endpoints.len() {
            return Err(Error::DegenerateConfiguration("coding has no endpoint witnesses".into()));
        }
        let mut params = Vec::with_capacity(self.endpoints.len());
        for w in &self.witnesses {
            let z = w.locate(rho)?;
            let t = chart
                .param_of(z)
                .ok_or_else(|| Error::DegenerateConfiguration("endpoint at the chart pole".into()))?;
            params.push(t);
        }
        let out_endpoints = if chart.is_periodic() {
            // Cyclic order must survive: unwrap from the first endpoint.
            let mut lo = vec![params[0]];
            for i in 1..params.len() {
                let prev = lo[i - 1];
                lo.push(prev + (params[i] - prev).rem_euclid(TAU));
            }
            let span = lo[lo.len() - 1] - lo[0];
            if lo.windows(2).any(|w| w[1] <= w[0]) || span >= TAU {
                return Err(Error::DegenerateConfiguration("endpoint order changed under transport".into()));
            }
            lo
        } else {
            let mut v = params.clone();
            if v.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::DegenerateConfiguration("endpoint order changed under transport".into()));
            }
            v.sort_by(f64::total_cmp);
            v
        };
        let mut out = self.clone();
        if chart.is_periodic() {
            let n = out_endpoints.len();
            for (k, cell) in out.cells.iter_mut().enumerate() {
                let hi = if k + 1 < n { out_endpoints[k + 1] } else { out_endpoints[0] + TAU };
                cell.shape = CellShape::Interval { lo: out_endpoints[k], hi };
            }
        } else {
            return Err(Error::DegenerateConfiguration("line codings are not transported".into()));
        }
        out.endpoints = out_endpoints;
        out.branches = self.branches.iter().map(|b| Branch::new(rho, b.word.clone())).collect::<Result<_>>()?;
        out.rho = rho.clone();
        out.markov_residual = markov_residual(&out)?;
        if out.markov_residual > 1e3 * MARKOV_TOL {
            return Err(Error::MarkovViolation { cell: 0, offset: out.markov_residual });
        }
        Ok(out)
    }

    /// JSON dump: cells, branch indices and transition rows.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            kind: CodingKind,
            cells: Vec<CellDump>,
            transitions: &'a [Vec<u32>],
            aperiodicity_witness: Option<usize>,
        }
        #[derive(Serialize)]
        struct CellDump {
            #[serde(flatten)]
            shape: CellShape,
            branch: usize,
            word: String,
        }
        let dump = Dump {
            kind: self.kind,
            cells: self
                .cells
                .iter()
                .map(|c| CellDump {
                    shape: c.shape,
                    branch: c.branch,
                    word: self.branches[c.branch].word.display(self.rho.names()).to_string(),
                })
                .collect(),
            transitions: self.transitions.rows(),
            aperiodicity_witness: self.transitions.aperiodicity_witness,
        };
        serde_json::to_string_pretty(&dump).expect("coding dumps serialize")
    }
}

/// Image of a round circle under a map whose pole is off the circle.
pub fn image_circle(k: &MoebiusMap, c: Circle) -> Result<Circle> {
    let pts: Vec<C64> = (0..3)
        .map(|i| k.apply_c(c.center + C64::from_polar(c.radius, i as f64 * TAU / 3.0)))
        .collect();
    let (a, b, z) = (pts[0], pts[1], pts[2]);
    let d = 2.0 * (a.re * (b.im - z.im) + b.re * (z.im - a.im) + z.re * (a.im - b.im));
    if d.abs() < 1e-14 || !d.is_finite() {
        return Err(Error::DegenerateConfiguration("circle maps through infinity".into()));
    }
    let (na, nb, nz) = (a.norm_sqr(), b.norm_sqr(), z.norm_sqr());
    let center = C64::new(
        (na * (b.im - z.im) + nb * (z.im - a.im) + nz * (a.im - b.im)) / d,
        (na * (z.re - b.re) + nb * (a.re - z.re) + nz * (b.re - a.re)) / d,
    );
    Ok(Circle::new(center, (a - center).norm()))
}

/// Largest distance from an image endpoint of a cell to the nearest cell endpoint.
pub fn markov_residual(coding: &MarkovCoding) -> Result<f64> {
    match coding.chart {
        None => Ok(disk_markov_residual(coding)),
        Some(chart) => {
            let mut worst: f64 = 0.0;
            for k in 0..coding.n_cells() {
                let (lo, hi) = coding.param_range(k).expect("interval cell");
                for t in [lo, hi] {
                    let w = coding.map(k).apply_c(chart.point(t));
                    let (_, miss) = nearest_endpoint(&coding.endpoints, chart, chart.param(w));
                    worst = worst.max(miss);
                }
            }
            Ok(worst)
        }
    }
}

fn disk_markov_residual(coding: &MarkovCoding) -> f64 {
    // Each branch carries the boundary of its disk onto the boundary of the partner disk.
    let mut worst: f64 = 0.0;
    for k in 0..coding.n_cells() {
        if let CellShape::Disk { center, radius } = coding.cells[k].shape {
            let c = C64::new(center[0], center[1]);
            let succ = coding.transitions.successors(k);
            let missing: Vec<usize> = (0..coding.n_cells()).filter(|j| !succ.contains(&(*j as u32))).collect();
            let target = missing.first().and_then(|&j| match coding.cells[j].shape {
                CellShape::Disk { center, radius } => Some(Circle::new(C64::new(center[0], center[1]), radius)),
                _ => None,
            });
            if let Some(t) = target {
                for i in 0..16 {
                    let z = c + C64::from_polar(radius, i as f64 * TAU / 16.0);
                    worst = worst.max(t.distance_to(coding.map(k).apply_c(z)));
                }
            }
        }
    }
    worst
}

/// Index of the endpoint nearest to `t` and the distance to it.
pub fn nearest_endpoint(endpoints: &[f64], chart: Chart, t: f64) -> (usize, f64) {
    let n = endpoints.len();
    let u = if chart.is_periodic() { endpoints[0] + (t - endpoints[0]).rem_euclid(TAU) } else { t };
    let i = endpoints.partition_point(|x| *x < u);
    let cands = [i % n, (i + n - 1) % n, (i + 1) % n];
    cands
        .iter()
        .map(|&j| (j, chart.param_distance(endpoints[j], u)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty endpoint set")
}

/// The natural coding of a group: Bowen-Series for surface groups, the
/// circle-pairing shift for Schottky groups.
pub fn coding_for(group: &Group) -> Result<MarkovCoding> {
    match group {
        Group::Surface { presentation, rho } => build_bowen_series_partition(presentation, rho),
        Group::Schottky(s) => schottky_coding(s),
    }
}
