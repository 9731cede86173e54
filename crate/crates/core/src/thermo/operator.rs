use serde::{Deserialize, Serialize};

use crate::coding::{refine_cylinders, admissible_words, CellShape, MarkovCoding, TransitionMatrix};
use crate::error::{Error, Result};
use crate::mobius::C64;
use crate::numerics::LinearOperator;

/// How functions on the limit set are represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase", deny_unknown_fields)]
pub enum Discretization {
    /// Functions constant on each cylinder of the given length.
    Cylinders { depth: usize },
    /// Polynomial interpolation at `nodes` Chebyshev points per cell.
    Collocation { nodes: usize },
}

impl Discretization {
    pub fn resolution(&self) -> usize {
        match *self {
            Discretization::Cylinders { depth } => depth,
            Discretization::Collocation { nodes } => nodes,
        }
    }

    pub fn refined(&self) -> Discretization {
        match *self {
            Discretization::Cylinders { depth } => Discretization::Cylinders { depth: depth + 1 },
            Discretization::Collocation { nodes } => Discretization::Collocation { nodes: 2 * nodes },
        }
    }
}

/// A point at which potentials are sampled: a cell word and, for geometric
/// codings, a point of the limit set in the first cell of the word.
#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    pub word: Vec<u32>,
    pub point: Option<C64>,
}

impl Site {
    pub fn cell(&self) -> usize {
        self.word[0] as usize
    }
}

/// Square sparse matrix in compressed row form.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().zip(&self.vals[span]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim];
        for (c, v) in self.cols.iter().zip(&self.vals) {
            s[*c as usize] += v;
        }
        s
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *yr = self.cols[span.clone()].iter().zip(&self.vals[span]).map(|(&c, &v)| v * x[c as usize]).sum();
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, xr) in x.iter().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            for (&c, &v) in self.cols[span.clone()].iter().zip(&self.vals[span]) {
                y[c as usize] += v * xr;
            }
        }
    }
}

/// The Ruelle operator `(L_f g)(x) = sum_{f(y) = x} e^{f(y)} g(y)` of a coding,
/// discretized independently of the potential.
///
/// Every matrix entry is `basis * e^{f(site)}` for one sampling site; a
/// potential is a vector of values on [`Self::sites`].
#[derive(Clone, Debug)]
pub struct TransferOperator {
    pub scheme: Discretization,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    basis: Vec<f64>,
    entry_site: Vec<u32>,
    sites: Vec<Site>,
    /// `-log |f'|` at each site.
    phi: Vec<f64>,
}

impl TransferOperator {
    pub fn new(coding: &MarkovCoding, scheme: Discretization) -> Result<TransferOperator> {
        match scheme {
            Discretization::Cylinders { depth } => Self::cylinders(coding, depth),
            Discretization::Collocation { nodes } => Self::collocation(coding, nodes),
        }
    }

    /// Locally constant functions on depth-`depth` cylinders, sampled at one
    /// limit point per cylinder.
    pub fn cylinders(coding: &MarkovCoding, depth: usize) -> Result<TransferOperator> {
        let set = refine_cylinders(coding, depth)?;
        let sites: Vec<Site> =
            set.cylinders.iter().map(|c| Site { word: c.word.clone(), point: Some(c.sample) }).collect();
        let phi = sites.iter().map(|s| coding.chart_phi(s.cell(), s.point.expect("geometric site"))).collect();
        let words: Vec<Vec<u32>> = set.cylinders.into_iter().map(|c| c.word).collect();
        Ok(Self::from_words(&coding.transitions, words, sites, phi, Discretization::Cylinders { depth }))
    }

    /// Subshift operator on words of length `depth` with a potential given on words.
    pub fn shift(a: &TransitionMatrix, depth: usize, potential: impl Fn(&[u32]) -> f64) -> Result<TransferOperator> {
        if depth == 0 {
            return Err(Error::DegenerateConfiguration("cylinder depth must be at least 1".into()));
        }
        let words = admissible_words(a, depth);
        let sites: Vec<Site> = words.iter().map(|w| Site { word: w.clone(), point: None }).collect();
        let phi = words.iter().map(|w| potential(w)).collect();
        Ok(Self::from_words(a, words, sites, phi, Discretization::Cylinders { depth }))
    }

    /// Entry `(w, v)` whenever the shift carries the cylinder `v` into `w`.
    fn from_words(
        a: &TransitionMatrix,
        words: Vec<Vec<u32>>,
        sites: Vec<Site>,
        phi: Vec<f64>,
        scheme: Discretization,
    ) -> TransferOperator {
        let dim = words.len();
        let depth = words[0].len();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (v, word) in words.iter().enumerate() {
            if depth == 1 {
                pairs.extend(a.successors(word[0] as usize).iter().map(|&w| (w, v as u32)));
            } else {
                let key = &word[1..];
                let lo = words.partition_point(|w| w[..depth - 1] < *key);
                let hi = words.partition_point(|w| w[..depth - 1] <= *key);
                pairs.extend((lo..hi).map(|w| (w as u32, v as u32)));
            }
        }
        pairs.sort_unstable();
        let mut row_ptr = vec![0usize; dim + 1];
        for (w, _) in &pairs {
            row_ptr[*w as usize + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let cols: Vec<u32> = pairs.iter().map(|p| p.1).collect();
        TransferOperator {
            scheme,
            dim,
            row_ptr,
            basis: vec![1.0; cols.len()],
            entry_site: cols.clone(),
            cols,
            sites,
            phi,
        }
    }

    /// Values at `nodes` Chebyshev points per cell, interpolated by a
    /// polynomial on each cell.
    pub fn collocation(coding: &MarkovCoding, nodes: usize) -> Result<TransferOperator> {
        let chart = coding
            .chart
            .ok_or_else(|| Error::DegenerateConfiguration("collocation needs an interval coding".into()))?;
        if nodes == 0 {
            return Err(Error::DegenerateConfiguration("collocation needs at least one node".into()));
        }
        let n = coding.n_cells();
        let ranges: Vec<(f64, f64)> = (0..n)
            .map(|k| match coding.cells[k].shape {
                CellShape::Interval { lo, hi } => Ok((lo, hi)),
                CellShape::Disk { .. } => Err(Error::DegenerateConfiguration("collocation needs interval cells".into())),
            })
            .collect::<Result<_>>()?;
        let (x, w) = chebyshev(nodes);
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for j in 0..n {
            for &i in coding.transitions.successors(j) {
                preds[i as usize].push(j as u32);
            }
        }
        let dim = n * nodes;
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let (mut cols, mut basis, mut entry_site) = (Vec::new(), Vec::new(), Vec::new());
        let mut sites = Vec::new();
        let mut phi = Vec::new();
        let mut ell = vec![0.0; nodes];
        for (i, &(lo, hi)) in ranges.iter().enumerate() {
            for &xm in &x {
                let target = chart.point(0.5 * (lo + hi) + 0.5 * (hi - lo) * xm);
                for &j in &preds[i] {
                    let j = j as usize;
                    let y = coding.branch(j).inverse.apply_c(target);
                    let (a, b) = ranges[j];
                    let u = (2.0 * coding.local_param(j, y) - a - b) / (b - a);
                    lagrange(&x, &w, u, &mut ell);
                    let site = sites.len() as u32;
                    sites.push(Site { word: vec![j as u32], point: Some(y) });
                    phi.push(coding.chart_phi(j, y));
                    for (m, l) in ell.iter().enumerate() {
                        cols.push((j * nodes + m) as u32);
                        basis.push(*l);
                        entry_site.push(site);
                    }
                }
                row_ptr.push(cols.len());
            }
        }
        Ok(TransferOperator {
            scheme: Discretization::Collocation { nodes },
            dim,
            row_ptr,
            cols,
            basis,
            entry_site,
            sites,
            phi,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// `-log |f'|` on the sites.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// `s * phi`.
    pub fn scaled_phi(&self, s: f64) -> Vec<f64> {
        self.phi.iter().map(|p| s * p).collect()
    }

    /// Evaluates an observable `g(cell, point)` on geometric sites.
    pub fn sample(&self, g: impl Fn(usize, C64) -> f64) -> Result<Vec<f64>> {
        self.sites
            .iter()
            .map(|s| {
                s.point
                    .map(|z| g(s.cell(), z))
                    .ok_or_else(|| Error::DegenerateConfiguration("symbolic sites carry no points".into()))
            })
            .collect()
    }

    /// Evaluates an observable on the site words.
    pub fn sample_words(&self, g: impl Fn(&[u32]) -> f64) -> Vec<f64> {
        self.sites.iter().map(|s| g(&s.word)).collect()
    }

    /// The matrix of `L_f` for the potential `f` given on the sites.
    pub fn matrix(&self, potential: &[f64]) -> SparseMatrix {
        assert_eq!(potential.len(), self.sites.len(), "potential must be sampled on the sites");
        let weights: Vec<f64> = potential.iter().map(|f| f.exp()).collect();
        let vals = self.basis.iter().zip(&self.entry_site).map(|(b, s)| b * weights[*s as usize]).collect();
        SparseMatrix { dim: self.dim, row_ptr: self.row_ptr.clone(), cols: self.cols.clone(), vals }
    }

    /// Cylinder schemes have one site per column, in column order.
    pub fn is_cylinder_scheme(&self) -> bool {
        matches!(self.scheme, Discretization::Cylinders { .. })
    }
}

/// Chebyshev points of the first kind on `[-1, 1]` and their barycentric weights.
pub fn chebyshev(n: usize) -> (Vec<f64>, Vec<f64>) {
    let theta = |m: usize| (2 * m + 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
    let x = (0..n).map(|m| theta(m).cos()).collect();
    let w = (0..n).map(|m| if m % 2 == 0 { theta(m).sin() } else { -theta(m).sin() }).collect();
    (x, w)
}

/// Lagrange basis values at `u` by the barycentric formula.
pub fn lagrange(x: &[f64], w: &[f64], u: f64, out: &mut [f64]) {
    if let Some(m) = x.iter().position(|xm| *xm == u) {
        out.iter_mut().for_each(|o| *o = 0.0);
        out[m] = 1.0;
        return;
    }
    let mut total = 0.0;
    for ((o, xm), wm) in out.iter_mut().zip(x).zip(w) {
        *o = wm / (u - xm);
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_reproduces_polynomials() {
        let (x, w) = chebyshev(6);
        let mut ell = vec![0.0; 6];
        let p = |t: f64| 3.0 * t.powi(5) - t * t + 0.5;
        for u in [-1.0, -0.3, 0.2, 0.9, 1.0] {
            lagrange(&x, &w, u, &mut ell);
            let v: f64 = ell.iter().zip(&x).map(|(l, xm)| l * p(*xm)).sum();
            assert!((v - p(u)).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_potential_counts_transitions() {
        let a = TransitionMatrix::full_shift(3).unwrap();
        for depth in 1..4 {
            let op = TransferOperator::shift(&a, depth, |_| 0.0).unwrap();
            let m = op.matrix(&vec![0.0; op.sites().len()]);
            assert!(m.column_sums().iter().all(|s| (*s - 3.0).abs() < 1e-15));
        }
    }

    #[test]
    fn transpose_is_adjoint() {
        let a = TransitionMatrix::full_shift_without_backtracking(4, |i| i ^ 1).unwrap();
        let op = TransferOperator::shift(&a, 2, |w| 0.1 * w[0] as f64 - 0.05 * w[1] as f64).unwrap();
        let m = op.matrix(op.phi());
        let d = m.to_dense();
        let x: Vec<f64> = (0..m.dim()).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut y = vec![0.0; m.dim()];
        m.apply_transpose(&x, &mut y);
        let dense = d.transpose() * nalgebra::DVector::from_vec(x);
        assert!(y.iter().zip(dense.iter()).all(|(a, b)| (a - b).abs() < 1e-14));
    }
}
