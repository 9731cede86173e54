use crate::error::{Error, Result};
use crate::mobius::{MoebiusMap, C64};

use super::{CellShape, MarkovCoding, TransitionMatrix};

/// The set of points whose first symbols follow a given word.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub word: Vec<u32>,
    /// `T_{k_0}^-1 ... T_{k_{d-2}}^-1`, carrying the last cell onto the cylinder.
    pub inverse_branch: MoebiusMap,
    /// Chart parameters of the cylinder for interval codings; the full
    /// circle for the empty word.
    pub range: Option<(f64, f64)>,
    /// A limit point inside the cylinder.
    pub sample: C64,
}

impl Cylinder {
    pub fn diameter(&self) -> Option<f64> {
        self.range.map(|(a, b)| b - a)
    }
}

/// The cylinder of `prefix[..depth]`.
///
/// An empty prefix gives the whole circle (or line).
pub fn coding_project_pi(coding: &MarkovCoding, prefix: &[usize], depth: usize) -> Result<Cylinder> {
    let word = &prefix[..depth.min(prefix.len())];
    if !coding.transitions.is_admissible(word) {
        return Err(Error::EmptyCylinder(word.to_vec()));
    }
    if word.is_empty() {
        let range = coding.chart.map(|c| {
            if c.is_periodic() {
                (coding.endpoints[0], coding.endpoints[0] + std::f64::consts::TAU)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
        });
        return Ok(Cylinder { word: Vec::new(), inverse_branch: MoebiusMap::IDENTITY, range, sample: coding.anchor(0) });
    }
    let mut h = MoebiusMap::IDENTITY;
    for &k in &word[..word.len() - 1] {
        h = h * coding.branch(k).inverse;
    }
    let h = h.normalized();
    Ok(cylinder_from(coding, word.iter().map(|&k| k as u32).collect(), h))
}

fn cylinder_from(coding: &MarkovCoding, word: Vec<u32>, h: MoebiusMap) -> Cylinder {
    let first = word[0] as usize;
    let last = *word.last().expect("nonempty word") as usize;
    let sample = h.apply_c(coding.anchor(last));
    let range = match (coding.chart, coding.cells[last].shape) {
        (Some(chart), CellShape::Interval { lo, hi }) => {
            let a = coding.local_param(first, h.apply_c(chart.point(lo)));
            let b = coding.local_param(first, h.apply_c(chart.point(hi)));
            Some((a, if b < a { b + std::f64::consts::TAU } else { b }))
        }
        _ => None,
    };
    Cylinder { word, inverse_branch: h, range, sample }
}

/// All admissible words of length `depth`, in lexicographic order.
pub fn admissible_words(a: &TransitionMatrix, depth: usize) -> Vec<Vec<u32>> {
    let mut words: Vec<Vec<u32>> = (0..a.dim() as u32).map(|k| vec![k]).collect();
    for _ in 1..depth {
        words = words
            .iter()
            .flat_map(|w| {
                a.successors(*w.last().expect("nonempty") as usize).iter().map(move |&j| {
                    let mut v = w.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    words
}

/// The depth-`d` refinement of a coding into cylinders.
#[derive(Clone, Debug)]
pub struct CylinderSet {
    pub depth: usize,
    pub cylinders: Vec<Cylinder>,
}

impl CylinderSet {
    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    /// Cylinders `w` with `w[..d-1] == v[1..]`, as an index range (words are sorted).
    pub fn successors(&self, v: usize) -> std::ops::Range<usize> {
        let key = &self.cylinders[v].word[1..];
        let d = key.len();
        let lo = self.cylinders.partition_point(|c| c.word[..d] < *key);
        let hi = self.cylinders.partition_point(|c| c.word[..d] <= *key);
        lo..hi
    }

    pub fn index_of(&self, word: &[u32]) -> Option<usize> {
        self.cylinders.binary_search_by(|c| c.word.as_slice().cmp(word)).ok()
    }

    pub fn max_diameter(&self) -> Option<f64> {
        self.cylinders.iter().map(|c| c.diameter()).try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }
}

/// Refines the partition into the nonempty cylinders of length `depth`.
pub fn refine_cylinders(coding: &MarkovCoding, depth: usize) -> Result<CylinderSet> {
    if depth == 0 {
        return Err(Error::DegenerateConfiguration("cylinder depth must be at least 1".into()));
    }
    let inv: Vec<MoebiusMap> = (0..coding.n_cells()).map(|k| coding.branch(k).inverse).collect();
    // Depth-first so the inverse-branch products share prefixes.
    let mut cylinders = Vec::new();
    let mut stack: Vec<(Vec<u32>, MoebiusMap)> =
        (0..coding.n_cells() as u32).rev().map(|k| (vec![k], MoebiusMap::IDENTITY)).collect();
    while let Some((w, h)) = stack.pop() {
        if w.len() == depth {
            cylinders.push(cylinder_from(coding, w, h.normalized()));
            continue;
        }
        let last = *w.last().expect("nonempty") as usize;
        let h2 = h * inv[last];
        for &j in coding.transitions.successors(last).iter().rev() {
            let mut v = w.clone();
            v.push(j);
            stack.push((v, h2));
        }
    }
    Ok(CylinderSet { depth, cylinders })
}

/// True if `z` lies within `1e-12` (in chart parameter) of a preimage
/// `f^-m(Q)`, `m <= n`, of the partition endpoints.
pub fn is_bad_point(coding: &MarkovCoding, z: C64, n: usize) -> bool {
    let Some(chart) = coding.chart else { return false };
    let mut w = z;
    for _ in 0..=n {
        let (_, d) = super::nearest_endpoint(&coding.endpoints, chart, chart.param(w));
        if d <= 1e-12 {
            return true;
        }
        match coding.locate(w) {
            Some(k) => w = coding.map(k).apply_c(w),
            None => return false,
        }
    }
    false
}
