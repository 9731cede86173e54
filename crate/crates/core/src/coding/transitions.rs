use serde::Serialize;

use crate::error::{Error, Result};

/// Sparse 0/1 transition matrix of a subshift of finite type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    rows: Vec<Vec<u32>>,
    /// Smallest `n` with `A^n` entrywise positive, when one was found.
    pub aperiodicity_witness: Option<usize>,
}

impl TransitionMatrix {
    /// Builds the matrix from successor lists; every row must be nonempty.
    pub fn new(mut rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter_mut().enumerate() {
            r.sort_unstable();
            r.dedup();
            if r.is_empty() {
                return Err(Error::DegenerateConfiguration(format!("transition row {i} is empty")));
            }
            if r.iter().any(|&j| j as usize >= n) {
                return Err(Error::DegenerateConfiguration(format!("transition row {i} out of range")));
            }
        }
        let mut a = TransitionMatrix { rows, aperiodicity_witness: None };
        a.aperiodicity_witness = a.find_aperiodicity_witness(64);
        Ok(a)
    }

    pub fn full_shift_without_backtracking(symbols: usize, partner: impl Fn(usize) -> usize) -> Result<Self> {
        let rows = (0..symbols)
            .map(|i| (0..symbols).filter(|&j| j != partner(i)).map(|j| j as u32).collect())
            .collect();
        Self::new(rows)
    }

    pub fn full_shift(symbols: usize) -> Result<Self> {
        Self::new(vec![(0..symbols as u32).collect(); symbols])
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn is_admissible(&self, word: &[usize]) -> bool {
        word.iter().all(|&k| k < self.dim()) && word.windows(2).all(|p| self.entry(p[0], p[1]))
    }

    /// `trace(A^n)`, the number of period-`n` points of the shift.
    pub fn periodic_point_count(&self, n: usize) -> u128 {
        let d = self.dim();
        let mut total: u128 = 0;
        for start in 0..d {
            // Walk counts from `start`, one vector per step.
            let mut v = vec![0u128; d];
            v[start] = 1;
            for _ in 0..n {
                let mut w = vec![0u128; d];
                for (i, &c) in v.iter().enumerate() {
                    if c != 0 {
                        for &j in &self.rows[i] {
                            w[j as usize] += c;
                        }
                    }
                }
                v = w;
            }
            total += v[start];
        }
        total
    }

    /// Smallest `n <= max_n` with every entry of `A^n` positive.
    pub fn find_aperiodicity_witness(&self, max_n: usize) -> Option<usize> {
        let d = self.dim();
        let words = d.div_ceil(64);
        let row_bits: Vec<Vec<u64>> = self
            .rows
            .iter()
            .map(|r| {
                let mut b = vec![0u64; words];
                for &j in r {
                    b[j as usize / 64] |= 1 << (j % 64);
                }
                b
            })
            .collect();
        let full = |b: &[u64]| (0..d).all(|j| b[j / 64] >> (j % 64) & 1 == 1);
        let mut reach = row_bits.clone();
        for n in 1..=max_n {
            if reach.iter().all(|b| full(b)) {
                return Some(n);
            }
            reach = reach
                .iter()
                .map(|b| {
                    let mut out = vec![0u64; words];
                    for j in 0..d {
                        if b[j / 64] >> (j % 64) & 1 == 1 {
                            for (o, r) in out.iter_mut().zip(&row_bits[j]) {
                                *o |= r;
                            }
                        }
                    }
                    out
                })
                .collect();
        }
        None
    }

    /// Largest eigenvalue of `A` by power iteration (the exponential growth rate of admissible words).
    pub fn spectral_radius(&self) -> f64 {
        let d = self.dim();
        let mut v = vec![1.0; d];
        let mut rho = 0.0;
        for _ in 0..2000 {
            let mut w = vec![0.0; d];
            for (i, r) in self.rows.iter().enumerate() {
                w[i] = r.iter().map(|&j| v[j as usize]).sum();
            }
            let norm = w.iter().cloned().fold(0.0, f64::max);
            w.iter_mut().for_each(|x| *x /= norm);
            let done = (norm - rho).abs() <= 1e-13 * norm;
            rho = norm;
            v = w;
            if done {
                break;
            }
        }
        rho
    }
}
