use crate::error::Result;
use crate::groups::{Letter, SchottkyGroup, Word};
use crate::mobius::MoebiusMap;

use super::{markov_residual, Branch, Cell, CellShape, Chart, CodingKind, MarkovCoding, TransitionMatrix};

/// Markov coding of a Schottky group by its disks.
///
/// Symbol `2i` is the disk of circle `2i` with branch `g_i`, symbol `2i + 1`
/// the disk of circle `2i + 1` with branch `g_i^-1`; every transition is
/// allowed except immediate backtracking. Groups with all circles centered on
/// the real line get a line chart and interval cells.
pub fn schottky_coding(group: &SchottkyGroup) -> Result<MarkovCoding> {
    let symbols = group.circles.len();
    let branches = (0..symbols)
        .map(|s| Branch::new(&group.rho, Word::letter(Letter::new(s / 2, s % 2 == 1))))
        .collect::<Result<Vec<_>>>()?;
    let real = group.is_real();
    let cells = group
        .circles
        .iter()
        .enumerate()
        .map(|(s, c)| Cell {
            shape: if real {
                CellShape::Interval { lo: c.center.re - c.radius, hi: c.center.re + c.radius }
            } else {
                CellShape::Disk { center: [c.center.re, c.center.im], radius: c.radius }
            },
            branch: s,
        })
        .collect();
    let mut endpoints: Vec<f64> = if real {
        group.circles.iter().flat_map(|c| [c.center.re - c.radius, c.center.re + c.radius]).collect()
    } else {
        Vec::new()
    };
    endpoints.sort_by(f64::total_cmp);
    let mut coding = MarkovCoding {
        kind: CodingKind::Schottky,
        chart: real.then_some(Chart::Line(MoebiusMap::IDENTITY)),
        cells,
        branches,
        transitions: TransitionMatrix::full_shift_without_backtracking(symbols, |s| s ^ 1)?,
        rho: group.rho.clone(),
        endpoints,
        witnesses: Vec::new(),
        fallbacks: Vec::new(),
        markov_residual: 0.0,
        domains: Vec::new(),
        polygon: Vec::new(),
    };
    coding.markov_residual = markov_residual(&coding)?;
    Ok(coding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_schottky, Circle};
    use crate::mobius::C64;

    #[test]
    fn two_generator_coding() {
        let g = build_schottky(&[
            Circle::new(C64::new(-3.0, 0.0), 1.0),
            Circle::new(C64::new(3.0, 0.0), 1.0),
            Circle::new(C64::new(0.0, -3.0), 1.0),
            Circle::new(C64::new(0.0, 3.0), 1.0),
        ])
        .unwrap();
        let c = schottky_coding(&g).unwrap();
        assert_eq!(c.n_cells(), 4);
        assert_eq!(c.transitions.nnz(), 12);
        assert!(c.markov_residual < 1e-12);
        assert!(c.chart.is_none());
        // Each branch expands on its own disk.
        for k in 0..4 {
            assert!(c.phi(k, c.anchor(k)) < 0.0);
            assert_eq!(c.locate(c.anchor(k)), Some(k));
        }
    }

    #[test]
    fn real_coding_is_markov_on_the_line() {
        let g = build_schottky(&[
            Circle::new(C64::new(-3.0, 0.0), 1.0),
            Circle::new(C64::new(3.0, 0.0), 1.0),
            Circle::new(C64::new(-8.0, 0.0), 0.5),
            Circle::new(C64::new(8.0, 0.0), 2.0),
        ])
        .unwrap();
        let c = schottky_coding(&g).unwrap();
        assert!(c.chart.is_some());
        assert!(c.markov_residual < 1e-9, "{}", c.markov_residual);
    }
}
