use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::circle::{norm_angle, Arc};
use crate::error::{Error, Result};
use crate::groups::poincare::fingerprint;
use crate::groups::{Letter, Representation, SurfaceGroupPresentation, Word};
use crate::mobius::{MoebiusMap, RiemannPoint, C64};

use super::{
    markov_residual, nearest_endpoint, Branch, Cell, CellShape, Chart, CodingKind, EndpointWitness, FixedPointLabel,
    MarkovCoding, TransitionMatrix, MARKOV_TOL,
};

const CONTACT_TOL: f64 = 1e-10;
const CONTAIN_TOL: f64 = 1e-10;
const MERGE_TOL: f64 = 1e-9;
const WITNESS_MAX_LEN: usize = 6;

/// Translates `M D` of the polygon touching `D`, at least at a vertex.
fn abutting_domains(pres: &SurfaceGroupPresentation, rho: &Representation) -> Vec<(Word, MoebiusMap)> {
    let pairings: Vec<(Word, MoebiusMap)> =
        (0..pres.sides()).map(|i| (pres.pairing_words[i].clone(), pres.pairing(rho, i))).collect();
    let touches = |m: &MoebiusMap| {
        pres.vertices.iter().any(|v| {
            let w = m.apply_c(*v);
            pres.vertices.iter().any(|u| (w - u).norm() < CONTACT_TOL)
        })
    };
    let mut seen: HashMap<u64, ()> = HashMap::new();
    seen.insert(fingerprint(&MoebiusMap::IDENTITY), ());
    let mut out = vec![(Word::empty(), MoebiusMap::IDENTITY)];
    let mut frontier = out.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, m) in &frontier {
            for (pw, g) in &pairings {
                let q = (*m * *g).normalized();
                let key = fingerprint(&q);
                if seen.contains_key(&key) || !touches(&q) {
                    continue;
                }
                seen.insert(key, ());
                next.push((w.concat(pw), q));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// For each side, a short word whose axis is the side geodesic, with the
/// label of the endpoint `p_i` as a fixed point.
fn side_axis_words(pres: &SurfaceGroupPresentation, rho: &Representation) -> Result<Vec<(Word, FixedPointLabel)>> {
    let targets: Vec<(C64, C64)> = pres
        .side_endpoints
        .iter()
        .map(|&(p, q)| (C64::from_polar(1.0, p), C64::from_polar(1.0, q)))
        .collect();
    let mut found: Vec<Option<(Word, FixedPointLabel)>> = vec![None; targets.len()];
    let letters: Vec<(Letter, MoebiusMap)> =
        (0..2 * rho.rank()).map(Letter::from_index).map(|l| (l, rho.image(l))).collect();
    let mut stack: Vec<(Letter, MoebiusMap)> = Vec::new();
    fn visit(
        letters: &[(Letter, MoebiusMap)],
        stack: &mut Vec<(Letter, MoebiusMap)>,
        targets: &[(C64, C64)],
        found: &mut [Option<(Word, FixedPointLabel)>],
    ) {
        if found.iter().all(Option::is_some) {
            return;
        }
        if let Some((_, m)) = stack.last() {
            if let Ok((RiemannPoint::Finite(e), RiemannPoint::Finite(a))) = m.fixed_points() {
                for (i, (p, q)) in targets.iter().enumerate() {
                    if found[i].is_some() {
                        continue;
                    }
                    let label = if (e - p).norm() < MERGE_TOL && (a - q).norm() < MERGE_TOL {
                        Some(FixedPointLabel::Expanding)
                    } else if (a - p).norm() < MERGE_TOL && (e - q).norm() < MERGE_TOL {
                        Some(FixedPointLabel::Attracting)
                    } else {
                        None
                    };
                    if let Some(label) = label {
                        found[i] = Some((Word::new(stack.iter().map(|(l, _)| *l)), label));
                    }
                }
            }
        }
        if stack.len() == WITNESS_MAX_LEN {
            return;
        }
        for (l, g) in letters {
            if stack.last().map(|(x, _)| *x == l.inverse()).unwrap_or(false) {
                continue;
            }
            let m = stack.last().map(|(_, m)| *m * *g).unwrap_or(*g);
            stack.push((*l, m));
            visit(letters, stack, targets, found);
            stack.pop();
        }
    }
    // Iterative deepening keeps the shortest witnesses.
    for _ in 0..1 {
        visit(&letters, &mut stack, &targets, &mut found);
    }
    found
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| Error::DegenerateConfiguration(format!("no axis word for side {i}"))))
        .collect()
}

fn swap(label: FixedPointLabel) -> FixedPointLabel {
    match label {
        FixedPointLabel::Expanding => FixedPointLabel::Attracting,
        FixedPointLabel::Attracting => FixedPointLabel::Expanding,
    }
}

/// Bowen–Series Markov partition of the circle for a regular 4g-gon group.
///
/// The endpoint set `R` collects `M(p_i)`, `M(q_i)` over the translates `M D`
/// touching `D`; cell `k` runs from `R_k` to `R_{k+1}` and uses the side
/// pairing of the smallest `j` with `J_k` inside `I_j`, unless that choice
/// breaks the Markov property, in which case the admissible `j` with the
/// smallest endpoint mismatch is taken and recorded in `fallbacks`.
pub fn build_bowen_series_partition(pres: &SurfaceGroupPresentation, rho: &Representation) -> Result<MarkovCoding> {
    let residual = pres.relator_residual(rho);
    if residual > 1e-10 {
        return Err(Error::InvalidGroup(format!("relator residual {residual:e}")));
    }
    let domains = abutting_domains(pres, rho);
    let axes = side_axis_words(pres, rho)?;

    let mut raw: Vec<(f64, EndpointWitness)> = Vec::new();
    for (u, m) in &domains {
        for (i, &(p, q)) in pres.side_endpoints.iter().enumerate() {
            let (w, label) = &axes[i];
            let conj = u.concat(w).concat(&u.inverse());
            for (t, label) in [(p, *label), (q, swap(*label))] {
                let z = m.apply_c(C64::from_polar(1.0, t));
                raw.push((norm_angle(z.arg()), EndpointWitness { word: conj.clone(), label }));
            }
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.word.len().cmp(&b.1.word.len())));
    let mut points: Vec<(f64, EndpointWitness)> = Vec::new();
    for (t, w) in raw {
        match points.last_mut() {
            Some((s, prev)) if t - *s <= MERGE_TOL => {
                if w.word.len() < prev.word.len() {
                    *prev = w;
                }
            }
            _ => points.push((t, w)),
        }
    }
    if points.len() > 1 && points[0].0 + TAU - points[points.len() - 1].0 <= MERGE_TOL {
        points.pop();
    }
    let n = points.len();
    let endpoints: Vec<f64> = points.iter().map(|p| p.0).collect();
    let witnesses: Vec<EndpointWitness> = points.into_iter().map(|p| p.1).collect();
    let chart = Chart::Circle(MoebiusMap::IDENTITY);

    let branches: Vec<Branch> =
        pres.pairing_words.iter().map(|w| Branch::new(rho, w.clone())).collect::<Result<_>>()?;
    let mut cells = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    let mut fallbacks = Vec::new();
    for k in 0..n {
        let lo = endpoints[k];
        let hi = if k + 1 < n { endpoints[k + 1] } else { endpoints[0] + TAU };
        let arc = Arc { start: lo, len: hi - lo };
        let candidates: Vec<usize> =
            pres.intervals.iter().enumerate().filter(|(_, i)| i.contains_arc(&arc, CONTAIN_TOL)).map(|(j, _)| j).collect();
        if candidates.is_empty() {
            return Err(Error::BranchAssignmentFailure(k));
        }
        let image = |j: usize| -> ((usize, f64), (usize, f64)) {
            let g = &branches[j].map;
            let a = nearest_endpoint(&endpoints, chart, g.apply_c(C64::from_polar(1.0, lo)).arg());
            let b = nearest_endpoint(&endpoints, chart, g.apply_c(C64::from_polar(1.0, hi)).arg());
            (a, b)
        };
        let mismatch = |j: usize| {
            let (a, b) = image(j);
            a.1.max(b.1)
        };
        let mut branch = candidates[0];
        if mismatch(branch) > MARKOV_TOL {
            branch = *candidates
                .iter()
                .min_by(|x, y| mismatch(**x).total_cmp(&mismatch(**y)))
                .expect("nonempty candidates");
            let off = mismatch(branch);
            if off > MARKOV_TOL {
                return Err(Error::MarkovViolation { cell: k, offset: off });
            }
            fallbacks.push(k);
        }
        let ((i1, _), (i2, _)) = image(branch);
        let mut row = Vec::new();
        let mut i = i1;
        while i != i2 {
            row.push(i as u32);
            i = (i + 1) % n;
        }
        if row.is_empty() {
            return Err(Error::MarkovViolation { cell: k, offset: 0.0 });
        }
        rows.push(row);
        cells.push(Cell { shape: CellShape::Interval { lo, hi }, branch });
    }
    let mut coding = MarkovCoding {
        kind: CodingKind::BowenSeries,
        chart: Some(chart),
        cells,
        branches,
        transitions: TransitionMatrix::new(rows)?,
        rho: rho.clone(),
        endpoints,
        witnesses,
        fallbacks,
        markov_residual: 0.0,
        domains: domains.into_iter().map(|(w, _)| w).collect(),
        polygon: pres.vertices.clone(),
    };
    coding.markov_residual = markov_residual(&coding)?;
    Ok(coding)
}
