use std::f64::consts::PI;

use crate::circle::{norm_angle, Arc};
use crate::error::{Error, Result};
use crate::mobius::{MoebiusMap, C64};

use super::{relator_residual, Letter, Representation, Word};

/// The regular 4g-gon in the unit disk with its side pairings.
///
/// Generators are ordered `x1, y1, x2, y2, ...`. Side `i` is the side between
/// vertices `i` and `i + 1`; sides are paired within blocks of four as
/// `0 <-> 2` and `1 <-> 3`, so the boundary reads `x y x^-1 y^-1` per handle.
#[derive(Clone, Debug)]
pub struct SurfaceGroupPresentation {
    pub genus: usize,
    pub names: Vec<String>,
    pub relator: Word,
    /// Euclidean radius of the vertices.
    pub vertex_radius: f64,
    pub vertices: Vec<C64>,
    /// Direction of the midpoint of side `i`.
    pub side_angles: Vec<f64>,
    /// Ideal endpoints `(p_i, q_i)` of the geodesic through side `i`.
    pub side_endpoints: Vec<(f64, f64)>,
    /// The shorter arc `I_i` cut off by that geodesic.
    pub intervals: Vec<Arc>,
    pub partner: Vec<usize>,
    /// Side pairing `gamma_i` as a word in the generators.
    pub pairing_words: Vec<Word>,
}

impl SurfaceGroupPresentation {
    pub fn sides(&self) -> usize {
        4 * self.genus
    }

    pub fn vertex_angle(&self) -> f64 {
        2.0 * PI / self.sides() as f64
    }

    /// Hyperbolic area from the angle defect of the polygon.
    pub fn area(&self) -> f64 {
        let n = self.sides() as f64;
        (n - 2.0) * PI - n * self.vertex_angle()
    }

    pub fn pairing(&self, rho: &Representation, i: usize) -> MoebiusMap {
        rho.evaluate_word(&self.pairing_words[i]).expect("pairing words use known generators")
    }

    pub fn relator_residual(&self, rho: &Representation) -> f64 {
        relator_residual(rho, &self.relator)
    }

    /// Word of the boundary curve of the first `k` handles, `[x1,y1]...[xk,yk]`.
    pub fn separating_word(&self, k: usize) -> Word {
        (0..k).fold(Word::empty(), |acc, b| {
            let x = Word::letter(Letter::new(2 * b, false));
            let y = Word::letter(Letter::new(2 * b + 1, false));
            acc.concat(&Word::commutator(&x, &y))
        })
    }
}

fn partner_of(i: usize) -> usize {
    let block = i / 4 * 4;
    block + (i % 4 + 2) % 4
}

/// Regular 4g-gon group centered at the origin with its first vertex on the
/// positive real axis.
pub fn build_regular_4g_gon_group(genus: usize) -> Result<(SurfaceGroupPresentation, Representation)> {
    if genus < 2 {
        return Err(Error::InvalidGroup(format!("genus {genus} is unsupported (needs g >= 2)")));
    }
    let n = 4 * genus;
    let nf = n as f64;
    let alpha = 2.0 * PI / nf;
    let cosh_r = 1.0 / (PI / nf).tan() / (alpha / 2.0).tan();
    let vertex_radius = (cosh_r.acosh() / 2.0).tanh();
    let inradius = ((alpha / 2.0).cos() / (PI / nf).sin()).acosh();

    let vertices: Vec<C64> = (0..n).map(|k| C64::from_polar(vertex_radius, 2.0 * PI * k as f64 / nf)).collect();
    let side_angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * (k as f64 + 0.5) / nf).collect();
    let r = vertex_radius;
    let dist = (r * r + 1.0) / (2.0 * r * (PI / nf).cos());
    let omega = (1.0 / dist).acos();
    let side_endpoints: Vec<(f64, f64)> =
        side_angles.iter().map(|&phi| (norm_angle(phi - omega), norm_angle(phi + omega))).collect();
    let intervals = side_angles.iter().map(|&phi| Arc::between(phi - omega, phi + omega)).collect();
    let partner: Vec<usize> = (0..n).map(partner_of).collect();

    let pairings: Vec<MoebiusMap> = (0..n)
        .map(|i| {
            MoebiusMap::rotation(side_angles[partner[i]])
                .compose(&MoebiusMap::disk_translation(2.0 * inradius))
                .compose(&MoebiusMap::rotation(PI - side_angles[i]))
        })
        .collect();

    let names: Vec<String> = (1..=genus).flat_map(|b| [format!("x{b}"), format!("y{b}")]).collect();
    let mut gens = Vec::with_capacity(2 * genus);
    let mut pairing_words = vec![Word::empty(); n];
    for b in 0..genus {
        gens.push(pairings[4 * b + 2]);
        gens.push(pairings[4 * b + 1]);
        pairing_words[4 * b + 2] = Word::letter(Letter::new(2 * b, false));
        pairing_words[4 * b] = Word::letter(Letter::new(2 * b, true));
        pairing_words[4 * b + 1] = Word::letter(Letter::new(2 * b + 1, false));
        pairing_words[4 * b + 3] = Word::letter(Letter::new(2 * b + 1, true));
    }
    let rho = Representation::new(names.clone(), gens)?;
    let mut pres = SurfaceGroupPresentation {
        genus,
        names,
        relator: Word::empty(),
        vertex_radius,
        vertices,
        side_angles,
        side_endpoints,
        intervals,
        partner,
        pairing_words,
    };
    pres.relator = pres.separating_word(genus);
    let residual = pres.relator_residual(&rho);
    if residual > 1e-10 {
        return Err(Error::InvalidGroup(format!("relator residual {residual:e}")));
    }
    Ok((pres, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::IsometryClass;

    #[test]
    fn octagon_geometry() {
        let (p, rho) = build_regular_4g_gon_group(2).unwrap();
        assert_eq!(p.sides(), 8);
        assert!((p.vertex_angle() - PI / 4.0).abs() < 1e-15);
        assert!((p.vertex_radius - 0.840896415253715).abs() < 1e-12);
        assert!((p.area() - 4.0 * PI).abs() < 1e-12);
        assert!(p.relator_residual(&rho) < 1e-10);
        assert!(p.intervals.iter().all(|i| i.len < PI));
    }

    #[test]
    fn pairings_map_sides_to_partners() {
        let (p, rho) = build_regular_4g_gon_group(2).unwrap();
        let n = p.sides();
        for i in 0..n {
            let g = p.pairing(&rho, i);
            let j = p.partner[i];
            let ends = [p.vertices[j], p.vertices[(j + 1) % n]];
            for v in [p.vertices[i], p.vertices[(i + 1) % n]] {
                let w = g.apply_c(v);
                let miss = ends.iter().map(|e| (w - e).norm()).fold(f64::INFINITY, f64::min);
                assert!(miss < 1e-10, "side {i}: {miss}");
            }
            assert!(g.compose(&p.pairing(&rho, j)).distance_to_identity() < 1e-10);
            assert_eq!(g.classify(), IsometryClass::Loxodromic);
        }
    }

    #[test]
    fn pairings_expand_on_their_intervals() {
        let (p, rho) = build_regular_4g_gon_group(2).unwrap();
        for (i, arc) in p.intervals.iter().enumerate() {
            let g = p.pairing(&rho, i);
            let inner = C64::from_polar(1.0, arc.mid());
            assert!(g.derivative_norm(inner) > 1.0);
            let (pa, qa) = p.side_endpoints[i];
            for t in [pa, qa] {
                let z = C64::from_polar(1.0, t);
                assert!((g.derivative_norm(z) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn higher_genus() {
        let (p, rho) = build_regular_4g_gon_group(3).unwrap();
        assert!(p.relator_residual(&rho) < 1e-10);
        assert!(build_regular_4g_gon_group(1).is_err());
    }
}
