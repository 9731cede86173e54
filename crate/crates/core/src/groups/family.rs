use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{large_eigenvalue, MoebiusMap, C64};

use super::{Letter, Representation, SurfaceGroupPresentation, Word};

/// Largest admissible absolute value of a family parameter.
pub const MAX_PARAMETER: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Shear,
    Bend,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Curve {
    /// Twist along generator `axis`, right-multiplying generator `moved`.
    Handle { axis: usize, moved: usize },
    /// Twist along `[x1,y1]...[xk,yk]`, conjugating the later handles.
    Separating { k: usize },
}

/// One real parameter of a family: a complex twist along `curve` scaled by `coefficient`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    pub curve: String,
    pub tag: Tag,
    pub coefficient: C64,
    kind: Curve,
    word: Word,
}

impl Direction {
    pub fn word(&self) -> &Word {
        &self.word
    }
}

/// Unit direction in parameter space at a basepoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub tag: Tag,
    pub label: String,
}

impl TangentVector {
    pub fn new(base: Vec<f64>, direction: Vec<f64>, tag: Tag, label: impl Into<String>) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::Config("basepoint and direction dimensions differ".into()));
        }
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Config("zero tangent direction".into()));
        }
        Ok(TangentVector { base, direction: direction.iter().map(|x| x / norm).collect(), tag, label: label.into() })
    }

    /// Parameter point `base + t * direction`.
    pub fn point(&self, t: f64) -> Vec<f64> {
        self.base.iter().zip(&self.direction).map(|(b, d)| b + t * d).collect()
    }
}

/// Smooth family `tau -> rho_tau` built from complex twists along curves of a surface group.
#[derive(Clone, Debug)]
pub struct DeformationFamily {
    presentation: SurfaceGroupPresentation,
    base: Representation,
    directions: Vec<Direction>,
}

impl DeformationFamily {
    /// Family with one real parameter per `(curve, tag)` entry.
    pub fn new(
        presentation: &SurfaceGroupPresentation,
        base: &Representation,
        directions: &[(&str, Tag)],
    ) -> Result<Self> {
        let dirs = directions
            .iter()
            .map(|(curve, tag)| {
                let coefficient = match tag {
                    Tag::Shear => C64::new(1.0, 0.0),
                    Tag::Bend => C64::new(0.0, 1.0),
                    Tag::Generic => return Err(Error::Config("generic directions need a coefficient".into())),
                };
                Self::direction(presentation, curve, *tag, coefficient)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_directions(presentation, base, dirs)
    }

    /// Complex one-parameter family along `curve`: parameter 0 shears, parameter 1 bends.
    pub fn twist_bend(presentation: &SurfaceGroupPresentation, base: &Representation, curve: &str) -> Result<Self> {
        Self::new(presentation, base, &[(curve, Tag::Shear), (curve, Tag::Bend)])
    }

    /// A direction twisting along `curve` by `coefficient` per unit parameter.
    pub fn direction(
        presentation: &SurfaceGroupPresentation,
        curve: &str,
        tag: Tag,
        coefficient: C64,
    ) -> Result<Direction> {
        let (kind, word) = parse_curve(presentation, curve)?;
        if coefficient.norm() == 0.0 || !coefficient.re.is_finite() || !coefficient.im.is_finite() {
            return Err(Error::Config(format!("invalid coefficient for curve `{curve}`")));
        }
        Ok(Direction { curve: curve.to_string(), tag, coefficient, kind, word })
    }

    pub fn from_directions(
        presentation: &SurfaceGroupPresentation,
        base: &Representation,
        directions: Vec<Direction>,
    ) -> Result<Self> {
        let residual = presentation.relator_residual(base);
        if residual > 1e-10 {
            return Err(Error::InvalidGroup(format!("base relator residual {residual:e}")));
        }
        if directions.is_empty() {
            return Err(Error::Config("family needs at least one direction".into()));
        }
        Ok(DeformationFamily { presentation: presentation.clone(), base: base.clone(), directions })
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn base(&self) -> &Representation {
        &self.base
    }

    pub fn presentation(&self) -> &SurfaceGroupPresentation {
        &self.presentation
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn origin(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// Unit vector along parameter `i` at `base`.
    pub fn tangent(&self, i: usize, base: &[f64]) -> Result<TangentVector> {
        let d = self.directions.get(i).ok_or_else(|| Error::Config(format!("no direction {i}")))?;
        let mut dir = vec![0.0; self.dim()];
        dir[i] = 1.0;
        let label = format!("{}:{}", d.curve, tag_name(d.tag));
        TangentVector::new(base.to_vec(), dir, d.tag, label)
    }

    /// The representation at parameter `tau`.
    pub fn evaluate(&self, tau: &[f64]) -> Result<Representation> {
        if tau.len() != self.dim() {
            return Err(Error::Config(format!("expected {} parameters, got {}", self.dim(), tau.len())));
        }
        if let Some(t) = tau.iter().find(|t| !(t.abs() <= MAX_PARAMETER + 1e-12)) {
            return Err(Error::Config(format!("parameter {t} outside [-{MAX_PARAMETER}, {MAX_PARAMETER}]")));
        }
        // Collect one complex twist per curve, in order of first appearance.
        let mut twists: Vec<(Curve, &Word, C64)> = Vec::new();
        for (d, &t) in self.directions.iter().zip(tau) {
            match twists.iter_mut().find(|(k, _, _)| *k == d.kind) {
                Some(entry) => entry.2 += d.coefficient * t,
                None => twists.push((d.kind, &d.word, d.coefficient * t)),
            }
        }
        let mut gens = self.base.generators().to_vec();
        for (kind, word, c) in twists {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let current = self.base.with_generators(gens.clone());
            let axis = current.evaluate_word(word)?;
            let e = axis_translation(&axis, c)?;
            match kind {
                Curve::Handle { moved, .. } => gens[moved] = gens[moved].compose(&e),
                Curve::Separating { k } => {
                    for g in gens.iter_mut().skip(2 * k) {
                        *g = g.conjugate_by(&e);
                    }
                }
            }
        }
        Ok(self.base.with_generators(gens))
    }

    pub fn relator_residual(&self, tau: &[f64]) -> Result<f64> {
        Ok(self.presentation.relator_residual(&self.evaluate(tau)?))
    }
}

pub(crate) fn tag_name(t: Tag) -> &'static str {
    match t {
        Tag::Shear => "shear",
        Tag::Bend => "bend",
        Tag::Generic => "generic",
    }
}

fn parse_curve(p: &SurfaceGroupPresentation, curve: &str) -> Result<(Curve, Word)> {
    let unsupported = || Error::UnsupportedCurve(curve.to_string());
    let index = |s: &str| s.parse::<usize>().ok().filter(|b| (1..=p.genus).contains(b));
    if let Some(k) = curve.strip_prefix("sep") {
        let k = index(k).filter(|k| *k < p.genus).ok_or_else(unsupported)?;
        return Ok((Curve::Separating { k }, p.separating_word(k)));
    }
    let (axis_offset, rest) = match curve.chars().next() {
        Some('x') => (0, &curve[1..]),
        Some('y') => (1, &curve[1..]),
        _ => return Err(unsupported()),
    };
    let b = index(rest).ok_or_else(unsupported)? - 1;
    let axis = 2 * b + axis_offset;
    let moved = 2 * b + 1 - axis_offset;
    Ok((Curve::Handle { axis, moved }, Word::letter(Letter::new(axis, false))))
}

/// `exp(c/2 * N)` where `N` is the unit generator of the one-parameter group through `a`;
/// `axis_translation(a, L) = a` for the translation length `L` of a lift with positive eigenvalue.
pub fn axis_translation(a: &MoebiusMap, c: C64) -> Result<MoebiusMap> {
    a.translation_length()?;
    let t = a.trace();
    let l = large_eigenvalue(t);
    let scale = l - l.inv();
    let half = c / 2.0;
    let (ch, sh) = (half.cosh(), half.sinh());
    let n = |x: C64, diag: bool| (2.0 * x - if diag { t } else { C64::new(0.0, 0.0) }) / scale;
    Ok(MoebiusMap {
        a: ch + sh * n(a.a, true),
        b: sh * n(a.b, false),
        c: sh * n(a.c, false),
        d: ch + sh * n(a.d, true),
    }
    .normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_regular_4g_gon_group;

    #[test]
    fn axis_translation_reaches_the_element() {
        let a = MoebiusMap::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let l = a.translation_length().unwrap();
        let e = axis_translation(&a, C64::new(l, 0.0)).unwrap();
        assert!(e.projective_distance(&a) < 1e-12);
        let half = axis_translation(&a, C64::new(l / 2.0, 0.0)).unwrap();
        assert!(half.compose(&half).projective_distance(&a) < 1e-12);
    }

    #[test]
    fn zero_parameter_is_base() {
        let (p, rho) = build_regular_4g_gon_group(2).unwrap();
        let f = DeformationFamily::twist_bend(&p, &rho, "x1").unwrap();
        assert_eq!(f.evaluate(&[0.0, 0.0]).unwrap(), rho);
    }

    #[test]
    fn unsupported_curves() {
        let (p, rho) = build_regular_4g_gon_group(2).unwrap();
        for c in ["z1", "x3", "sep2", "x", "sep0"] {
            assert!(matches!(DeformationFamily::twist_bend(&p, &rho, c), Err(Error::UnsupportedCurve(_))), "{c}");
        }
    }

    #[test]
    fn parameter_range_enforced() {
        let (p, rho) = build_regular_4g_gon_group(2).unwrap();
        let f = DeformationFamily::twist_bend(&p, &rho, "y2").unwrap();
        assert!(f.evaluate(&[0.31, 0.0]).is_err());
        assert!(f.evaluate(&[0.3, -0.3]).is_ok());
    }

    #[test]
    fn relator_and_curve_trace_preserved() {
        let (p, rho) = build_regular_4g_gon_group(2).unwrap();
        for curve in ["x1", "y1", "x2", "y2", "sep1"] {
            let f = DeformationFamily::twist_bend(&p, &rho, curve).unwrap();
            let word = f.directions()[0].word().clone();
            let t0 = rho.evaluate_word(&word).unwrap().trace();
            for k in 0..20 {
                let s = -0.3 + 0.6 * k as f64 / 19.0;
                for tau in [[s, 0.0], [0.0, s], [s, -s / 2.0]] {
                    assert!(f.relator_residual(&tau).unwrap() <= 1e-9, "{curve} {tau:?}");
                    let t = f.evaluate(&tau).unwrap().evaluate_word(&word).unwrap().trace();
                    assert!((t * t - t0 * t0).norm() <= 1e-10, "{curve}");
                }
            }
        }
    }
}
