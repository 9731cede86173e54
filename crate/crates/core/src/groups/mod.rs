//! Group presentations, representations and deformation families.

mod classes;
mod family;
pub mod io;
pub(crate) mod poincare;
mod schottky;
mod surface;
mod word;

pub use classes::{enumerate_conjugacy_classes, ClassFilter};
pub use io::{Group, GroupDocument, GroupKind};
pub use family::{DeformationFamily, Direction, Tag, TangentVector, MAX_PARAMETER};
pub use poincare::{poincare_delta_estimate, ps_orbit_measure_approx, DeltaEstimate, OrbitMeasure};
pub use schottky::{build_schottky, Circle, SchottkyGroup, CIRCLE_MARGIN};
pub use surface::{build_regular_4g_gon_group, SurfaceGroupPresentation};
pub use word::{Letter, Word, WordDisplay};

use crate::error::{Error, Result};
use crate::mobius::MoebiusMap;

/// Images of the generators of a finitely generated group.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    names: Vec<String>,
    gens: Vec<MoebiusMap>,
}

impl Representation {
    pub fn new(names: Vec<String>, gens: Vec<MoebiusMap>) -> Result<Self> {
        if names.len() != gens.len() || names.is_empty() {
            return Err(Error::InvalidGroup(format!(
                "{} names for {} generators",
                names.len(),
                gens.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidGroup(format!("duplicate generator name `{n}`")));
            }
        }
        if gens.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidGroup("non-finite generator".into()));
        }
        Ok(Representation { names, gens })
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[MoebiusMap] {
        &self.gens
    }

    #[inline]
    pub fn image(&self, l: Letter) -> MoebiusMap {
        let g = self.gens[l.gen as usize];
        if l.inv {
            g.inverse()
        } else {
            g
        }
    }

    /// Ordered product of the letter images, left to right.
    pub fn evaluate_word(&self, w: &Word) -> Result<MoebiusMap> {
        let mut m = MoebiusMap::IDENTITY;
        for l in w.letters() {
            if l.gen as usize >= self.gens.len() {
                return Err(Error::UnknownGenerator(format!("#{}", l.gen)));
            }
            m = m * self.image(*l);
        }
        Ok(m.normalized())
    }

    /// Global conjugate `k rho k^-1`.
    pub fn conjugated(&self, k: &MoebiusMap) -> Representation {
        Representation { names: self.names.clone(), gens: self.gens.iter().map(|g| g.conjugate_by(k)).collect() }
    }

    pub fn with_generators(&self, gens: Vec<MoebiusMap>) -> Representation {
        assert_eq!(gens.len(), self.gens.len());
        Representation { names: self.names.clone(), gens }
    }
}

/// Frobenius distance from the image of `relator` to the nearer of `I`, `-I`.
pub fn relator_residual(rho: &Representation, relator: &Word) -> f64 {
    match rho.evaluate_word(relator) {
        Ok(m) => m.distance_to_identity(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::C64;

    #[test]
    fn word_evaluation() {
        let a = MoebiusMap::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let b = MoebiusMap::new(C64::new(1.0, 1.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(1.0, 1.0).inv())
            .unwrap();
        let rho = Representation::new(vec!["a".into(), "b".into()], vec![a, b]).unwrap();
        assert_eq!(rho.evaluate_word(&Word::empty()).unwrap(), MoebiusMap::IDENTITY);
        let w = Word::new([Letter::new(0, false), Letter::new(0, true)]);
        assert!(rho.evaluate_word(&w).unwrap().distance_to_identity() < 1e-12);
        let ab = Word::parse("a b", rho.names()).unwrap();
        assert!(rho.evaluate_word(&ab).unwrap().projective_distance(&(a * b)) < 1e-12);
        let bad = Word::letter(Letter::new(5, false));
        assert!(matches!(rho.evaluate_word(&bad), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn trivial_relator() {
        let rho = Representation::new(vec!["a".into(), "b".into()], vec![MoebiusMap::IDENTITY; 2]).unwrap();
        let rel = Word::commutator(&Word::parse("a", rho.names()).unwrap(), &Word::parse("b", rho.names()).unwrap());
        assert_eq!(relator_residual(&rho, &rel), 0.0);
    }
}
