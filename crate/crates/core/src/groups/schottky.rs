use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{MoebiusMap, C64};

use super::Representation;

/// Minimum gap between Schottky circles.
pub const CIRCLE_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Circle {
        Circle { center, radius }
    }

    pub fn distance_to(&self, z: C64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// Classical Schottky group: generator `i` maps the exterior of circle `2i`
/// onto the interior of circle `2i + 1`.
#[derive(Clone, Debug)]
pub struct SchottkyGroup {
    pub circles: Vec<Circle>,
    pub rho: Representation,
}

impl SchottkyGroup {
    pub fn rank(&self) -> usize {
        self.circles.len() / 2
    }

    /// True when every circle is centered on the real axis, so the group is fuchsian.
    pub fn is_real(&self) -> bool {
        self.circles.iter().all(|c| c.center.im == 0.0)
    }

    /// Largest distance from the image of a circle to the circle it should land on.
    pub fn pairing_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, g) in self.rho.generators().iter().enumerate() {
            let (from, to) = (self.circles[2 * i], self.circles[2 * i + 1]);
            for k in 0..16 {
                let z = from.center + C64::from_polar(from.radius, k as f64 * std::f64::consts::TAU / 16.0);
                worst = worst.max(to.distance_to(g.apply_c(z)));
            }
        }
        worst
    }
}

/// The map `z -> c' - r r' / (z - c)` from the exterior of `from` onto the interior of `to`.
fn pairing_map(from: Circle, to: Circle) -> Result<MoebiusMap> {
    let (c, r, cp, rp) = (from.center, from.radius, to.center, to.radius);
    MoebiusMap::new(cp, -(c * cp) - r * rp, C64::new(1.0, 0.0), -c)
}

pub fn build_schottky(circles: &[Circle]) -> Result<SchottkyGroup> {
    if circles.len() < 2 || circles.len() % 2 != 0 {
        return Err(Error::InvalidGroup(format!("need an even number of circles, got {}", circles.len())));
    }
    for (i, a) in circles.iter().enumerate() {
        if !(a.radius > 0.0 && a.radius.is_finite() && a.center.re.is_finite() && a.center.im.is_finite()) {
            return Err(Error::InvalidGroup(format!("circle {i} is degenerate")));
        }
        for (j, b) in circles.iter().enumerate().skip(i + 1) {
            if (a.center - b.center).norm() < a.radius + b.radius + CIRCLE_MARGIN {
                return Err(Error::OverlappingCircles(i, j));
            }
        }
    }
    let gens = circles.chunks(2).map(|p| pairing_map(p[0], p[1])).collect::<Result<Vec<_>>>()?;
    let names = (1..=gens.len()).map(|i| format!("g{i}")).collect();
    let group = SchottkyGroup { circles: circles.to_vec(), rho: Representation::new(names, gens)? };
    let residual = group.pairing_residual();
    if residual > 1e-9 {
        return Err(Error::InvalidGroup(format!("pairing residual {residual:e}")));
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{IsometryClass, RiemannPoint};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn symmetric_pair() {
        let g = build_schottky(&[Circle::new(c(-3.0, 0.0), 1.0), Circle::new(c(3.0, 0.0), 1.0)]).unwrap();
        let m = g.rho.generators()[0];
        assert_eq!(m.classify(), IsometryClass::Loxodromic);
        assert!(m.is_real(1e-15));
        let (e, a) = m.fixed_points().unwrap();
        for p in [e, a] {
            match p {
                RiemannPoint::Finite(z) => assert!(z.im.abs() < 1e-12),
                RiemannPoint::Infinity => panic!("fixed point at infinity"),
            }
        }
        assert!(g.pairing_residual() < 1e-12);
    }

    #[test]
    fn tangent_circles_rejected() {
        let r = build_schottky(&[Circle::new(c(-1.0, 0.0), 1.0), Circle::new(c(1.0, 0.0), 1.0)]);
        assert!(matches!(r, Err(Error::OverlappingCircles(0, 1))));
    }

    #[test]
    fn real_centers_give_real_matrices() {
        let circles: Vec<Circle> = [-6.0, -2.0, 2.0, 6.0].iter().map(|&x| Circle::new(c(x, 0.0), 1.0)).collect();
        let g = build_schottky(&circles).unwrap();
        assert!(g.is_real());
        assert!(g.rho.generators().iter().all(|m| m.is_real(1e-15)));
    }

    #[test]
    fn planar_configuration() {
        let circles = [
            Circle::new(c(-3.0, 0.0), 1.0),
            Circle::new(c(3.0, 0.0), 1.0),
            Circle::new(c(0.0, -3.0), 1.0),
            Circle::new(c(0.0, 3.0), 1.0),
        ];
        let g = build_schottky(&circles).unwrap();
        assert!(g.pairing_residual() < 1e-9);
        assert!(!g.rho.generators()[1].is_real(1e-3));
    }
}
