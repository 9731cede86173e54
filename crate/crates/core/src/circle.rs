//! Angles, arcs of the unit circle and geodesics of the Poincaré disk.

use std::f64::consts::{PI, TAU};

use crate::mobius::C64;

/// Reduces an angle to `[0, 2pi)`.
pub fn norm_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` reduced to `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

pub fn on_circle(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

/// A counterclockwise arc `[start, start + len)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Arc {
    pub start: f64,
    pub len: f64,
}

impl Arc {
    pub fn between(start: f64, end: f64) -> Arc {
        let start = norm_angle(start);
        let mut len = (end - start).rem_euclid(TAU);
        if len == 0.0 {
            len = TAU;
        }
        Arc { start, len }
    }

    pub fn full() -> Arc {
        Arc { start: 0.0, len: TAU }
    }

    pub fn end(&self) -> f64 {
        norm_angle(self.start + self.len)
    }

    pub fn mid(&self) -> f64 {
        norm_angle(self.start + self.len / 2.0)
    }

    /// Offset of `t` from the start, in `[0, 2pi)`.
    pub fn offset(&self, t: f64) -> f64 {
        (t - self.start).rem_euclid(TAU)
    }

    /// Closed containment with slack `tol` at both ends.
    pub fn contains(&self, t: f64, tol: f64) -> bool {
        let o = self.offset(t);
        o <= self.len + tol || o >= TAU - tol
    }

    /// True if `other` lies inside `self` up to `tol`.
    pub fn contains_arc(&self, other: &Arc, tol: f64) -> bool {
        let o = self.offset(other.start);
        let o = if o >= TAU - tol { o - TAU } else { o };
        o >= -tol && o + other.len <= self.len + tol
    }
}

/// The geodesic of the unit disk with ideal endpoints `a`, `b` (unit complex numbers).
#[derive(Clone, Copy, Debug)]
pub struct Geodesic {
    pub a: C64,
    pub b: C64,
    mid: C64,
}

impl Geodesic {
    pub fn new(a: C64, b: C64) -> Geodesic {
        let sum = a + b;
        let mid = if sum.norm() < 1e-12 {
            C64::new(0.0, 0.0)
        } else {
            // Point of the geodesic closest to the origin.
            let half = (a * b.conj()).arg().abs() / 2.0;
            sum / sum.norm() * (PI / 4.0 - half / 2.0).tan()
        };
        Geodesic { a, b, mid }
    }

    /// Sign of the side of the geodesic on which `z` lies (zero on it, within `tol`).
    pub fn side(&self, z: C64, tol: f64) -> i8 {
        // Sends a -> 0, b -> infinity and the geodesic to the positive real ray.
        let rot = (self.mid - self.b) / (self.mid - self.a);
        let w = (z - self.a) / (z - self.b) * rot;
        let s = w.im / w.norm().max(1e-300);
        if s > tol {
            1
        } else if s < -tol {
            -1
        } else {
            0
        }
    }

    /// True if the geodesic meets the closed convex polygon with the given vertices.
    pub fn meets_polygon(&self, vertices: &[C64], tol: f64) -> bool {
        let mut pos = false;
        let mut neg = false;
        for v in vertices {
            match self.side(*v, tol) {
                0 => return true,
                1 => pos = true,
                _ => neg = true,
            }
            if pos && neg {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcs() {
        let a = Arc::between(6.0, 0.5);
        assert!((a.len - (0.5 + TAU - 6.0)).abs() < 1e-15);
        assert!(a.contains(0.1, 0.0) && a.contains(6.2, 0.0) && !a.contains(3.0, 0.0));
        assert!(a.contains_arc(&Arc::between(6.1, 0.2), 0.0));
        assert!(!a.contains_arc(&Arc::between(5.9, 0.2), 1e-9));
        assert!((angle_diff(0.1, TAU - 0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn geodesic_sides() {
        let g = Geodesic::new(on_circle(0.0), on_circle(PI));
        assert_eq!(g.side(C64::new(0.0, 0.5), 1e-12), -g.side(C64::new(0.0, -0.5), 1e-12));
        assert_eq!(g.side(C64::new(0.3, 0.0), 1e-12), 0);
        let h = Geodesic::new(on_circle(-0.5), on_circle(0.5));
        assert_ne!(h.side(C64::new(0.0, 0.0), 1e-12), h.side(C64::new(0.99, 0.0), 1e-12));
        assert_eq!(h.side(h.mid, 1e-9), 0);
        let square = [C64::new(0.1, 0.1), C64::new(-0.1, 0.1), C64::new(-0.1, -0.1), C64::new(0.1, -0.1)];
        assert!(g.meets_polygon(&square, 1e-12));
        assert!(!h.meets_polygon(&square, 1e-12));
    }
}
