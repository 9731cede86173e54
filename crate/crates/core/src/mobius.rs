//! SL(2,C) algebra acting on the Riemann sphere.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Band used for reality and equality tests in classification.
pub const CLASS_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RiemannPoint {
    Finite(C64),
    Infinity,
}

impl RiemannPoint {
    pub fn finite(self) -> Option<C64> {
        match self {
            RiemannPoint::Finite(z) => Some(z),
            RiemannPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RiemannPoint::Infinity)
    }

    /// Chordal distance on the unit sphere; finite and symmetric for all pairs.
    pub fn chordal_distance(self, other: RiemannPoint) -> f64 {
        use RiemannPoint::*;
        match (self, other) {
            (Infinity, Infinity) => 0.0,
            (Finite(z), Infinity) | (Infinity, Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (Finite(z), Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<C64> for RiemannPoint {
    fn from(z: C64) -> Self {
        RiemannPoint::Finite(z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// A determinant-one 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Matrix product without renormalization. Use [`MoebiusMap::compose`] when
/// the determinant must be reset.
impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, n: MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: self.a * n.a + self.b * n.c,
            b: self.a * n.b + self.b * n.d,
            c: self.c * n.a + self.d * n.c,
            d: self.c * n.b + self.d * n.d,
        }
    }
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE };

    /// Builds a map from arbitrary nonsingular entries, scaling to determinant one.
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let m = MoebiusMap { a, b, c, d };
        if ![a, b, c, d].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::DegenerateConfiguration("non-finite matrix entry".into()));
        }
        let det = m.det();
        let scale = [a, b, c, d].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if det.norm() <= 1e-14 * scale {
            return Err(Error::SingularMatrix(det.norm()));
        }
        Ok(m.scaled(det.sqrt().inv()))
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// `diag(l, 1/l)`, the map `z -> l^2 z`.
    pub fn diag(l: C64) -> Self {
        MoebiusMap { a: l, b: ZERO, c: ZERO, d: l.inv() }
    }

    /// Rotation of the unit disk by angle `t`.
    pub fn rotation(t: f64) -> Self {
        Self::diag(C64::from_polar(1.0, t / 2.0))
    }

    /// Hyperbolic translation of the unit disk along the real diameter by distance `dist`.
    pub fn disk_translation(dist: f64) -> Self {
        let (ch, sh) = ((dist / 2.0).cosh(), (dist / 2.0).sinh());
        MoebiusMap { a: ch.into(), b: sh.into(), c: sh.into(), d: ch.into() }
    }

    fn scaled(self, s: C64) -> Self {
        MoebiusMap { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Rescales so that the determinant is exactly one up to rounding.
    ///
    /// When `ad` and `bc` nearly cancel the computed determinant carries no
    /// digits, and the map is returned unchanged: products of unit-determinant
    /// factors are then closer to unit determinant than any rescaling.
    pub fn normalized(self) -> Self {
        let det = self.det();
        let size = (self.a * self.d).norm() + (self.b * self.c).norm();
        if det.norm() < 1e-3 * size {
            return self;
        }
        self.scaled(det.sqrt().inv())
    }

    /// Product `self * n`, renormalized.
    pub fn compose(&self, n: &MoebiusMap) -> Self {
        (*self * *n).normalized()
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `k * self * k^-1`.
    pub fn conjugate_by(&self, k: &MoebiusMap) -> Self {
        (*k * *self * k.inverse()).normalized()
    }

    /// Frobenius distance to the nearer of `I` and `-I`.
    pub fn distance_to_identity(&self) -> f64 {
        let dist = |s: f64| {
            ((self.a - s).norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + (self.d - s).norm_sqr()).sqrt()
        };
        dist(1.0).min(dist(-1.0))
    }

    /// Frobenius distance between the two maps as elements of PSL(2,C).
    pub fn projective_distance(&self, other: &MoebiusMap) -> f64 {
        let dist = |s: f64| {
            self.entries()
                .iter()
                .zip(other.entries())
                .map(|(x, y)| (x - y * s).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        dist(1.0).min(dist(-1.0))
    }

    /// True if all entries are real within `tol` (the map preserves the extended real line).
    pub fn is_real(&self, tol: f64) -> bool {
        self.entries().iter().all(|z| z.im.abs() <= tol)
    }

    pub fn classify(&self) -> IsometryClass {
        if self.distance_to_identity() <= CLASS_TOL {
            return IsometryClass::Identity;
        }
        let t2 = self.trace() * self.trace();
        if (t2 - 4.0).norm() <= CLASS_TOL {
            IsometryClass::Parabolic
        } else if t2.im.abs() <= CLASS_TOL && t2.re >= -CLASS_TOL && t2.re < 4.0 {
            IsometryClass::Elliptic
        } else {
            IsometryClass::Loxodromic
        }
    }

    fn require_loxodromic(&self) -> Result<()> {
        match self.classify() {
            IsometryClass::Loxodromic => Ok(()),
            other => Err(Error::NotLoxodromic(format!("{other:?}"))),
        }
    }

    /// Large eigenvalue and trace of the lift with `Re t >= 0`.
    pub fn eigenvalue_and_trace(&self) -> Result<(C64, C64)> {
        self.require_loxodromic()?;
        let mut t = self.trace();
        if t.re < 0.0 || (t.re == 0.0 && t.im < 0.0) {
            t = -t;
        }
        Ok((large_eigenvalue(t), t))
    }

    /// `2 log |lambda|`.
    pub fn translation_length(&self) -> Result<f64> {
        self.require_loxodromic()?;
        Ok(length_from_trace(self.trace()))
    }

    /// `log lambda^2` on the principal branch.
    pub fn complex_length(&self) -> Result<C64> {
        let (l, _) = self.eigenvalue_and_trace()?;
        Ok((l * l).ln())
    }

    /// Expanding and attracting fixed points.
    pub fn fixed_points(&self) -> Result<(RiemannPoint, RiemannPoint)> {
        self.require_loxodromic()?;
        let t = self.trace();
        let big = large_eigenvalue(t);
        let small = t - big;
        // (cz + d) equals the eigenvalue at each fixed point; |M'| = |cz+d|^-2.
        let point = |mu: C64| -> RiemannPoint {
            let via_c = self.c.norm();
            let via_b = (mu - self.a).norm();
            if via_c >= via_b {
                RiemannPoint::Finite((mu - self.d) / self.c)
            } else if via_b > 0.0 {
                RiemannPoint::Finite(self.b / (mu - self.a))
            } else {
                RiemannPoint::Infinity
            }
        };
        if self.c.norm() == 0.0 {
            // Upper triangular: one fixed point at infinity, derivative there is d/a.
            let finite = RiemannPoint::Finite(self.b / (self.d - self.a));
            return Ok(if (self.a / self.d).norm() > 1.0 {
                (finite, RiemannPoint::Infinity)
            } else {
                (RiemannPoint::Infinity, finite)
            });
        }
        Ok((point(small), point(big)))
    }

    pub fn apply(&self, z: RiemannPoint) -> RiemannPoint {
        match z {
            RiemannPoint::Infinity => {
                if self.c == ZERO {
                    RiemannPoint::Infinity
                } else {
                    RiemannPoint::Finite(self.a / self.c)
                }
            }
            RiemannPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == ZERO {
                    RiemannPoint::Infinity
                } else {
                    RiemannPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Image of a finite point; the caller guarantees it is not the pole.
    #[inline]
    pub fn apply_c(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `|M'(z)|` at a finite point.
    #[inline]
    pub fn derivative_norm(&self, z: C64) -> f64 {
        1.0 / (self.c * z + self.d).norm_sqr()
    }

    pub fn apply_and_derivative(&self, z: RiemannPoint) -> Result<(RiemannPoint, C64)> {
        match z {
            RiemannPoint::Infinity => {
                if self.c == ZERO {
                    Ok((RiemannPoint::Infinity, (self.d * self.d).inv()))
                } else {
                    Ok((RiemannPoint::Finite(self.a / self.c), ZERO))
                }
            }
            RiemannPoint::Finite(w) => {
                let den = self.c * w + self.d;
                let scale = self.c.norm() * w.norm() + self.d.norm();
                if den.norm() <= 1e-15 * scale.max(1e-300) {
                    return Err(Error::DerivativeAtPole);
                }
                Ok((RiemannPoint::Finite((self.a * w + self.b) / den), (den * den).inv()))
            }
        }
    }

    /// Distance in hyperbolic 3-space from the point above 0 at height 1 to its image.
    pub fn h3_displacement(&self) -> f64 {
        let s: f64 = self.entries().iter().map(|z| z.norm_sqr()).sum();
        (s / 2.0).max(1.0).acosh()
    }
}

/// Eigenvalue of modulus at least one for a determinant-one matrix with trace `t`.
#[inline]
pub fn large_eigenvalue(t: C64) -> C64 {
    let disc = (t * t - 4.0).sqrt();
    let p = (t + disc) * 0.5;
    let m = (t - disc) * 0.5;
    if p.norm_sqr() >= m.norm_sqr() {
        p
    } else {
        m
    }
}

/// Translation length `2 log |lambda|` read off the trace.
#[inline]
pub fn length_from_trace(t: C64) -> f64 {
    2.0 * large_eigenvalue(t).norm().ln()
}

/// Complex lengths along a path, continued from `Im = 0` at the first sample.
pub fn complex_length_continuation(path: &[MoebiusMap]) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(path.len());
    let mut prev_arg = 0.0;
    let mut im = 0.0;
    for (i, m) in path.iter().enumerate() {
        let (l, _) = m.eigenvalue_and_trace()?;
        let l2 = l * l;
        let arg = l2.arg();
        if i == 0 {
            if arg.abs() > 1e-9 {
                return Err(Error::DegenerateConfiguration(
                    "path must start at a map with real positive lambda^2".into(),
                ));
            }
        } else {
            let mut jump = arg - prev_arg;
            if jump > PI {
                jump -= 2.0 * PI;
            } else if jump <= -PI {
                jump += 2.0 * PI;
            }
            if jump.abs() >= PI - 1e-12 {
                return Err(Error::BranchAmbiguity { index: i - 1, jump });
            }
            im += jump;
        }
        prev_arg = arg;
        out.push(C64::new(l2.norm().ln(), im));
    }
    Ok(out)
}

/// Large eigenvalues along a path with the lift sign chosen by continuity.
pub fn eigenvalue_path(path: &[MoebiusMap]) -> Result<Vec<C64>> {
    let mut out: Vec<C64> = Vec::with_capacity(path.len());
    let mut prev_t: Option<C64> = None;
    for m in path {
        m.translation_length()?;
        let mut t = m.trace();
        match prev_t {
            None => {
                if t.re < 0.0 || (t.re == 0.0 && t.im < 0.0) {
                    t = -t;
                }
            }
            Some(p) => {
                if (t + p).norm() < (t - p).norm() {
                    t = -t;
                }
            }
        }
        prev_t = Some(t);
        out.push(large_eigenvalue(t));
    }
    Ok(out)
}

/// `(a - b)(z - w) / ((a - w)(z - b))`, with limits at infinity.
pub fn cross_ratio(a: RiemannPoint, z: RiemannPoint, b: RiemannPoint, w: RiemannPoint) -> Result<C64> {
    let pts = [a, z, b, w];
    for i in 0..4 {
        for j in i + 1..4 {
            let same = match (pts[i], pts[j]) {
                (RiemannPoint::Infinity, RiemannPoint::Infinity) => true,
                (RiemannPoint::Finite(p), RiemannPoint::Finite(q)) => (p - q).norm() <= 1e-14 * (1.0 + p.norm()),
                _ => false,
            };
            if same {
                return Err(Error::DegenerateConfiguration(format!("points {i} and {j} coincide")));
            }
        }
    }
    use RiemannPoint::Finite as F;
    Ok(match (a, z, b, w) {
        (F(a), F(z), F(b), F(w)) => (a - b) * (z - w) / ((a - w) * (z - b)),
        (RiemannPoint::Infinity, F(z), F(b), F(w)) => (z - w) / (z - b),
        (F(a), RiemannPoint::Infinity, F(b), F(w)) => (a - b) / (a - w),
        (F(a), F(z), RiemannPoint::Infinity, F(w)) => (z - w) / (a - w),
        (F(a), F(z), F(b), RiemannPoint::Infinity) => (a - b) / (z - b),
        _ => unreachable!("at most one point is infinite"),
    })
}

/// Two-term approximation to the large eigenvalue of `diag(l, 1/l)^n * B` where
/// `B` has diagonal entries `a`, `d` and determinant one.
pub fn eigenvalue_asymptotic_mu_n(lambda: C64, a: C64, d: C64, n: u32) -> Result<C64> {
    if a.norm() == 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    let ln = lambda.powu(n);
    Ok(ln * a * (1.0 + (a * d - 1.0) / (ln * ln * a * a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn m(a: f64, b: f64, cc: f64, d: f64) -> MoebiusMap {
        MoebiusMap::from_real(a, b, cc, d).unwrap()
    }

    #[test]
    fn compose_and_inverse() {
        let x = m(2.0, 1.0, 1.0, 1.0);
        assert_eq!(MoebiusMap::IDENTITY.compose(&x), x);
        assert!(x.compose(&x.inverse()).distance_to_identity() < 1e-12);
        let p = MoebiusMap::diag(c(2.0, 0.0)).compose(&MoebiusMap::diag(c(3.0, 0.0)));
        assert!((p.a - 6.0).norm() < 1e-14 && (p.d - 1.0 / 6.0).norm() < 1e-14);
    }

    #[test]
    fn new_normalizes_determinant() {
        let x = MoebiusMap::new(c(2.0, 1.0), c(0.0, 3.0), c(1.0, 0.0), c(4.0, -1.0)).unwrap();
        assert!((x.det() - 1.0).norm() < 1e-12);
        assert!(MoebiusMap::from_real(1.0, 2.0, 2.0, 4.0).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(m(1.0, 1.0, 0.0, 1.0).classify(), IsometryClass::Parabolic);
        assert_eq!(m(2.0, 1.0, 1.0, 1.0).classify(), IsometryClass::Loxodromic);
        assert_eq!(MoebiusMap::rotation(2.0 * PI / 3.0).classify(), IsometryClass::Elliptic);
        assert_eq!(m(-1.0, 0.0, 0.0, -1.0).classify(), IsometryClass::Identity);
    }

    #[test]
    fn eigenvalues() {
        let (l, t) = MoebiusMap::diag(c(2.0, 0.0)).eigenvalue_and_trace().unwrap();
        assert!((l - 2.0).norm() < 1e-15 && (t - 2.5).norm() < 1e-15);
        let (l, t) = m(2.0, 1.0, 1.0, 1.0).eigenvalue_and_trace().unwrap();
        assert!((l - (3.0 + 5f64.sqrt()) / 2.0).norm() < 1e-14);
        assert!((l + l.inv() - t).norm() < 1e-12);
        let (_, t) = m(-2.0, -1.0, -1.0, -1.0).eigenvalue_and_trace().unwrap();
        assert!(t.re > 0.0);
        assert!(matches!(
            MoebiusMap::rotation(1.0).eigenvalue_and_trace(),
            Err(Error::NotLoxodromic(_))
        ));
    }

    #[test]
    fn lengths() {
        let l = MoebiusMap::diag(c(2.0, 0.0)).translation_length().unwrap();
        assert!((l - 2.0 * 2f64.ln()).abs() < 1e-15);
        let l = m(2.0, 1.0, 1.0, 1.0).translation_length().unwrap();
        assert!((l - 1.924847300238).abs() < 1e-11);
    }

    #[test]
    fn fixed_points_of_dilation() {
        let x = MoebiusMap::diag(c(2.0, 0.0));
        let (e, a) = x.fixed_points().unwrap();
        assert_eq!(e, RiemannPoint::Finite(c(0.0, 0.0)));
        assert_eq!(a, RiemannPoint::Infinity);
        let (e2, a2) = x.inverse().fixed_points().unwrap();
        assert_eq!((e2, a2), (a, e));
    }

    #[test]
    fn fixed_points_golden() {
        let x = m(2.0, 1.0, 1.0, 1.0);
        let (e, a) = x.fixed_points().unwrap();
        for p in [e, a] {
            let z = p.finite().unwrap();
            assert!((x.apply_c(z) - z).norm() < 1e-12);
        }
        let ze = e.finite().unwrap();
        assert!(x.derivative_norm(ze) > 1.0 && x.derivative_norm(a.finite().unwrap()) < 1.0);
        assert!((x.derivative_norm(ze).ln() - x.translation_length().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn apply_derivative() {
        let z = RiemannPoint::Finite(c(0.3, -0.7));
        let (w, dw) = MoebiusMap::IDENTITY.apply_and_derivative(z).unwrap();
        assert_eq!((w, dw), (z, c(1.0, 0.0)));
        let (w, dw) = MoebiusMap::diag(c(2.0, 0.0)).apply_and_derivative(c(1.0, 0.0).into()).unwrap();
        assert_eq!((w, dw), (RiemannPoint::Finite(c(4.0, 0.0)), c(4.0, 0.0)));
        let x = m(1.0, 0.0, 1.0, 1.0);
        assert!(matches!(x.apply_and_derivative(c(-1.0, 0.0).into()), Err(Error::DerivativeAtPole)));
        assert_eq!(x.apply(c(-1.0, 0.0).into()), RiemannPoint::Infinity);
        assert_eq!(x.apply(RiemannPoint::Infinity), RiemannPoint::Finite(c(1.0, 0.0)));
    }

    #[test]
    fn cross_ratio_values() {
        let f = |re: f64, im: f64| RiemannPoint::Finite(c(re, im));
        let inf = RiemannPoint::Infinity;
        let v = cross_ratio(f(0.0, 0.0), f(1.0, 0.0), inf, f(-1.0, 0.0)).unwrap();
        assert!((v - 2.0).norm() < 1e-15);
        let v = cross_ratio(f(0.0, 0.0), f(1.0, 0.0), inf, f(0.0, 1.0)).unwrap();
        assert!((v - c(1.0, 1.0)).norm() < 1e-15);
        let v = cross_ratio(f(0.1, 0.0), f(2.0, 0.0), f(-3.0, 0.0), f(7.0, 0.0)).unwrap();
        assert!(v.im.abs() < 1e-15);
        assert!(cross_ratio(f(1.0, 0.0), f(1.0, 0.0), inf, f(0.0, 1.0)).is_err());
    }

    #[test]
    fn displacement() {
        assert_eq!(MoebiusMap::IDENTITY.h3_displacement(), 0.0);
        let d = MoebiusMap::diag(c(2.0, 0.0)).h3_displacement();
        assert!((d - 2.0 * 2f64.ln()).abs() < 1e-12);
        let x = MoebiusMap::new(c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(0.0, 3.0)).unwrap();
        assert!((x.h3_displacement() - x.inverse().h3_displacement()).abs() < 1e-12);
    }

    #[test]
    fn continuation() {
        let fuchsian = vec![MoebiusMap::diag(c(2.0, 0.0)); 4];
        assert!(complex_length_continuation(&fuchsian).unwrap().iter().all(|l| l.im == 0.0));
        let path: Vec<_> = (0..=20)
            .map(|k| MoebiusMap::diag(C64::from_polar(2.0, (k as f64) * PI / 80.0)))
            .collect();
        let ls = complex_length_continuation(&path).unwrap();
        let end = ls.last().unwrap();
        assert!((end - c(4f64.ln(), PI / 2.0)).norm() < 1e-12);
        let jump = [MoebiusMap::diag(c(2.0, 0.0)), MoebiusMap::diag(c(0.0, 2.0))];
        assert!(matches!(complex_length_continuation(&jump), Err(Error::BranchAmbiguity { .. })));
    }

    #[test]
    fn asymptotic_exact_for_diagonal() {
        let mu = eigenvalue_asymptotic_mu_n(c(2.0, 0.0), c(3.0, 0.0), c(1.0 / 3.0, 0.0), 5).unwrap();
        assert!((mu - 96.0).norm() < 1e-12);
        assert!(matches!(
            eigenvalue_asymptotic_mu_n(c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), 3),
            Err(Error::ZeroDiagonal)
        ));
    }

    #[test]
    fn long_products_keep_unit_determinant() {
        let g = m(3.0, 2.0, 1.0, 1.0);
        let mut p = MoebiusMap::IDENTITY;
        for _ in 0..20 {
            p = p.compose(&g);
        }
        assert!(p.h3_displacement() > 20.0);
        let q = p.compose(&g.inverse());
        assert!(q.h3_displacement() > 20.0 && q.h3_displacement() < p.h3_displacement());
    }

}
