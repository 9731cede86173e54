use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{DeformationFamily, Tag, TangentVector};
use crate::mobius::C64;
use crate::thermo::{livsic_test, LivsicVerdict};

use super::engine::{level_spread, DirectionData, Estimate, MetricEngine, LEVELS};

/// Everything measured along one tangent vector.
#[derive(Clone, Debug, Serialize)]
pub struct MetricEvaluation {
    pub direction: TangentVector,
    pub level: usize,
    pub fd_step: f64,
    /// Level-`N` dimension at the basepoint.
    pub h: f64,
    /// Variance form; the error bar covers the form gap, the Richardson
    /// gap and the changes across the carried levels.
    pub w: Estimate,
    pub w_variance: f64,
    pub w_second: f64,
    pub form_gap: f64,
    pub w_level_gap: f64,
    pub g: Estimate,
    pub g_decomposed: f64,
    pub h1: Estimate,
    pub h2: Estimate,
    pub f1: Estimate,
    pub f2: Estimate,
    pub livsic: LivsicVerdict,
    #[serde(skip)]
    pub levels: [DirectionData; LEVELS],
}

/// Pressure-metric norm, `G`, and the derivatives of `h` and `F` along `v`.
pub fn evaluate_direction(engine: &MetricEngine, v: &TangentVector) -> Result<MetricEvaluation> {
    let levels = engine.direction_data(v)?;
    let top = &levels[LEVELS - 1];
    let across = |f: fn(&DirectionData) -> Estimate| Estimate::across_levels(&levels.each_ref().map(f));
    let form_gap = (top.w_variance - top.w_second).abs();
    let w_level_gap = level_spread(&levels.each_ref().map(|d| d.w_variance));
    let w = Estimate::new(top.w_variance, form_gap.max(top.w_fd_error).max(w_level_gap));
    let g = across(|d| d.g_direct);
    let livsic = livsic_test(
        top.phi_dot.iter().map(|s| (top.period, *s)),
        engine.cfg.fd_tolerance,
    );
    Ok(MetricEvaluation {
        direction: v.clone(),
        level: engine.level,
        fd_step: engine.cfg.fd_step,
        h: top.h,
        w,
        w_variance: top.w_variance,
        w_second: top.w_second,
        form_gap,
        w_level_gap,
        g,
        g_decomposed: top.g_decomposed,
        h1: across(|d| d.h1),
        h2: across(|d| d.h2),
        f1: across(|d| d.f1),
        f2: across(|d| d.f2),
        livsic,
        levels,
    })
}

/// `||v||_W^2` with its error bar.
pub fn pressure_metric_w(engine: &MetricEngine, v: &TangentVector) -> Result<Estimate> {
    Ok(evaluate_direction(engine, v)?.w)
}

/// `G(v, v) = (h F)''` with its error bar.
pub fn metric_g(engine: &MetricEngine, v: &TangentVector) -> Result<Estimate> {
    Ok(evaluate_direction(engine, v)?.g)
}

/// Comparison of `G` with `h W` from one evaluation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConformalCheck {
    pub g: f64,
    pub h_w: f64,
    pub relative_gap: f64,
    /// Combined error bar of `G` and `h W`.
    pub error: f64,
}

impl ConformalCheck {
    pub fn from_evaluation(e: &MetricEvaluation) -> ConformalCheck {
        let g = e.g.value;
        let h_w = e.h * e.w.value;
        let scale = g.abs().max(h_w.abs());
        let relative_gap = if scale > 0.0 { (g - h_w).abs() / scale } else { 0.0 };
        ConformalCheck { g, h_w, relative_gap, error: e.g.error + e.h * e.w.error }
    }

    /// `|G - h W| <= tol max(G, h W)` up to the combined error bar.
    pub fn within(&self, tol: f64) -> bool {
        (self.g - self.h_w).abs() <= tol * self.g.abs().max(self.h_w.abs()) + self.error
    }
}

pub fn conformal_equivalence_check(engine: &MetricEngine, v: &TangentVector) -> Result<ConformalCheck> {
    Ok(ConformalCheck::from_evaluation(&evaluate_direction(engine, v)?))
}

/// Rotate a tangent vector by the complex structure of the family: each
/// parameter moves to the one twisting along the same curve by `i` times
/// its coefficient.
pub fn complex_rotation(family: &DeformationFamily, v: &TangentVector) -> Result<TangentVector> {
    let dirs = family.directions();
    let mut out = vec![0.0; dirs.len()];
    for (i, &x) in v.direction.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let target = dirs[i].coefficient * C64::new(0.0, 1.0);
        let (j, sign) = dirs
            .iter()
            .enumerate()
            .filter(|(_, d)| d.curve == dirs[i].curve)
            .find_map(|(j, d)| {
                if (d.coefficient - target).norm() < 1e-12 {
                    Some((j, 1.0))
                } else if (d.coefficient + target).norm() < 1e-12 {
                    Some((j, -1.0))
                } else {
                    None
                }
            })
            .ok_or_else(|| Error::Config(format!("family has no rotated partner for `{}`", dirs[i].curve)))?;
        out[j] += sign * x;
    }
    let tag = match v.tag {
        Tag::Shear => Tag::Bend,
        Tag::Bend => Tag::Shear,
        Tag::Generic => Tag::Generic,
    };
    TangentVector::new(v.base.clone(), out, tag, format!("J({})", v.label))
}

/// `||w||_H^2 = h''(J w)` against `L''(w)` along a shear direction.
#[derive(Clone, Debug, Serialize)]
pub struct WpIdentity {
    pub label: String,
    pub h_metric: Estimate,
    pub length_second: Estimate,
    pub relative_gap: f64,
    /// `F''(J w)` for the antisymmetry check.
    pub rotated_length_second: Estimate,
    pub antisymmetry: f64,
}

impl WpIdentity {
    pub fn antisymmetric(&self) -> bool {
        self.antisymmetry <= self.length_second.error + self.rotated_length_second.error
    }
}

pub fn metric_h_and_wp_identity(engine: &MetricEngine, w: &TangentVector) -> Result<WpIdentity> {
    if w.tag != Tag::Shear {
        return Err(Error::Config(format!("`{}` is not a shear direction", w.label)));
    }
    let jw = complex_rotation(engine.family, w)?;
    let along_w = evaluate_direction(engine, w)?;
    let along_jw = evaluate_direction(engine, &jw)?;
    let h_metric = along_jw.h2;
    let length_second = along_w.f2;
    let scale = h_metric.value.abs().max(length_second.value.abs());
    Ok(WpIdentity {
        label: w.label.clone(),
        h_metric,
        length_second,
        relative_gap: if scale > 0.0 { (h_metric.value - length_second.value).abs() / scale } else { 0.0 },
        rotated_length_second: along_jw.f2,
        antisymmetry: (along_jw.f2.value + length_second.value).abs(),
    })
}

/// Null or non-null verdict for one direction.
#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyVerdict {
    pub label: String,
    pub tag: Tag,
    pub w: Estimate,
    pub null: bool,
    pub livsic: LivsicVerdict,
}

/// A direction is null when `W` is within three error bars of zero.
pub fn degeneracy_probe(engine: &MetricEngine, basis: &[TangentVector]) -> Result<Vec<DegeneracyVerdict>> {
    basis
        .iter()
        .map(|v| {
            let e = evaluate_direction(engine, v)?;
            Ok(DegeneracyVerdict {
                label: v.label.clone(),
                tag: v.tag,
                w: e.w,
                null: e.w.value <= 3.0 * e.w.error,
                livsic: e.livsic,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::build_bowen_series_partition;
    use crate::groups::build_regular_4g_gon_group;
    use crate::numerics::NumericsConfig;
    use crate::thermo::OrbitEnsemble;

    #[test]
    fn shear_is_positive_and_bend_is_null_on_the_fuchsian_locus() {
        let (pres, rho) = build_regular_4g_gon_group(2).unwrap();
        let coding = build_bowen_series_partition(&pres, &rho).unwrap();
        let ensemble = OrbitEnsemble::build(&coding, 4).unwrap();
        let family = DeformationFamily::twist_bend(&pres, &rho, "x1").unwrap();
        let cfg = NumericsConfig::default();
        let engine = MetricEngine::new(&family, &ensemble, &cfg, 1.0).unwrap();
        assert!((engine.anchored(&family.origin()).unwrap() - 1.0).abs() < 1e-12);

        let shear = family.tangent(0, &family.origin()).unwrap();
        let bend = family.tangent(1, &family.origin()).unwrap();
        assert_eq!(complex_rotation(&family, &shear).unwrap().tag, Tag::Bend);
        assert_eq!(complex_rotation(&family, &bend).unwrap().tag, Tag::Shear);

        let s = evaluate_direction(&engine, &shear).unwrap();
        assert!(s.w.exceeds(3.0), "{:?}", s.w);
        assert!((s.g.value - s.g_decomposed).abs() <= 1e-6 + 3.0 * s.g.error);
        assert!(!s.livsic.coboundary);

        let b = evaluate_direction(&engine, &bend).unwrap();
        assert!(b.w.value <= 3.0 * b.w.error, "{:?}", b.w);
        assert!(b.livsic.coboundary);

        let verdicts = degeneracy_probe(&engine, &[shear.clone(), bend]).unwrap();
        assert_eq!(verdicts.iter().map(|v| v.null).collect::<Vec<_>>(), [false, true]);
        assert!(metric_h_and_wp_identity(&engine, &shear).unwrap().antisymmetric());
    }
}
