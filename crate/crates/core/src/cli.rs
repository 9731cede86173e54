//! Run configurations and the `validate`, `dimension` and `metrics` commands.
//!
//! Commands write JSON reports (and CSV tables for `metrics`) into the
//! output directory and return a [`Outcome`]; [`exit_code`] maps results
//! onto the process exit status: 0 pass, 1 failed numerical check, 2 bad
//! input or construction failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coding::{coding_for, validate_coding, MarkovCoding};
use crate::error::{Error, Result};
use crate::groups::{enumerate_conjugacy_classes, ClassFilter, DeformationFamily, Group, GroupDocument, Tag};
use crate::metrics::{
    complex_rotation, cross_ratio_reality, evaluate_direction, hausdorff_path_scan, hessian_signature,
    length_derivative_scan, metric_h_and_wp_identity, shortest_classes, ConformalCheck, HessianQuantity,
    MetricEngine,
};
use crate::numerics::NumericsConfig;
use crate::thermo::{
    operator_dimension, orbit_dimension, Discretization, Engine, OperatorSettings, OrbitEnsemble, DEFAULT_BRACKET,
};

pub const SCHEMA: &str = "limitset-thermo/v1";

/// Orbit budget used to pick the default top period.
pub const ORBIT_BUDGET: f64 = 150_000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Operator,
    Orbit,
    Both,
}

impl EngineChoice {
    fn includes(self, e: Engine) -> bool {
        matches!(
            (self, e),
            (EngineChoice::Both, _) | (EngineChoice::Operator, Engine::Operator) | (EngineChoice::Orbit, Engine::Orbit)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationSettings {
    /// Random geodesics for the boundary-invariance sampling.
    pub samples: usize,
    /// Iterates for the expansion profile.
    pub depth: usize,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        ValidationSettings { samples: 1000, depth: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathSettings {
    pub max_tau: f64,
    pub points: usize,
}

impl Default for PathSettings {
    fn default() -> Self {
        PathSettings { max_tau: 0.2, points: 21 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSettings {
    /// Curves of the family; each contributes a shear and a bend parameter.
    pub curves: Vec<String>,
    /// Basepoint in family parameters, ordered shear, bend per curve.
    pub base: Option<Vec<f64>>,
    pub path: PathSettings,
    /// Number of shortest classes in the length-derivative scans.
    pub classes: usize,
    pub class_max_len: usize,
    /// Hessian signatures on the full chart; on by default at fuchsian bases.
    pub hessian: Option<bool>,
    /// Relative tolerance of `|G - h W|`; 0.05 at fuchsian bases, 0.10 elsewhere by default.
    pub conformal_tolerance: Option<f64>,
    /// Relative tolerance of `|H - L''|`.
    pub wp_tolerance: f64,
    pub cross_ratio_samples: usize,
}

impl Default for MetricsSettings {
    fn default() -> Self {
        MetricsSettings {
            curves: vec!["x1".into(), "x2".into()],
            base: None,
            path: PathSettings::default(),
            classes: 100,
            class_max_len: 4,
            hessian: None,
            conformal_tolerance: None,
            wp_tolerance: 0.10,
            cross_ratio_samples: 100,
        }
    }
}

/// Everything a command needs; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_file: Option<PathBuf>,
    #[serde(default = "default_engine")]
    pub engine: EngineChoice,
    /// Starting operator resolution: cylinder depth, or Chebyshev nodes per
    /// cell for interval codings.
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub validation: ValidationSettings,
    #[serde(default)]
    pub metrics: MetricsSettings,
}

fn default_engine() -> EngineChoice {
    EngineChoice::Operator
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: SCHEMA.into(),
            group: Some(Group::surface(2).expect("genus 2 builds").to_document()),
            group_file: None,
            engine: default_engine(),
            depth: None,
            n_max: None,
            numerics: NumericsConfig::default(),
            seed: 0,
            workers: None,
            out: None,
            validation: ValidationSettings::default(),
            metrics: MetricsSettings::default(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub engine: Option<EngineChoice>,
    pub depth: Option<usize>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub genus: Option<usize>,
}

fn check_range<T: PartialOrd + std::fmt::Display>(name: &str, v: T, lo: T, hi: T) -> Result<()> {
    if v < lo || v > hi {
        return Err(Error::Config(format!("`{name}` = {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        if cfg.schema != SCHEMA {
            return Err(Error::Config(format!("schema `{}`, expected `{SCHEMA}`", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let mut cfg = RunConfig::from_json(&fs::read_to_string(path)?)?;
        if let Some(f) = &cfg.group_file {
            if f.is_relative() {
                cfg.group_file = Some(path.parent().unwrap_or(Path::new(".")).join(f));
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(g) = o.genus {
            self.group = Some(GroupDocument { kind: crate::groups::GroupKind::Surface, genus: Some(g), circles: None, generators: None });
            self.group_file = None;
        }
        self.engine = o.engine.unwrap_or(self.engine);
        self.depth = o.depth.or(self.depth);
        self.n_max = o.n_max.or(self.n_max);
        self.out = o.out.clone().or(self.out.take());
        self.seed = o.seed.unwrap_or(self.seed);
    }

    pub fn validate(&self) -> Result<()> {
        self.numerics.validate()?;
        if let Some(d) = self.depth {
            check_range("depth", d, 1, 64)?;
        }
        if let Some(n) = self.n_max {
            check_range("n_max", n, 4, 16)?;
        }
        if let Some(w) = self.workers {
            check_range("workers", w, 1, 256)?;
        }
        check_range("validation.samples", self.validation.samples, 1, 1_000_000)?;
        check_range("validation.depth", self.validation.depth, 1, 8)?;
        let m = &self.metrics;
        if m.curves.is_empty() {
            return Err(Error::Config("`metrics.curves` is empty".into()));
        }
        check_range("metrics.path.max_tau", m.path.max_tau, 1e-6, crate::groups::MAX_PARAMETER)?;
        check_range("metrics.path.points", m.path.points, 3, 401)?;
        check_range("metrics.classes", m.classes, 1, 10_000)?;
        check_range("metrics.class_max_len", m.class_max_len, 1, 8)?;
        check_range("metrics.wp_tolerance", m.wp_tolerance, 0.0, 1.0)?;
        check_range("metrics.cross_ratio_samples", m.cross_ratio_samples, 1, 100_000)?;
        if let Some(t) = m.conformal_tolerance {
            check_range("metrics.conformal_tolerance", t, 0.0, 1.0)?;
        }
        if let Some(b) = &m.base {
            if b.len() != 2 * m.curves.len() {
                return Err(Error::Config(format!("`metrics.base` needs {} entries", 2 * m.curves.len())));
            }
        }
        match (&self.group, &self.group_file) {
            (Some(_), Some(_)) => Err(Error::Config("give `group` or `group_file`, not both".into())),
            (None, None) => Err(Error::Config("no group given".into())),
            _ => Ok(()),
        }
    }

    /// Reads the group file into `group`, so reports carry the full input.
    pub fn resolve_group(&mut self) -> Result<Group> {
        if let Some(f) = &self.group_file {
            let text = fs::read_to_string(f)?;
            self.group = Some(serde_json::from_str(&text)?);
        }
        let doc = self.group.as_ref().ok_or_else(|| Error::Config("no group given".into()))?;
        Group::from_document(doc)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Largest period whose orbit count stays within [`ORBIT_BUDGET`].
pub fn default_n_max(coding: &MarkovCoding) -> usize {
    let rho = coding.transitions.spectral_radius();
    (4..=14).take_while(|&n| rho.powi(n as i32) / n as f64 <= ORBIT_BUDGET).last().unwrap_or(4)
}

fn operator_settings(coding: &MarkovCoding, depth: Option<usize>) -> OperatorSettings {
    let mut s = OperatorSettings::for_coding(coding);
    if let Some(d) = depth {
        s.start = match s.start {
            Discretization::Collocation { .. } => Discretization::Collocation { nodes: d },
            Discretization::Cylinders { .. } => Discretization::Cylinders { depth: d },
        };
    }
    s
}

/// Result of a command that ran to completion.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

pub fn exit_code(r: &Result<Outcome>) -> i32 {
    match r {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(e) if e.is_numerical() => 1,
        Err(_) => 2,
    }
}

/// Writes `contents` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `%.12e` formatting: twelve mantissa digits, signed exponent of at least two digits.
pub fn format_e12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub enum CsvCell {
    Num(f64),
    Text(String),
}

pub fn csv_table(header: &[&str], rows: &[Vec<CsvCell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .map(|c| match c {
                CsvCell::Num(x) => format_e12(*x),
                CsvCell::Text(t) => t.clone(),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    write_atomic(path, &text)
}

fn prepare(cfg: &mut RunConfig) -> Result<(Group, MarkovCoding)> {
    cfg.validate()?;
    let group = cfg.resolve_group()?;
    let coding = coding_for(&group)?;
    Ok((group, coding))
}

/// Builds the group and its coding and checks the coding's defining properties.
pub fn cmd_validate(mut cfg: RunConfig) -> Result<Outcome> {
    let (group, coding) = prepare(&mut cfg)?;
    let report = validate_coding(&coding, cfg.validation.depth, cfg.validation.samples, cfg.seed)?;
    let residual = group.residual();
    let passed = report.passed && residual <= 1e-9;
    let path = cfg.out_dir().join("validate.json");
    write_json(
        &path,
        &json!({
            "schema": SCHEMA,
            "config": cfg,
            "group_ref": group.label(),
            "relator_residual": residual,
            "report": report,
            "passed": passed,
        }),
    )?;
    Ok(Outcome { passed, files: vec![path] })
}

/// Dimension by the requested engines; with both, also their agreement.
pub fn cmd_dimension(mut cfg: RunConfig) -> Result<Outcome> {
    let (group, coding) = prepare(&mut cfg)?;
    let mut records = Vec::new();
    let mut values = Vec::new();
    if cfg.engine.includes(Engine::Operator) {
        let t = Instant::now();
        let (r, steps) = operator_dimension(&coding, &operator_settings(&coding, cfg.depth), &cfg.numerics)?;
        let ms = t.elapsed().as_secs_f64() * 1e3;
        values.push((r.s_star, 0.0));
        records.push(json!({
            "engine": r.engine,
            "s_star": r.s_star,
            "residual_or_gap": r.residual,
            "depth_or_Nmax": r.resolution,
            "group_ref": group.label(),
            "timing_ms": ms,
            "scheme": r.scheme,
            "refinements": steps,
        }));
    }
    if cfg.engine.includes(Engine::Orbit) {
        let n_max = cfg.n_max.unwrap_or_else(|| default_n_max(&coding));
        cfg.n_max = Some(n_max);
        let t = Instant::now();
        let ensemble = OrbitEnsemble::build(&coding, n_max)?;
        let r = orbit_dimension(&ensemble.base_spectrum(), DEFAULT_BRACKET)?;
        let ms = t.elapsed().as_secs_f64() * 1e3;
        values.push((r.s_star, r.error_estimate));
        records.push(json!({
            "engine": r.engine,
            "s_star": r.s_star,
            "residual_or_gap": r.error_estimate,
            "depth_or_Nmax": r.resolution,
            "group_ref": group.label(),
            "timing_ms": ms,
        }));
    }
    let (agreement, tolerance) = match values.as_slice() {
        [(a, _), (b, gap)] => (Some((a - b).abs()), Some(5e-3f64.max(3.0 * gap))),
        _ => (None, None),
    };
    let passed = match (agreement, tolerance) {
        (Some(a), Some(t)) => a <= t,
        _ => true,
    };
    let path = cfg.out_dir().join("dimension.json");
    write_json(
        &path,
        &json!({
            "schema": SCHEMA,
            "config": cfg,
            "results": records,
            "agreement": agreement,
            "agreement_tolerance": tolerance,
            "passed": passed,
        }),
    )?;
    Ok(Outcome { passed, files: vec![path] })
}

fn tag_name(t: Tag) -> &'static str {
    match t {
        Tag::Shear => "shear",
        Tag::Bend => "bend",
        Tag::Generic => "generic",
    }
}

/// Metric report on a surface-group deformation family.
pub fn cmd_metrics_report(mut cfg: RunConfig) -> Result<Outcome> {
    let (group, coding) = prepare(&mut cfg)?;
    let Group::Surface { presentation, rho } = &group else {
        return Err(Error::Config("metrics need a surface group".into()));
    };
    let m = cfg.metrics.clone();
    let dirs: Vec<(&str, Tag)> =
        m.curves.iter().flat_map(|c| [(c.as_str(), Tag::Shear), (c.as_str(), Tag::Bend)]).collect();
    let family = DeformationFamily::new(presentation, rho, &dirs)?;
    let base = m.base.clone().unwrap_or_else(|| family.origin());
    let fuchsian = base.iter().zip(&dirs).all(|(b, (_, t))| *t != Tag::Bend || *b == 0.0);
    let n_max = cfg.n_max.unwrap_or_else(|| default_n_max(&coding));
    cfg.n_max = Some(n_max);
    let ensemble = OrbitEnsemble::build(&coding, n_max)?;
    let reference = if cfg.engine == EngineChoice::Orbit {
        ensemble.base_spectrum().top().dimension(DEFAULT_BRACKET)?
    } else {
        operator_dimension(&coding, &operator_settings(&coding, cfg.depth), &cfg.numerics)?.0.s_star
    };
    let engine = MetricEngine::new(&family, &ensemble, &cfg.numerics, reference)?;
    let out = cfg.out_dir();
    let mut files = Vec::new();
    let mut passed = true;
    let conformal_tol = m.conformal_tolerance.unwrap_or(if fuchsian { 0.05 } else { 0.10 });

    let tangents = (0..family.dim()).map(|i| family.tangent(i, &base)).collect::<Result<Vec<_>>>()?;
    let mut direction_reports = Vec::new();
    for v in &tangents {
        let e = evaluate_direction(&engine, v)?;
        let conformal = ConformalCheck::from_evaluation(&e);
        let conformal_ok = conformal.within(conformal_tol);
        let forms_agree = e.form_gap <= e.w.error;
        let decomposition_ok = (e.g.value - e.g_decomposed).abs() <= e.g.error + 1e-9 * e.g.value.abs();
        let nonnegative = e.w.value >= -e.w.error && e.g.value >= -e.g.error;
        passed &= conformal_ok && forms_agree && decomposition_ok && nonnegative;
        let d = &family.directions()[v.direction.iter().position(|x| *x != 0.0).unwrap_or(0)];
        direction_reports.push(json!({
            "direction": {"curve": d.curve, "tag": v.tag, "label": v.label},
            "W": {"value": e.w.value, "err": e.w.error, "form_gap": e.form_gap,
                  "variance_form": e.w_variance, "second_derivative_form": e.w_second, "level_gap": e.w_level_gap},
            "G": {"value": e.g.value, "err": e.g.error, "decomposed": e.g_decomposed},
            "h": e.h,
            "h_first": e.h1,
            "h_second": e.h2,
            "F_first": e.f1,
            "F_second": e.f2,
            "verdicts": {
                "null": e.w.value <= 3.0 * e.w.error,
                "conformal_gap": conformal.relative_gap,
                "conformal_ok": conformal_ok,
                "forms_agree": forms_agree,
                "decomposition_ok": decomposition_ok,
                "nonnegative": nonnegative,
                "livsic": e.livsic,
            },
        }));
    }

    let mut wp = Vec::new();
    if fuchsian {
        for v in tangents.iter().filter(|v| v.tag == Tag::Shear) {
            let id = metric_h_and_wp_identity(&engine, v)?;
            let ok = id.relative_gap <= m.wp_tolerance && id.antisymmetric();
            passed &= ok;
            wp.push(json!({"identity": id, "passed": ok}));
        }
    }

    let mut hessians = serde_json::Map::new();
    if m.hessian.unwrap_or(fuchsian) {
        for (key, q) in [("h", HessianQuantity::Dimension), ("hF", HessianQuantity::DimensionTimesLength)] {
            match hessian_signature(&engine, &tangents, q) {
                Ok(h) => {
                    hessians.insert(key.into(), serde_json::to_value(&h)?);
                }
                Err(e @ Error::NotCritical { .. }) => {
                    passed = false;
                    hessians.insert(key.into(), json!({"error": e.to_string()}));
                }
                Err(e) => return Err(e),
            }
        }
    }

    let taus: Vec<f64> = (0..m.path.points)
        .map(|i| -m.path.max_tau + 2.0 * m.path.max_tau * i as f64 / (m.path.points - 1) as f64)
        .collect();
    let mut scans = Vec::new();
    for v in &tangents {
        let stem = v.label.replace(':', "_");
        let mut engines = vec![];
        if cfg.engine.includes(Engine::Orbit) || !(fuchsian && v.tag == Tag::Shear) {
            engines.push(Engine::Orbit);
        }
        if cfg.engine.includes(Engine::Operator) && fuchsian && v.tag == Tag::Shear {
            engines.push(Engine::Operator);
        }
        for which in engines {
            let scan = hausdorff_path_scan(&engine, v, &taus, which)?;
            let name = format!("scan_{stem}_{}.csv", serde_json::to_value(which)?.as_str().unwrap_or("engine"));
            let rows: Vec<Vec<CsvCell>> =
                scan.rows().iter().map(|r| r.iter().map(|x| CsvCell::Num(*x)).collect()).collect();
            let path = out.join(&name);
            write_atomic(&path, &csv_table(&["tau", "h", "F", "hF"], &rows))?;
            files.push(path);
            scans.push(json!({"label": v.label, "engine": which, "file": name,
                              "refinement_flag": scan.refinement_flag,
                              "max_error": scan.samples.iter().map(|s| s.error).fold(0.0, f64::max)}));
        }
    }

    let base_rho = family.evaluate(&base)?;
    let all = enumerate_conjugacy_classes(rho.rank(), Some(rho), m.class_max_len, ClassFilter { primitive_only: true });
    let classes = shortest_classes(&base_rho, &all, m.classes)?;
    let mut length_scans = Vec::new();
    for v in &tangents {
        let scan = length_derivative_scan(&engine, v, &classes)?;
        let name = format!("lengths_{}.csv", v.label.replace(':', "_"));
        let rows: Vec<Vec<CsvCell>> = scan
            .rows
            .iter()
            .map(|r| {
                vec![
                    CsvCell::Text(r.word.clone()),
                    CsvCell::Num(r.length),
                    CsvCell::Num(r.hl_dot),
                    CsvCell::Num(r.l_dot),
                    CsvCell::Num(scan.k_hat),
                    CsvCell::Num(r.residual),
                    CsvCell::Num(r.lambda_ratio),
                ]
            })
            .collect();
        let path = out.join(&name);
        write_atomic(
            &path,
            &csv_table(&["word", "length", "hL_dot", "L_dot", "k_hat", "residual", "re_lambda_ratio"], &rows),
        )?;
        files.push(path);
        length_scans.push(json!({
            "label": v.label,
            "file": name,
            "k_hat": scan.k_hat,
            "max_hL_dot": scan.max_abs(|r| r.hl_dot),
            "max_L_dot": scan.max_abs(|r| r.l_dot),
            "max_residual": scan.max_abs(|r| r.residual),
            "max_re_lambda_ratio": scan.max_abs(|r| r.lambda_ratio),
            "skipped": scan.skipped,
        }));
    }

    let cross = if fuchsian {
        Some(cross_ratio_reality(&base_rho, &classes, m.cross_ratio_samples, cfg.seed)?)
    } else {
        None
    };
    let rotated: Vec<String> = tangents
        .iter()
        .filter(|v| v.tag == Tag::Shear)
        .map(|v| complex_rotation(&family, v).map(|j| j.label))
        .collect::<Result<_>>()?;

    let path = out.join("metrics.json");
    write_json(
        &path,
        &json!({
            "schema": SCHEMA,
            "config": cfg,
            "base": {"family": {"group_ref": group.label(), "curves": m.curves,
                                "parameters": dirs.iter().map(|(c, t)| format!("{c}:{}", tag_name(*t))).collect::<Vec<_>>()},
                     "tau": base, "fuchsian": fuchsian},
            "level": n_max,
            "h_reference": reference,
            "conformal_tolerance": conformal_tol,
            "directions": direction_reports,
            "wp_identity": wp,
            "rotated_partners": rotated,
            "hessian": hessians,
            "path_scans": scans,
            "length_scans": length_scans,
            "cross_ratio": cross,
            "passed": passed,
        }),
    )?;
    files.insert(0, path);
    Ok(Outcome { passed, files })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Dimension,
    Metrics,
}

/// Loads the config, applies overrides and runs `command` on a worker pool
/// of the configured size.
pub fn run(command: Command, config: Option<&Path>, overrides: &Overrides) -> Result<Outcome> {
    let mut cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(overrides);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| match command {
        Command::Validate => cmd_validate(cfg),
        Command::Dimension => cmd_dimension(cfg),
        Command::Metrics => cmd_metrics_report(cfg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponents() {
        assert_eq!(format_e12(1.0), "1.000000000000e+00");
        assert_eq!(format_e12(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(format_e12(6.02e123), "6.020000000000e+123");
        assert_eq!(format_e12(0.0), "0.000000000000e+00");
    }

    #[test]
    fn unknown_keys_and_wrong_schema_rejected() {
        assert!(RunConfig::from_json(r#"{"schema": "limitset-thermo/v1", "nmax": 3}"#).is_err());
        assert!(RunConfig::from_json(r#"{"schema": "limitset-thermo/v0"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"schema": "limitset-thermo/v1", "metrics": {"curve": ["x1"]}}"#).is_err());
        let c = RunConfig::from_json(r#"{"schema": "limitset-thermo/v1", "group": {"kind": "surface", "genus": 2}}"#)
            .unwrap();
        c.validate().unwrap();
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = RunConfig::default();
        c.apply(&Overrides { n_max: Some(5), seed: Some(9), engine: Some(EngineChoice::Both), ..Default::default() });
        assert_eq!((c.n_max, c.seed, c.engine), (Some(5), 9, EngineChoice::Both));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(Outcome { passed: true, files: vec![] })), 0);
        assert_eq!(exit_code(&Ok(Outcome { passed: false, files: vec![] })), 1);
        assert_eq!(exit_code(&Err(Error::NoSpectralGap(1.0))), 1);
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), 2);
    }
}
