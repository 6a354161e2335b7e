//! Config parsing and the batch runner behind `tsdiag`.
//!
//! Config files hold `key = value` lines with `#` comments. Global keys come
//! first; `[plus]` and `[minus]` sections describe the tempering on each
//! side. Unknown keys are errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::density::Inverter;
use crate::diagnostics::{
    class_l_curve, conv_equiv_dist_curve, conv_equiv_nu1_curve, corollary_tail_curve,
    gamma_counterexample_curve, run_full_report, LawUnderTest, RatioCurve, ReportConfig, Subject,
    Verdict,
};
use crate::error::{Error, Result};
use crate::levy::{Side, TSAlphaSpec};
use crate::quadrature::{linspace, logspace};
use crate::tempering::{weibull_sf, TemperingFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    EvalTempering,
    Density,
    Tails,
    Convcheck,
    Report,
}

impl Command {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "eval-tempering" => Command::EvalTempering,
            "density" => Command::Density,
            "tails" => Command::Tails,
            "convcheck" => Command::Convcheck,
            "report" => Command::Report,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::EvalTempering => "eval-tempering",
            Command::Density => "density",
            Command::Tails => "tails",
            Command::Convcheck => "convcheck",
            Command::Report => "report",
        }
    }
}

/// Tempering of one side as written in the config.
#[derive(Debug, Clone, PartialEq)]
pub enum TemperingConfig {
    Exponential { theta: f64 },
    Kr { p: f64, r: f64 },
    Gtgs { theta: f64, lambda: f64, gamma_ml: f64 },
    /// Not completely monotone; accepted by the parser so that the
    /// rejection comes from the tempering screen.
    Weibull { k: f64, scale: f64 },
}

impl TemperingConfig {
    fn build(&self, alpha: f64) -> Result<TemperingFunction> {
        match *self {
            TemperingConfig::Exponential { theta } => TemperingFunction::exponential(theta),
            TemperingConfig::Kr { p, r } => TemperingFunction::kr(alpha, p, r),
            TemperingConfig::Gtgs { theta, lambda, gamma_ml } => {
                TemperingFunction::gtgs(theta, lambda, gamma_ml)
            }
            TemperingConfig::Weibull { k, scale } => {
                let w = weibull_sf(k, scale);
                TemperingFunction::screened("weibull", w.0, 0.0)
            }
        }
    }

    fn echo(&self) -> String {
        match *self {
            TemperingConfig::Exponential { theta } => format!("kind = exponential, theta = {theta}"),
            TemperingConfig::Kr { p, r } => format!("kind = kr, p = {p}, r = {r}"),
            TemperingConfig::Gtgs { theta, lambda, gamma_ml } => {
                format!("kind = gtgs, theta = {theta}, lambda = {lambda}, gamma_ml = {gamma_ml}")
            }
            TemperingConfig::Weibull { k, scale } => format!("kind = weibull, k = {k}, scale = {scale}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub drift_b: f64,
    pub plus: Option<TemperingConfig>,
    pub minus: Option<TemperingConfig>,
    pub subject: Subject,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub log_spacing: bool,
    /// Accuracy requested from each point evaluation.
    pub tol: f64,
    /// Translation used by the class-L curve and the tempering ratio.
    pub y: f64,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Report,
            alpha: f64::NAN,
            delta_plus: 0.0,
            delta_minus: 0.0,
            drift_b: 0.0,
            plus: None,
            minus: None,
            subject: Subject::TsAlpha,
            x_min: 10.0,
            x_max: 1000.0,
            n_points: 13,
            log_spacing: true,
            tol: 1e-8,
            y: 1.0,
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn xs(&self) -> Vec<f64> {
        if self.log_spacing {
            logspace(self.x_min, self.x_max, self.n_points)
        } else {
            linspace(self.x_min, self.x_max, self.n_points)
        }
    }

    /// Builds the law; tempering screens run here.
    pub fn build_spec(&self) -> Result<TSAlphaSpec> {
        let side = |t: &Option<TemperingConfig>, d: f64, name: &str| -> Result<TemperingFunction> {
            match t {
                Some(t) => t.build(self.alpha).map_err(|e| match e {
                    Error::NotCompletelyMonotone { .. } | Error::NotProper { .. } => {
                        Error::Validation(format!("[{name}] tempering rejected: {e}"))
                    }
                    e => e,
                }),
                // unused when d = 0
                None if d == 0.0 => TemperingFunction::exponential(1.0),
                None => Err(Error::Validation(format!("delta_{name} > 0 needs a [{name}] section"))),
            }
        };
        let qp = side(&self.plus, self.delta_plus, "plus")?;
        let qm = side(&self.minus, self.delta_minus, "minus")?;
        TSAlphaSpec::new(self.alpha, self.delta_plus, self.delta_minus, qp, qm, self.drift_b)
    }

    /// Canonical listing of every field, defaults included.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let subject = match self.subject {
            Subject::TsAlpha => "tsalpha".to_string(),
            Subject::ExponentialControl { lambda } => format!("exponential_control, control_lambda = {lambda}"),
            Subject::GammaControl { a, rate } => {
                format!("gamma_control, control_a = {a}, control_rate = {rate}")
            }
        };
        let _ = writeln!(s, "command = {}", self.command.name());
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "delta_plus = {}", self.delta_plus);
        let _ = writeln!(s, "delta_minus = {}", self.delta_minus);
        let _ = writeln!(s, "drift_b = {}", self.drift_b);
        let _ = writeln!(s, "subject = {subject}");
        let _ = writeln!(s, "x_min = {}", self.x_min);
        let _ = writeln!(s, "x_max = {}", self.x_max);
        let _ = writeln!(s, "n_points = {}", self.n_points);
        let _ = writeln!(s, "log_spacing = {}", self.log_spacing);
        let _ = writeln!(s, "tol = {:e}", self.tol);
        let _ = writeln!(s, "y = {}", self.y);
        for (name, t) in [("plus", &self.plus), ("minus", &self.minus)] {
            if let Some(t) = t {
                let _ = writeln!(s, "[{name}] {}", t.echo());
            }
        }
        s
    }
}

#[derive(Default)]
struct Section {
    line: usize,
    kind: Option<(usize, String)>,
    values: Vec<(usize, String, f64)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<f64> {
        let i = self.values.iter().position(|(_, k, _)| k == key)?;
        Some(self.values.remove(i).2)
    }

    fn finish(mut self, name: &str) -> Result<TemperingConfig> {
        let (kline, kind) = self.kind.clone().ok_or(Error::Parse {
            line: self.line,
            reason: format!("section [{name}] needs a `kind`"),
        })?;
        let need = |s: &mut Section, key: &str| {
            s.take(key).ok_or(Error::Parse {
                line: kline,
                reason: format!("kind {kind} needs `{key}`"),
            })
        };
        let t = match kind.as_str() {
            "exponential" => TemperingConfig::Exponential { theta: need(&mut self, "theta")? },
            "kr" => TemperingConfig::Kr {
                p: need(&mut self, "p")?,
                r: need(&mut self, "r")?,
            },
            "gtgs" => TemperingConfig::Gtgs {
                theta: need(&mut self, "theta")?,
                lambda: self.take("lambda").unwrap_or(1.0),
                gamma_ml: need(&mut self, "gamma_ml")?,
            },
            "weibull" => TemperingConfig::Weibull {
                k: need(&mut self, "k")?,
                scale: self.take("scale").unwrap_or(1.0),
            },
            other => {
                return Err(Error::Parse {
                    line: kline,
                    reason: format!("unknown tempering kind `{other}` (expected exponential, kr, gtgs or weibull)"),
                })
            }
        };
        if let Some((line, key, _)) = self.values.first() {
            return Err(Error::Parse {
                line: *line,
                reason: format!("key `{key}` does not apply to kind {kind}"),
            });
        }
        Ok(t)
    }
}

const SECTION_KEYS: [&str; 7] = ["theta", "p", "r", "lambda", "gamma_ml", "k", "scale"];

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| Error::Parse {
        line,
        reason: format!("`{key}` expects a number, got `{v}`"),
    })
}

/// Parses and validates a config file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut alpha_line = None;
    let mut seen: Vec<String> = Vec::new();
    let mut sections: [Option<Section>; 2] = [None, None];
    let mut current: Option<usize> = None;
    let mut delta_set = [false, false];
    let mut control_lambda = None;
    let mut control_a = None;
    let mut control_rate = None;
    let mut subject_name = None;
    let mut line_of = std::collections::HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let idx = match name.trim() {
                "plus" => 0,
                "minus" => 1,
                other => {
                    return Err(Error::Parse {
                        line,
                        reason: format!("unknown section [{other}] (expected [plus] or [minus])"),
                    })
                }
            };
            if sections[idx].is_some() {
                return Err(Error::Parse { line, reason: format!("section [{}] repeated", name.trim()) });
            }
            sections[idx] = Some(Section { line, ..Default::default() });
            current = Some(idx);
            continue;
        }
        let (key, value) = body.split_once('=').ok_or(Error::Parse {
            line,
            reason: format!("expected `key = value`, got `{body}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(idx) = current {
            let sec = sections[idx].as_mut().unwrap();
            if key == "kind" {
                if sec.kind.is_some() {
                    return Err(Error::Parse { line, reason: "key `kind` repeated".into() });
                }
                sec.kind = Some((line, value.to_string()));
            } else if SECTION_KEYS.contains(&key) {
                if sec.values.iter().any(|(_, k, _)| k == key) {
                    return Err(Error::Parse { line, reason: format!("key `{key}` repeated") });
                }
                let v = parse_f64(line, key, value)?;
                sec.values.push((line, key.to_string(), v));
            } else {
                return Err(Error::Parse { line, reason: format!("unknown key `{key}` in a tempering section") });
            }
            continue;
        }
        if seen.iter().any(|k| k == key) {
            return Err(Error::Parse { line, reason: format!("key `{key}` repeated") });
        }
        seen.push(key.to_string());
        line_of.insert(key.to_string(), line);
        let num = || parse_f64(line, key, value);
        match key {
            "command" => {
                cfg.command = Command::parse(value).ok_or(Error::Parse {
                    line,
                    reason: format!(
                        "unknown command `{value}` (expected eval-tempering, density, tails, convcheck or report)"
                    ),
                })?
            }
            "alpha" => {
                cfg.alpha = num()?;
                alpha_line = Some(line);
            }
            "delta_plus" => {
                cfg.delta_plus = num()?;
                delta_set[0] = true;
            }
            "delta_minus" => {
                cfg.delta_minus = num()?;
                delta_set[1] = true;
            }
            "drift_b" => cfg.drift_b = num()?,
            "subject" => subject_name = Some((line, value.to_string())),
            "control_lambda" => control_lambda = Some(num()?),
            "control_a" => control_a = Some(num()?),
            "control_rate" => control_rate = Some(num()?),
            "x_min" => cfg.x_min = num()?,
            "x_max" => cfg.x_max = num()?,
            "n_points" => {
                cfg.n_points = value.parse().map_err(|_| Error::Parse {
                    line,
                    reason: format!("`n_points` expects a positive integer, got `{value}`"),
                })?
            }
            "log_spacing" => {
                cfg.log_spacing = match value {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(Error::Parse {
                            line,
                            reason: format!("`log_spacing` expects true or false, got `{value}`"),
                        })
                    }
                }
            }
            "tol" => cfg.tol = num()?,
            "y" => cfg.y = num()?,
            "output_path" => cfg.output_path = Some(PathBuf::from(value)),
            _ => return Err(Error::Parse { line, reason: format!("unknown key `{key}`") }),
        }
    }

    let [plus, minus] = sections;
    for (idx, sec) in [plus, minus].into_iter().enumerate() {
        let name = if idx == 0 { "plus" } else { "minus" };
        if let Some(sec) = sec {
            let t = sec.finish(name)?;
            if idx == 0 {
                cfg.plus = Some(t);
                if !delta_set[0] {
                    cfg.delta_plus = 1.0;
                }
            } else {
                cfg.minus = Some(t);
                if !delta_set[1] {
                    cfg.delta_minus = 1.0;
                }
            }
        }
    }

    let invalid = |key: &str, reason: String| -> Error {
        match line_of.get(key) {
            Some(&line) => Error::Parse { line, reason },
            None => Error::Validation(reason),
        }
    };

    if let Some((line, name)) = subject_name {
        cfg.subject = match name.as_str() {
            "tsalpha" => Subject::TsAlpha,
            "exponential_control" => Subject::ExponentialControl { lambda: control_lambda.unwrap_or(1.0) },
            "gamma_control" => Subject::GammaControl {
                a: control_a.unwrap_or(2.0),
                rate: control_rate.unwrap_or(1.0),
            },
            other => {
                return Err(Error::Parse {
                    line,
                    reason: format!("unknown subject `{other}` (expected tsalpha, exponential_control or gamma_control)"),
                })
            }
        };
    }
    let control_keys_used = control_lambda.is_some() || control_a.is_some() || control_rate.is_some();
    match cfg.subject {
        Subject::TsAlpha if control_keys_used => {
            return Err(Error::Validation("control_* keys need a control subject".into()))
        }
        Subject::ExponentialControl { lambda } if !(lambda > 0.0) => {
            return Err(invalid("control_lambda", format!("control_lambda must be > 0, got {lambda}")))
        }
        Subject::GammaControl { a, rate } if !(a > 0.0 && a != 1.0 && rate > 0.0) => {
            return Err(Error::Validation(format!(
                "gamma control needs a > 0, a != 1 and rate > 0, got a = {a}, rate = {rate}"
            )))
        }
        _ => {}
    }

    match alpha_line {
        None => return Err(Error::Validation("missing required key `alpha`".into())),
        Some(line) if !(cfg.alpha > 0.0 && cfg.alpha < 2.0) => {
            return Err(Error::Parse {
                line,
                reason: "alpha must lie strictly inside (0,2)".into(),
            })
        }
        _ => {}
    }
    for (key, d) in [("delta_plus", cfg.delta_plus), ("delta_minus", cfg.delta_minus)] {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(invalid(key, format!("{key} must be finite and >= 0, got {d}")));
        }
    }
    if cfg.delta_plus + cfg.delta_minus == 0.0 {
        return Err(Error::Validation("at least one of delta_plus, delta_minus must be > 0".into()));
    }
    if !cfg.drift_b.is_finite() {
        return Err(invalid("drift_b", "drift_b must be finite".into()));
    }
    if !(cfg.x_min < cfg.x_max && cfg.x_min.is_finite() && cfg.x_max.is_finite()) {
        return Err(invalid("x_max", format!("need x_min < x_max, got [{}, {}]", cfg.x_min, cfg.x_max)));
    }
    if cfg.log_spacing && cfg.x_min <= 0.0 {
        return Err(invalid("x_min", "log_spacing needs x_min > 0".into()));
    }
    if cfg.n_points < 3 {
        return Err(invalid("n_points", format!("n_points must be >= 3, got {}", cfg.n_points)));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1e-2) {
        return Err(invalid("tol", format!("tol must lie in (0, 1e-2), got {}", cfg.tol)));
    }
    if !(cfg.y > 0.0 && cfg.y.is_finite()) {
        return Err(invalid("y", format!("y must be finite and > 0, got {}", cfg.y)));
    }
    Ok(cfg)
}

/// Result of one run: exit code and the files written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Exit code for a verdict.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Consistent => 0,
        Verdict::Inconclusive => 2,
        Verdict::Inconsistent => 3,
    }
}

/// `{:.16e}`, i.e. 17 significant digits.
fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Hex SHA-256 of the config text.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Writer<'a> {
    dir: &'a Path,
    hash: &'a str,
    command: Command,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, header: &str, rows: &[String], meta: &[(String, String)]) -> Result<()> {
        let mut s = String::new();
        s.push_str(header);
        s.push('\n');
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        let _ = writeln!(s, "# config_sha256 = {}", self.hash);
        let _ = writeln!(s, "# command = {}", self.command.name());
        for (k, v) in meta {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let path = self.dir.join(name);
        fs::write(&path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn curve(&mut self, c: &RatioCurve) -> Result<()> {
        let rows: Vec<String> = c
            .xs
            .iter()
            .zip(&c.values)
            .zip(c.rel_gaps())
            .map(|((x, v), g)| format!("{},{},{},{}", fmt(*x), fmt(*v), fmt(c.target), fmt(g)))
            .collect();
        let mut meta = vec![
            ("curve".to_string(), c.name.clone()),
            ("converged".to_string(), c.converged.to_string()),
            ("tol".to_string(), fmt(c.tol)),
        ];
        for (x, why) in &c.failures {
            meta.push(("failed_point".to_string(), format!("{} {why}", fmt(*x))));
        }
        self.write(&format!("{}.csv", c.name), "x,value,target,rel_gap", &rows, &meta)
    }

    fn summary(&mut self, curves: &[&RatioCurve], meta: &[(String, String)]) -> Result<()> {
        let rows: Vec<String> = curves
            .iter()
            .map(|c| format!("{},{},{},{}", c.name, c.converged, fmt(c.last_rel_gap), fmt(c.target)))
            .collect();
        self.write("summary.csv", "curve_name,converged,last_rel_gap,target", &rows, meta)
    }
}

fn curve_lines(curves: &[&RatioCurve]) -> String {
    let mut s = String::new();
    for c in curves {
        let _ = writeln!(
            s,
            "  {:<22} converged={:<5} last_rel_gap={:.3e} target={:.6e}",
            c.name, c.converged, c.last_rel_gap, c.target
        );
    }
    s
}

fn curves_verdict(curves: &[&RatioCurve], notes: &[String]) -> Verdict {
    if curves.iter().any(|c| c.target == f64::INFINITY && c.converged) {
        Verdict::Inconsistent
    } else if notes.is_empty() && !curves.is_empty() && curves.iter().all(|c| c.converged) {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    }
}

/// Runs the configured command, writing CSV files into `out_dir`.
pub fn run(cfg: &RunConfig, config_text: &str, out_dir: &Path) -> Result<Outcome> {
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let hash = config_hash(config_text);
    let mut w = Writer { dir: out_dir, hash: &hash, command: cfg.command, files: Vec::new() };
    let xs = cfg.xs();
    let mut summary = format!("tsdiag {}\n", cfg.command.name());

    // controls do not need a law; everything else does
    let control = !matches!(cfg.subject, Subject::TsAlpha);
    let spec = if control && matches!(cfg.command, Command::Convcheck | Command::Report) {
        None
    } else {
        Some(cfg.build_spec()?)
    };

    let verdict = match cfg.command {
        Command::EvalTempering => {
            let spec = spec.as_ref().unwrap();
            for side in [Side::Plus, Side::Minus] {
                if spec.delta(side) == 0.0 {
                    continue;
                }
                let q = spec.tempering(side);
                let rows = xs
                    .iter()
                    .map(|&x| {
                        let lq = q.ln_eval(x)?;
                        let r = q.class_l_ratio(x, cfg.y)?;
                        Ok(format!("{},{},{},{}", fmt(x), fmt(lq.exp()), fmt(lq), fmt(r)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let g = spec.tail_index(side);
                let meta = vec![
                    ("tail_index".to_string(), fmt(g)),
                    ("y".to_string(), fmt(cfg.y)),
                    ("ratio_target".to_string(), fmt((-g * cfg.y).exp())),
                ];
                w.write(&format!("tempering_{}.csv", side.name()), "x,q,ln_q,ratio", &rows, &meta)?;
                let _ = writeln!(summary, "  {} tail index {:.6e}", side.name(), g);
            }
            None
        }
        Command::Density => {
            let inv = Inverter::new(spec.unwrap());
            let rows = xs
                .iter()
                .map(|&x| {
                    let p = inv.ln_pdf_point(x, cfg.tol)?;
                    let f = inv.sf_point(x, cfg.tol)?;
                    let pdf = p.value();
                    Ok(format!("{},{},{},{}", fmt(x), fmt(pdf), fmt(f), fmt(pdf * p.rel_error)))
                })
                .collect::<Result<Vec<_>>>()?;
            w.write("density.csv", "x,pdf,sf,abs_err", &rows, &[("tol".to_string(), fmt(cfg.tol))])?;
            let _ = writeln!(summary, "  {} density points", rows.len());
            None
        }
        Command::Tails => {
            let inv = Inverter::new(spec.unwrap());
            let mut curves = Vec::new();
            let mut notes = Vec::new();
            let spec = inv.spec();
            if spec.delta(Side::Plus) > 0.0 {
                curves.push(class_l_curve(&inv, cfg.y, &xs, cfg.tol));
                curves.push(corollary_tail_curve(&inv, Side::Plus, &xs, cfg.tol));
            }
            if spec.delta(Side::Minus) > 0.0 {
                curves.push(corollary_tail_curve(&inv, Side::Minus, &xs, cfg.tol));
            }
            let curves: Vec<RatioCurve> = curves
                .into_iter()
                .filter_map(|c| c.map_err(|e| notes.push(e.to_string())).ok())
                .collect();
            Some(finish_curves(&mut w, &curves, &notes, &mut summary, &[])?)
        }
        Command::Convcheck => {
            let mut notes = Vec::new();
            let mut curves = Vec::new();
            match cfg.subject {
                Subject::TsAlpha => {
                    let inv = Inverter::new(spec.unwrap());
                    if inv.spec().delta(Side::Plus) == 0.0 {
                        return Err(Error::Validation("convcheck needs delta_plus > 0".into()));
                    }
                    let nu_xs: Vec<f64> = xs.iter().cloned().filter(|&x| x >= 4.0).collect();
                    curves.push(conv_equiv_nu1_curve(inv.spec(), &nu_xs));
                    curves.push(conv_equiv_dist_curve(&LawUnderTest::TsAlpha(&inv), &xs, cfg.tol));
                }
                Subject::ExponentialControl { lambda } => {
                    let law = LawUnderTest::ExponentialControl { lambda };
                    curves.push(conv_equiv_dist_curve(&law, &xs, cfg.tol));
                }
                Subject::GammaControl { a, rate } => {
                    let law = LawUnderTest::GammaControl { a, rate };
                    curves.push(conv_equiv_dist_curve(&law, &xs, cfg.tol));
                    curves.push(gamma_counterexample_curve(a, rate, &xs));
                }
            }
            let curves: Vec<RatioCurve> = curves
                .into_iter()
                .filter_map(|c| c.map_err(|e| notes.push(e.to_string())).ok())
                .collect();
            Some(finish_curves(&mut w, &curves, &notes, &mut summary, &[])?)
        }
        Command::Report => {
            let rc = ReportConfig {
                subject: cfg.subject,
                xs: xs.clone(),
                y: cfg.y,
                point_tol: cfg.tol,
                s_grid: None,
            };
            // a control report ignores the law, so any valid spec will do
            let spec = match spec {
                Some(s) => s,
                None => TSAlphaSpec::one_sided(cfg.alpha, 1.0, TemperingFunction::exponential(1.0)?, 0.0)?,
            };
            let rep = run_full_report(&spec, &rc);
            let curves: Vec<RatioCurve> = rep.curves.values().cloned().collect();
            for c in &curves {
                w.curve(c)?;
            }
            let mut meta = vec![
                ("verdict".to_string(), rep.verdict.name().to_string()),
                ("gamma_plus".to_string(), fmt(rep.gamma_plus)),
                ("gamma_minus".to_string(), fmt(rep.gamma_minus)),
            ];
            for (k, v) in &rep.constants {
                meta.push((k.clone(), fmt(*v)));
            }
            if let Some(m) = &rep.moments {
                meta.push(("moment_disagreements".to_string(), m.disagreements.len().to_string()));
                meta.push(("mean_finite".to_string(), m.mean_finite.to_string()));
                meta.push(("variance_finite".to_string(), m.variance_finite.to_string()));
            }
            for n in &rep.notes {
                meta.push(("note".to_string(), n.clone()));
            }
            let refs: Vec<&RatioCurve> = curves.iter().collect();
            w.summary(&refs, &meta)?;
            summary.push_str(&curve_lines(&refs));
            for (k, v) in &meta {
                let _ = writeln!(summary, "  {k}: {v}");
            }
            Some(rep.verdict)
        }
    };

    let exit_code = verdict.map(exit_code).unwrap_or(0);
    if let Some(v) = verdict {
        if cfg.command != Command::Report {
            let _ = writeln!(summary, "  verdict: {}", v.name());
        }
    }
    Ok(Outcome { exit_code, files: w.files, summary })
}

fn finish_curves(
    w: &mut Writer,
    curves: &[RatioCurve],
    notes: &[String],
    summary: &mut String,
    extra: &[(String, String)],
) -> Result<Verdict> {
    for c in curves {
        w.curve(c)?;
    }
    let refs: Vec<&RatioCurve> = curves.iter().collect();
    let verdict = curves_verdict(&refs, notes);
    let mut meta = vec![("verdict".to_string(), verdict.name().to_string())];
    meta.extend(extra.iter().cloned());
    for n in notes {
        meta.push(("note".to_string(), n.clone()));
    }
    w.summary(&refs, &meta)?;
    summary.push_str(&curve_lines(&refs));
    for n in notes {
        let _ = writeln!(summary, "  note: {n}");
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "alpha = 0.5\n[plus]\nkind = exponential\ntheta = 1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.command, Command::Report);
        assert_eq!(c.delta_plus, 1.0);
        assert_eq!(c.delta_minus, 0.0);
        assert_eq!(c.plus, Some(TemperingConfig::Exponential { theta: 1.0 }));
        assert_eq!(c.n_points, 13);
        assert!(c.echo().contains("x_max = 1000"));
    }

    #[test]
    fn alpha_out_of_range() {
        let e = parse_config("alpha = 2.0\n[plus]\nkind = exponential\ntheta = 1\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 1, reason: "alpha must lie strictly inside (0,2)".into() });
    }

    #[test]
    fn unknown_key_names_line() {
        let e = parse_config("# header\nalhpa = 0.5\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, ref reason } if reason.contains("alhpa")), "{e}");
        let e = parse_config("alpha = 0.5\n[plus]\nkind = exponential\ntheta = 1\np = 0.3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }), "{e}");
    }

    #[test]
    fn weibull_is_rejected_when_built() {
        let c = parse_config("alpha = 0.5\n[plus]\nkind = weibull\nk = 2\n").unwrap();
        let e = c.build_spec().unwrap_err();
        assert!(e.to_string().contains("not completely monotone"), "{e}");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            config_hash(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
