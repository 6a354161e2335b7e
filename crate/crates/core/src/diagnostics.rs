//! Ratio curves that check tail-class membership `L(γ)`, convolution
//! equivalence `S(γ)` (at the big-jump level and for the law itself), the
//! density tail constant, and the moment cross-check. All ratios are formed
//! as differences of logarithms.

use std::collections::BTreeMap;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::density::Inverter;
use crate::error::{Error, Result};
use crate::levy::{Side, TSAlphaSpec};
use crate::quadrature::{integrate_with_breaks, logspace, QuadOptions};
use crate::special_functions::ln_upper_incomplete_gamma;
use crate::tempering::{decade_integral, DecadeIntegral};

/// Convergence tolerance for curves built from Fourier inversion.
pub const INVERSION_CURVE_TOL: f64 = 0.05;
/// Convergence tolerance for curves built from quadrature alone.
pub const QUADRATURE_CURVE_TOL: f64 = 0.01;
/// `values[last] > DIVERGENCE_FLOOR · values[first]` declares divergence.
pub const DIVERGENCE_FLOOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioCurve {
    pub name: String,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// `+∞` marks an expected divergence.
    pub target: f64,
    pub converged: bool,
    /// `|values[last]/target - 1|`; for a divergent target,
    /// `values[first]/values[last]`.
    pub last_rel_gap: f64,
    pub tol: f64,
    /// Points whose evaluation failed, with the reason.
    pub failures: Vec<(f64, String)>,
}

impl RatioCurve {
    /// Builds a curve from `ln values` (NaN marks a failed point).
    pub fn from_ln(
        name: &str,
        xs: Vec<f64>,
        ln_values: Vec<f64>,
        target: f64,
        tol: f64,
        failures: Vec<(f64, String)>,
    ) -> Self {
        let values: Vec<f64> = ln_values.iter().map(|l| l.exp()).collect();
        let n = ln_values.len();
        let complete = failures.is_empty() && n > 0 && ln_values.iter().all(|l| !l.is_nan());
        let (converged, last_rel_gap) = if !complete {
            (false, f64::NAN)
        } else if target == f64::INFINITY {
            let growth = ln_values[n - 1] - ln_values[0];
            (growth > DIVERGENCE_FLOOR.ln(), (-growth).exp())
        } else {
            let lt = target.ln();
            let gaps: Vec<f64> = ln_values.iter().map(|l| (l - lt).exp_m1().abs()).collect();
            let last = gaps[n - 1];
            let ok = n >= 3
                && gaps[n - 3..].iter().all(|&g| g < tol)
                && gaps[n - 1] <= gaps[n - 2] + 1e-12
                && gaps[n - 2] <= gaps[n - 3] + 1e-12;
            (ok, last)
        };
        Self {
            name: name.to_string(),
            xs,
            values,
            target,
            converged,
            last_rel_gap,
            tol,
            failures,
        }
    }

    /// `|values[i]/target - 1|` for every point.
    pub fn rel_gaps(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| {
                if self.target.is_finite() {
                    (v / self.target - 1.0).abs()
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates `f` at every `x` in parallel; failures become NaN plus a note.
fn collect_ln<F>(xs: &[f64], f: F) -> (Vec<f64>, Vec<(f64, String)>)
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let results: Vec<Result<f64>> = xs.par_iter().map(|&x| f(x)).collect();
    let mut failures = Vec::new();
    let vals = results
        .into_iter()
        .zip(xs)
        .map(|(r, &x)| match r {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                failures.push((x, format!("non-finite value {v}")));
                f64::NAN
            }
            Err(e) => {
                failures.push((x, e.to_string()));
                f64::NAN
            }
        })
        .collect();
    (vals, failures)
}

fn check_grid(xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("curve grid must be non-empty and strictly ascending".into()));
    }
    Ok(())
}

/// `F̄(x+y)/F̄(x)` against `e^{-γ₊ y}`.
pub fn class_l_curve(inv: &Inverter, y: f64, xs: &[f64], tol: f64) -> Result<RatioCurve> {
    check_grid(xs)?;
    if !(y >= 0.0) {
        return Err(Error::Domain(format!("translation must be >= 0, got {y}")));
    }
    let spec = inv.spec();
    if spec.delta(Side::Plus) == 0.0 {
        return Err(Error::Domain("the right tail needs delta_plus > 0".into()));
    }
    let target = (-spec.tail_index(Side::Plus) * y).exp();
    let (ln_values, failures) = if y == 0.0 {
        (vec![0.0; xs.len()], Vec::new())
    } else {
        collect_ln(xs, |x| {
            Ok(inv.ln_sf_point(x + y, tol)?.ln_value - inv.ln_sf_point(x, tol)?.ln_value)
        })
    };
    Ok(RatioCurve::from_ln(
        "class_l_plus",
        xs.to_vec(),
        ln_values,
        target,
        INVERSION_CURVE_TOL,
        failures,
    ))
}

/// `ln` of the big-jump convolution ratio `ν₁*ν₁(x)/ν₁(x)` for `x ≥ 4`,
/// integrating the symmetric half `2∫_1^{x/2}` of
/// `(δ/ν̄(1)) (x/((x-z)z))^{1+α} q(x-z) q(z)/q(x)`.
pub fn nu1_convolution_ratio(spec: &TSAlphaSpec, norm: f64, x: f64) -> Result<f64> {
    nu1_ratio_integral(spec, norm, x, true)
}

/// Same quantity over the whole range `[1, x-1]`, without the symmetry.
pub fn nu1_convolution_ratio_full(spec: &TSAlphaSpec, norm: f64, x: f64) -> Result<f64> {
    nu1_ratio_integral(spec, norm, x, false)
}

fn nu1_ratio_integral(spec: &TSAlphaSpec, norm: f64, x: f64, half: bool) -> Result<f64> {
    if !(x >= 4.0) {
        return Err(Error::Domain(format!("the big-jump convolution needs x >= 4, got {x}")));
    }
    let a = spec.alpha();
    let d = spec.delta(Side::Plus);
    let q = spec.tempering(Side::Plus);
    let lqx = q.ln_eval(x)?;
    let base = d.ln() - norm.ln();
    let ln_g = |z: f64| -> f64 {
        let lq = q.ln_eval(x - z).unwrap_or(f64::NAN) + q.ln_eval(z).unwrap_or(f64::NAN) - lqx;
        base + (1.0 + a) * (x.ln() - (x - z).ln() - z.ln()) + lq
    };
    let hi = if half { 0.5 * x } else { x - 1.0 };
    let mut pts = vec![1.0];
    let mut p = 2.0;
    while p < hi {
        pts.push(p);
        if !half && x - p > p {
            pts.push(x - p);
        }
        p *= 2.0;
    }
    pts.push(hi);
    pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
    pts.dedup();
    let r = integrate_with_breaks(
        |z: f64| ln_g(z).exp(),
        &pts,
        &QuadOptions::with_tol(0.0, 1e-11),
    )?;
    let v = if half { 2.0 * r.value } else { r.value };
    Ok(v.ln())
}

/// Pointwise majorant `(2/z)^{1+α} q(z)²/q(2z)` of the half-range integrand
/// (without the `δ/ν̄(1)` factor).
pub fn nu1_dominating_bound(spec: &TSAlphaSpec, z: f64) -> Result<f64> {
    let a = spec.alpha();
    let q = spec.tempering(Side::Plus);
    Ok(((1.0 + a) * (2.0 / z).ln() + 2.0 * q.ln_eval(z)? - q.ln_eval(2.0 * z)?).exp())
}

/// `ν₁*ν₁` ratio curve against `2 ν̂₁(γ₊)`.
pub fn conv_equiv_nu1_curve(spec: &TSAlphaSpec, xs: &[f64]) -> Result<RatioCurve> {
    check_grid(xs)?;
    let nu1 = spec.nu1()?;
    let target = 2.0 * nu1.mgf(spec.tail_index(Side::Plus))?;
    let norm = nu1.normalizer();
    let (ln_values, failures) = collect_ln(xs, |x| nu1_convolution_ratio(spec, norm, x));
    Ok(RatioCurve::from_ln(
        "conv_equiv_nu1",
        xs.to_vec(),
        ln_values,
        target,
        QUADRATURE_CURVE_TOL,
        failures,
    ))
}

/// The law whose two-fold convolution tail is examined.
pub enum LawUnderTest<'a> {
    TsAlpha(&'a Inverter),
    /// `F̄(x) = e^{-λx}`: in `L(λ)` but not `S(λ)`.
    ExponentialControl { lambda: f64 },
    /// Gamma law with shape `a` and rate `rate`.
    GammaControl { a: f64, rate: f64 },
}

impl LawUnderTest<'_> {
    fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            LawUnderTest::ExponentialControl { lambda } => lambda.ln() - lambda * x,
            LawUnderTest::GammaControl { a, rate } => {
                a * rate.ln() + (a - 1.0) * x.ln() - rate * x - ln_gamma(a)
            }
            LawUnderTest::TsAlpha(_) => f64::NAN,
        }
    }

    fn ln_sf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        match *self {
            LawUnderTest::ExponentialControl { lambda } => Ok(-lambda * x),
            LawUnderTest::GammaControl { a, rate } => {
                Ok(ln_upper_incomplete_gamma(a, rate * x)?.ln_value - ln_gamma(a))
            }
            LawUnderTest::TsAlpha(_) => Err(Error::Domain("use the inverter".into())),
        }
    }

    /// `ln(F̄*F̄(x)/F̄(x)) = ln(1 + ∫_0^x f(z) F̄(x-z)/F̄(x) dz)` for a control law.
    fn ln_control_ratio(&self, x: f64) -> Result<f64> {
        let lsx = self.ln_sf(x)?;
        let g = |z: f64| (self.ln_pdf(z) + self.ln_sf(x - z).unwrap_or(f64::NAN) - lsx).exp();
        let mut pts = vec![0.0];
        let mut p = 1e-3 * x;
        while p < x {
            pts.push(p);
            p *= 4.0;
        }
        pts.push(x);
        let r = integrate_with_breaks(g, &pts, &QuadOptions::with_tol(0.0, 1e-10))?;
        Ok(r.value.ln_1p())
    }
}

/// `F̄*F̄(x)/F̄(x)` against `2μ̂(γ₊)`, which is `+∞` for the controls.
pub fn conv_equiv_dist_curve(subject: &LawUnderTest, xs: &[f64], tol: f64) -> Result<RatioCurve> {
    check_grid(xs)?;
    let (target, (ln_values, failures)) = match subject {
        LawUnderTest::TsAlpha(inv) => {
            let spec = inv.spec();
            if spec.delta(Side::Plus) == 0.0 {
                return Err(Error::Domain("the right tail needs delta_plus > 0".into()));
            }
            let target = 2.0 * spec.mgf(spec.tail_index(Side::Plus))?;
            (
                target,
                collect_ln(xs, |x| {
                    Ok(inv.ln_convolution_sf(x, tol)?.ln_value - inv.ln_sf_point(x, tol)?.ln_value)
                }),
            )
        }
        control => (f64::INFINITY, collect_ln(xs, |x| control.ln_control_ratio(x))),
    };
    Ok(RatioCurve::from_ln(
        "conv_equiv_dist",
        xs.to_vec(),
        ln_values,
        target,
        INVERSION_CURVE_TOL,
        failures,
    ))
}

/// `p(±x)|x|^{1+α}/(δ± q±(|x|))` against `C± = μ̂(γ±)`; the minus side is
/// the plus side of the reflected law.
pub fn corollary_tail_curve(inv: &Inverter, side: Side, xs: &[f64], tol: f64) -> Result<RatioCurve> {
    match side {
        Side::Plus => corollary_plus(inv, xs, tol, "corollary_tail_plus"),
        Side::Minus => {
            let reflected = Inverter::new(inv.spec().reflect());
            corollary_plus(&reflected, xs, tol, "corollary_tail_minus")
        }
    }
}

fn corollary_plus(inv: &Inverter, xs: &[f64], tol: f64, name: &str) -> Result<RatioCurve> {
    check_grid(xs)?;
    let spec = inv.spec();
    let d = spec.delta(Side::Plus);
    if d == 0.0 {
        return Err(Error::Domain(format!("{name} needs jumps on that side")));
    }
    let target = corollary_constant(spec)?;
    let a = spec.alpha();
    let q = spec.tempering(Side::Plus);
    let (ln_values, failures) = collect_ln(xs, |x| {
        let lp = inv.ln_pdf_point(x, tol)?.ln_value;
        Ok(lp + (1.0 + a) * x.ln() - d.ln() - q.ln_eval(x)?)
    });
    Ok(RatioCurve::from_ln(
        name,
        xs.to_vec(),
        ln_values,
        target,
        INVERSION_CURVE_TOL,
        failures,
    ))
}

/// `μ̂(γ₊)` of the law itself.
pub fn corollary_constant(spec: &TSAlphaSpec) -> Result<f64> {
    spec.mgf(spec.tail_index(Side::Plus))
}

/// `Gamma(a, rate)` density over `a x^{-1} e^{-rate·x}`, which grows like `x^a`.
pub fn gamma_counterexample_curve(a: f64, rate: f64, xs: &[f64]) -> Result<RatioCurve> {
    check_grid(xs)?;
    if !(a > 0.0 && rate > 0.0) {
        return Err(Error::Domain(format!("Gamma law needs a > 0 and rate > 0, got a = {a}, rate = {rate}")));
    }
    if a == 1.0 {
        return Err(Error::Domain("a = 1 gives a constant ratio; pick a != 1".into()));
    }
    if xs[0] <= 0.0 {
        return Err(Error::Domain("the Gamma ratio needs x > 0".into()));
    }
    let ln_values = xs
        .iter()
        .map(|&x| a * rate.ln() + a * x.ln() - ln_gamma(a) - a.ln())
        .collect();
    Ok(RatioCurve::from_ln(
        "gamma_counterexample",
        xs.to_vec(),
        ln_values,
        f64::INFINITY,
        INVERSION_CURVE_TOL,
        Vec::new(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub s: f64,
    pub mgf_finite: bool,
    pub nu1_mgf_finite: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub disagreements: Vec<f64>,
    /// `E|X|` finite, judged from `∫_{|x|>1} |x| ν(dx)`.
    pub mean_finite: bool,
    /// `E X²` finite, judged from `∫_{|x|>1} x² ν(dx)`.
    pub variance_finite: bool,
    /// The same two verdicts from `ν₁` alone.
    pub nu1_mean_finite: bool,
    pub nu1_variance_finite: bool,
}

impl MomentReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Exponential moments of the law (growth test on `sx + ln q(x)`) against
/// those of `ν₁` (decade sums), and absolute moments of orders 1 and 2.
pub fn moment_cross_check(spec: &TSAlphaSpec, s_grid: &[f64]) -> Result<MomentReport> {
    let nu1 = spec.nu1()?;
    let rows: Vec<MomentRow> = s_grid
        .par_iter()
        .map(|&s| {
            Ok(MomentRow {
                s,
                mgf_finite: spec.mgf_finite(s),
                nu1_mgf_finite: nu1.mgf(s)?.is_finite(),
            })
        })
        .collect::<Result<_>>()?;
    let disagreements = rows
        .iter()
        .filter(|r| r.mgf_finite != r.nu1_mgf_finite)
        .map(|r| r.s)
        .collect();
    let mut both = [true, true];
    for side in [Side::Plus, Side::Minus] {
        if spec.delta(side) == 0.0 {
            continue;
        }
        for (i, k) in [1.0, 2.0].into_iter().enumerate() {
            both[i] &= power_moment_finite(spec, side, k);
        }
    }
    let mut nu1_plus = [true, true];
    for (i, k) in [1.0, 2.0].into_iter().enumerate() {
        let ln_f = |x: f64| k * x.ln() + nu1.ln_density(x);
        nu1_plus[i] = matches!(decade_integral(&ln_f, 1.0, 1.0, 1e-10)?, DecadeIntegral::Finite { .. });
    }
    Ok(MomentReport {
        rows,
        disagreements,
        mean_finite: both[0],
        variance_finite: both[1],
        nu1_mean_finite: nu1_plus[0],
        nu1_variance_finite: nu1_plus[1],
    })
}

/// `∫_1^∞ x^k ν(dx)` on one side is finite.
fn power_moment_finite(spec: &TSAlphaSpec, side: Side, k: f64) -> bool {
    let a = spec.alpha();
    let q = spec.tempering(side);
    // growth test on k ln x + ln q(x) - (1+α) ln x between far points
    let g = |x: f64| k * f64::ln(x) + q.ln_eval(x).unwrap_or(f64::NEG_INFINITY) - (1.0 + a) * f64::ln(x);
    let (x0, x1) = (1e6, 1e8);
    // integrable iff the local power exponent stays below -1
    let slope = (g(x1) - g(x0)) / (x1.ln() - x0.ln());
    slope < -1.0 - 1e-6
}

/// Subject of a full report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Subject {
    TsAlpha,
    ExponentialControl { lambda: f64 },
    GammaControl { a: f64, rate: f64 },
}

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub subject: Subject,
    pub xs: Vec<f64>,
    /// Translation for the class-L curve.
    pub y: f64,
    /// Accuracy of each point evaluation.
    pub point_tol: f64,
    /// Grid for the exponential-moment cross-check.
    pub s_grid: Option<Vec<f64>>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            subject: Subject::TsAlpha,
            xs: logspace(10.0, 1000.0, 13),
            y: 1.0,
            point_tol: 1e-8,
            s_grid: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    pub spec_echo: String,
    pub curves: BTreeMap<String, RatioCurve>,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub constants: BTreeMap<String, f64>,
    pub moments: Option<MomentReport>,
    pub verdict: Verdict,
    /// Problems that stopped a curve from being built at all.
    pub notes: Vec<String>,
}

/// `21` points spanning `[0, 2γ]`, or `[0, 1]` when `γ = 0`.
pub fn default_s_grid(gamma: f64) -> Vec<f64> {
    let top = if gamma > 0.0 { 2.0 * gamma } else { 1.0 };
    (0..=20).map(|i| top * i as f64 / 20.0).collect()
}

/// Runs every applicable curve for `spec` (or for a control law) and
/// assembles a verdict.
pub fn run_full_report(spec: &TSAlphaSpec, cfg: &ReportConfig) -> DiagnosticsReport {
    let mut curves = BTreeMap::new();
    let mut constants = BTreeMap::new();
    let mut notes = Vec::new();
    // a side without jumps has every exponential moment
    let index = |side| {
        if spec.delta(side) > 0.0 {
            spec.tail_index(side)
        } else {
            f64::INFINITY
        }
    };
    let gamma_plus = index(Side::Plus);
    let gamma_minus = index(Side::Minus);
    let mut moments = None;

    let mut add = |name: &str, r: Result<RatioCurve>, notes: &mut Vec<String>| match r {
        Ok(c) => {
            curves.insert(name.to_string(), c);
        }
        Err(e) => notes.push(format!("{name}: {e}")),
    };

    let verdict = match cfg.subject {
        Subject::ExponentialControl { lambda } => {
            let subject = LawUnderTest::ExponentialControl { lambda };
            add("conv_equiv_dist", conv_equiv_dist_curve(&subject, &cfg.xs, cfg.point_tol), &mut notes);
            control_verdict(&curves)
        }
        Subject::GammaControl { a, rate } => {
            let subject = LawUnderTest::GammaControl { a, rate };
            add("conv_equiv_dist", conv_equiv_dist_curve(&subject, &cfg.xs, cfg.point_tol), &mut notes);
            add("gamma_counterexample", gamma_counterexample_curve(a, rate, &cfg.xs), &mut notes);
            control_verdict(&curves)
        }
        Subject::TsAlpha => {
            let inv = Inverter::new(spec.clone());
            let tol = cfg.point_tol;
            let has_plus = spec.delta(Side::Plus) > 0.0;
            if has_plus {
                add("class_l_plus", class_l_curve(&inv, cfg.y, &cfg.xs, tol), &mut notes);
                let nu_xs = nu1_grid(&cfg.xs);
                add("conv_equiv_nu1", conv_equiv_nu1_curve(spec, &nu_xs), &mut notes);
                add(
                    "conv_equiv_dist",
                    conv_equiv_dist_curve(&LawUnderTest::TsAlpha(&inv), &cfg.xs, tol),
                    &mut notes,
                );
                add("corollary_tail_plus", corollary_tail_curve(&inv, Side::Plus, &cfg.xs, tol), &mut notes);
            }
            if spec.delta(Side::Minus) > 0.0 {
                add("corollary_tail_minus", corollary_tail_curve(&inv, Side::Minus, &cfg.xs, tol), &mut notes);
            }
            let mut record = |k: &str, v: Result<f64>| match v {
                Ok(v) => {
                    constants.insert(k.to_string(), v);
                }
                Err(e) => notes.push(format!("{k}: {e}")),
            };
            if has_plus {
                record("mgf_at_gamma", spec.mgf(gamma_plus));
                record("two_nu1_mgf", spec.nu1().and_then(|n| n.mgf(gamma_plus)).map(|v| 2.0 * v));
                record("corollary_constant_plus", corollary_constant(spec));
            }
            if spec.delta(Side::Minus) > 0.0 {
                record("corollary_constant_minus", corollary_constant(&spec.reflect()));
            }
            if has_plus {
                let grid = cfg.s_grid.clone().unwrap_or_else(|| default_s_grid(gamma_plus));
                match moment_cross_check(spec, &grid) {
                    Ok(m) => moments = Some(m),
                    Err(e) => notes.push(format!("moment_cross_check: {e}")),
                }
            }
            if moments.as_ref().is_some_and(|m| !m.agrees()) {
                Verdict::Inconsistent
            } else if !notes.is_empty() || curves.is_empty() || curves.values().any(|c| !c.converged) {
                Verdict::Inconclusive
            } else {
                Verdict::Consistent
            }
        }
    };

    DiagnosticsReport {
        spec_echo: format!("{spec:?}"),
        curves,
        gamma_plus,
        gamma_minus,
        constants,
        moments,
        verdict,
        notes,
    }
}

/// Quadrature is cheap, so the big-jump curve runs `NU1_GRID_STRETCH` times
/// further out than the inversion curves.
pub const NU1_GRID_STRETCH: f64 = 50.0;

fn nu1_grid(xs: &[f64]) -> Vec<f64> {
    let lo = xs[0].max(4.0);
    let hi = (xs[xs.len() - 1] * NU1_GRID_STRETCH).max(lo * 2.0);
    logspace(lo, hi, xs.len().max(3))
}

fn control_verdict(curves: &BTreeMap<String, RatioCurve>) -> Verdict {
    let diverged = curves
        .values()
        .any(|c| c.target == f64::INFINITY && c.converged);
    if diverged {
        Verdict::Inconsistent
    } else {
        Verdict::Inconclusive
    }
}
