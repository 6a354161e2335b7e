//! Completely monotone tempering functions `q` with `q(0+) = 1`, their
//! Bernstein measures and tail index `γ = inf supp Q`, and the
//! translation-ratio checks for class `L(γ)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks, QuadOptions, WynnEpsilon};
use crate::special_functions::{ln_upper_incomplete_gamma, mittag_leffler_with, EvalOptions};

/// Tolerance on the extrapolated value of `q(0+)`.
pub const PROPER_TOL: f64 = 1e-4;

/// Slack allowed per step when checking that a translation ratio is non-decreasing.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Accuracy requested from the Mittag-Leffler evaluations inside `q`.
const ML_TOL: f64 = 1e-12;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How a Bernstein measure is held.
#[derive(Clone)]
pub enum Representation {
    /// Point masses `(location, mass)`.
    Atoms(Vec<(f64, f64)>),
    /// A density on `[gamma, ∞)`.
    Density(ScalarFn),
    /// Known to exist but not materialised.
    Implicit,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::Atoms(a) => f.debug_tuple("Atoms").field(a).finish(),
            Representation::Density(_) => f.write_str("Density(<fn>)"),
            Representation::Implicit => f.write_str("Implicit"),
        }
    }
}

/// Positive measure `Q` on `[0, ∞)` with `q(x) = ∫ e^{-sx} Q(ds)`.
#[derive(Debug, Clone)]
pub struct BernsteinMeasure {
    pub representation: Representation,
    /// Infimum of the support.
    pub gamma: f64,
    pub total_mass: f64,
}

impl BernsteinMeasure {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("Bernstein measure needs at least one atom".into()));
        }
        for &(s, w) in &atoms {
            if !(s >= 0.0 && s.is_finite()) || !(w > 0.0 && w.is_finite()) {
                return Err(Error::Domain(format!(
                    "atom ({s}, {w}) needs location >= 0 and mass > 0"
                )));
            }
        }
        let gamma = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
        let total_mass = atoms.iter().map(|a| a.1).sum();
        Ok(Self {
            representation: Representation::Atoms(atoms),
            gamma,
            total_mass,
        })
    }

    /// Density `g` supported on `[gamma, ∞)`; the total mass is integrated.
    pub fn density(g: ScalarFn, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("support start must be >= 0, got {gamma}")));
        }
        let h = g.clone();
        // t = v / (1 - v) maps [0, 1) onto [0, ∞)
        let r = integrate(
            move |v: f64| {
                let t = v / (1.0 - v);
                h(gamma + t) / ((1.0 - v) * (1.0 - v))
            },
            0.0,
            1.0,
            &QuadOptions::with_tol(1e-14, 1e-12),
        )?;
        Ok(Self {
            representation: Representation::Density(g),
            gamma,
            total_mass: r.value,
        })
    }

    /// `ln ∫ e^{-sx} Q(ds)`.
    pub fn ln_laplace(&self, x: f64) -> Result<f64> {
        match &self.representation {
            Representation::Atoms(atoms) => {
                let m = atoms
                    .iter()
                    .map(|&(s, w)| w.ln() - s * x)
                    .fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = atoms.iter().map(|&(s, w)| (w.ln() - s * x - m).exp()).sum();
                Ok(m + sum.ln())
            }
            Representation::Density(g) => {
                let gamma = self.gamma;
                let opts = QuadOptions::with_tol(0.0, 1e-13);
                // mass beyond t_max contributes less than e^{-40} of the total
                let t_max = 40.0 / x;
                let r = if t_max < 1e6 {
                    let mut pts = vec![0.0];
                    let mut p = t_max / 1024.0;
                    while p < t_max {
                        pts.push(p);
                        p *= 4.0;
                    }
                    pts.push(t_max);
                    integrate_with_breaks(|t: f64| (-t * x).exp() * g(gamma + t), &pts, &opts)?
                } else {
                    integrate(
                        |v: f64| {
                            let t = v / (1.0 - v);
                            (-t * x).exp() * g(gamma + t) / ((1.0 - v) * (1.0 - v))
                        },
                        0.0,
                        1.0,
                        &opts,
                    )?
                };
                if !(r.value > 0.0) {
                    return Err(Error::Underflow(format!("Laplace transform vanishes at x = {x}")));
                }
                Ok(-gamma * x + r.value.ln())
            }
            Representation::Implicit => Err(Error::Domain(
                "implicit Bernstein measure cannot be evaluated directly".into(),
            )),
        }
    }
}

/// Named tempering families.
#[derive(Clone)]
pub enum TemperingKind {
    /// `e^{-θx}`
    Exponential { theta: f64 },
    /// `(α+p) Γ(-α-p) Γ*(-α-p, x/r)`
    Kr { alpha: f64, p: f64, r: f64 },
    /// `e^{-θx} E_γ(-λ x^γ)`
    Gtgs { theta: f64, lambda: f64, gamma_ml: f64 },
    /// Laplace transform of an explicit measure.
    Bernstein(BernsteinMeasure),
    /// A caller-supplied function that passed the finite-difference screen.
    Screened { name: String, f: ScalarFn, tail_index: f64 },
}

/// A proper completely monotone tempering function.
#[derive(Debug, Clone)]
pub struct TemperingFunction {
    kind: TemperingKind,
    gamma: f64,
}

impl fmt::Debug for TemperingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemperingKind::Exponential { theta } => {
                f.debug_struct("Exponential").field("theta", theta).finish()
            }
            TemperingKind::Kr { alpha, p, r } => f
                .debug_struct("Kr")
                .field("alpha", alpha)
                .field("p", p)
                .field("r", r)
                .finish(),
            TemperingKind::Gtgs {
                theta,
                lambda,
                gamma_ml,
            } => f
                .debug_struct("Gtgs")
                .field("theta", theta)
                .field("lambda", lambda)
                .field("gamma_ml", gamma_ml)
                .finish(),
            TemperingKind::Bernstein(m) => f.debug_tuple("Bernstein").field(m).finish(),
            TemperingKind::Screened {
                name, tail_index, ..
            } => f
                .debug_struct("Screened")
                .field("name", name)
                .field("tail_index", tail_index)
                .finish_non_exhaustive(),
        }
    }
}

impl TemperingFunction {
    pub fn exponential(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("exponential tempering needs theta > 0, got {theta}")));
        }
        Self::validated(TemperingKind::Exponential { theta }, theta)
    }

    pub fn kr(alpha: f64, p: f64, r: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Domain(format!("KR tempering needs alpha in (0, 2), got {alpha}")));
        }
        if !(p > -alpha) {
            return Err(Error::Domain(format!("KR tempering needs p > -alpha, got p = {p}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("KR tempering needs r > 0, got {r}")));
        }
        let a = alpha + p;
        if a == a.round() {
            return Err(Error::Domain(format!(
                "KR tempering needs alpha + p non-integer (Γ(-alpha-p) has a pole), got {a}"
            )));
        }
        Self::validated(TemperingKind::Kr { alpha, p, r }, 1.0 / r)
    }

    pub fn gtgs(theta: f64, lambda: f64, gamma_ml: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("GTGS tempering needs theta >= 0, got {theta}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("GTGS tempering needs lambda > 0, got {lambda}")));
        }
        if !(gamma_ml > 0.0 && gamma_ml < 1.0) {
            return Err(Error::Domain(format!(
                "GTGS tempering needs gamma_ml in (0, 1), got {gamma_ml}"
            )));
        }
        Self::validated(
            TemperingKind::Gtgs {
                theta,
                lambda,
                gamma_ml,
            },
            theta,
        )
    }

    pub fn bernstein(measure: BernsteinMeasure) -> Result<Self> {
        if matches!(measure.representation, Representation::Implicit) {
            return Err(Error::Domain("an implicit measure cannot define a tempering function".into()));
        }
        let gamma = measure.gamma;
        Self::validated(TemperingKind::Bernstein(measure), gamma)
    }

    /// Accepts an arbitrary function after a finite-difference complete
    /// monotonicity screen (orders 1..=8) on `[0.01, 20]`.
    pub fn screened(name: &str, f: ScalarFn, tail_index: f64) -> Result<Self> {
        if !(tail_index >= 0.0) {
            return Err(Error::Domain(format!("tail index must be >= 0, got {tail_index}")));
        }
        let raw = RawFunction(f.clone());
        let xs: Vec<f64> = (1..=400).map(|i| 0.05 * i as f64).collect();
        let report = check_complete_monotonicity(&raw, &xs, 8, &CmCheckOptions::default());
        if let Some(fail) = report.orders.iter().find(|o| !o.passed) {
            return Err(Error::NotCompletelyMonotone {
                order: fail.order,
                x: fail.worst_x,
            });
        }
        Self::validated(
            TemperingKind::Screened {
                name: name.to_string(),
                f,
                tail_index,
            },
            tail_index,
        )
    }

    fn validated(kind: TemperingKind, gamma: f64) -> Result<Self> {
        let q = Self { kind, gamma };
        let limit = q.limit_at_zero()?;
        if (limit - 1.0).abs() > PROPER_TOL {
            return Err(Error::NotProper { limit });
        }
        Ok(q)
    }

    /// `q(0+)` extrapolated from `q(10^{-k})`, `k = 4..=16`.
    ///
    /// Near zero `q(ε) - q(0+)` is a sum of powers of `ε` (for instance
    /// `ε^{γml}, ε^{2γml}, ...` for GTGS), each geometric in `k`, which is the
    /// case Wynn's epsilon algorithm removes term by term.
    pub fn limit_at_zero(&self) -> Result<f64> {
        let mut wynn = WynnEpsilon::new();
        for k in 4..=16 {
            wynn.push(self.eval(10f64.powi(-k))?);
        }
        Ok(wynn.estimate().0)
    }

    pub fn kind(&self) -> &TemperingKind {
        &self.kind
    }

    /// Tail index `γ`, the infimum of the support of the Bernstein measure.
    pub fn tail_index(&self) -> f64 {
        self.gamma
    }

    pub fn bernstein_measure(&self) -> BernsteinMeasure {
        match &self.kind {
            TemperingKind::Exponential { theta } => BernsteinMeasure {
                representation: Representation::Atoms(vec![(*theta, 1.0)]),
                gamma: *theta,
                total_mass: 1.0,
            },
            TemperingKind::Bernstein(m) => m.clone(),
            _ => BernsteinMeasure {
                representation: Representation::Implicit,
                gamma: self.gamma,
                total_mass: 1.0,
            },
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.ln_eval(x)?.exp())
    }

    /// `ln q(x)` for `x > 0`.
    pub fn ln_eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("tempering function needs x > 0, got {x}")));
        }
        match &self.kind {
            TemperingKind::Exponential { theta } => Ok(-theta * x),
            TemperingKind::Kr { alpha, p, r } => {
                let a = alpha + p;
                let y = x / r;
                let l = ln_upper_incomplete_gamma(-a, y)?;
                Ok(a.ln() + a * y.ln() + l.ln_value)
            }
            TemperingKind::Gtgs {
                theta,
                lambda,
                gamma_ml,
            } => {
                let e = mittag_leffler_with(
                    *gamma_ml,
                    -lambda * x.powf(*gamma_ml),
                    &EvalOptions::with_tol(ML_TOL),
                )?;
                Ok(-theta * x + e.value.ln())
            }
            TemperingKind::Bernstein(m) => m.ln_laplace(x),
            TemperingKind::Screened { f, .. } => Ok(f(x).ln()),
        }
    }

    /// `q(x + y) / q(x)`, computed from logarithms.
    pub fn class_l_ratio(&self, x: f64, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("translation must be >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(1.0);
        }
        let r = (self.ln_eval(x + y)? - self.ln_eval(x)?).exp();
        if r == 0.0 {
            return Err(Error::Underflow(format!(
                "q({})/q({x}) is below the double range",
                x + y
            )));
        }
        Ok(r)
    }

    /// `lim_{z→∞} e^{γz} q(z)`, estimated from `z = 10^k` with Aitken's Δ².
    pub fn tilt_limit(&self) -> Result<f64> {
        let scale = if self.gamma > 0.0 { 1.0 / self.gamma } else { 1.0 };
        let mut vals = Vec::new();
        // larger z loses digits in γz + ln q(z)
        for k in 1..=4 {
            let z = scale * 10f64.powi(k);
            vals.push((self.gamma * z + self.ln_eval(z)?).exp());
        }
        let n = vals.len();
        let (a0, a1, a2) = (vals[n - 3], vals[n - 2], vals[n - 1]);
        let denom = (a2 - a1) - (a1 - a0);
        let est = if denom.abs() <= 1e-15 * a2.abs().max(1e-300) {
            a2
        } else {
            a2 - (a2 - a1) * (a2 - a1) / denom
        };
        Ok(est.clamp(0.0, a2))
    }

    /// Moment generating function of the law with survival function `q`:
    /// `1 + s ∫_0^∞ e^{sx} q(x) dx`, or `+∞` when the integral diverges.
    pub fn tilted_moment(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(1.0);
        }
        if s > self.gamma {
            return Ok(f64::INFINITY);
        }
        let ln_f = |x: f64| s * x + self.ln_eval(x).unwrap_or(f64::NEG_INFINITY);
        match decade_integral(&ln_f, 0.0, 1.0, 1e-13)? {
            DecadeIntegral::Finite { value, .. } => Ok(1.0 + s * value),
            DecadeIntegral::Divergent => Ok(f64::INFINITY),
        }
    }
}

/// Outcome of integrating a positive function over `[start, ∞)` decade by decade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum DecadeIntegral {
    Finite { value: f64, abs_error: f64 },
    Divergent,
}

/// `∫_start^∞ exp(ln_f(x)) dx` summed over blocks `[c·10^k, c·10^{k+1}]`.
///
/// The integral is declared divergent when block contributions stop
/// shrinking at large scale, and finite once they fall below `rel_tol` of the
/// running total.
pub(crate) fn decade_integral(
    ln_f: &(dyn Fn(f64) -> f64 + Sync),
    start: f64,
    scale: f64,
    rel_tol: f64,
) -> Result<DecadeIntegral> {
    let opts = QuadOptions::with_tol(0.0, (rel_tol * 0.1).max(1e-12));
    let f = |x: f64| ln_f(x).exp();
    let mut edges = vec![start];
    let mut e = if start > 0.0 { start * 10.0 } else { scale };
    for _ in 0..14 {
        edges.push(e);
        e *= 10.0;
    }
    let mut total = 0.0;
    let mut err = 0.0;
    let mut blocks: Vec<f64> = Vec::new();
    for w in edges.windows(2) {
        // inner breakpoints keep quickly decaying integrands resolved
        let pts = [w[0], w[0] + 0.01 * (w[1] - w[0]), w[0] + 0.1 * (w[1] - w[0]), w[1]];
        // later blocks only need accuracy relative to what is already summed
        let opts = QuadOptions {
            abs_tol: opts.abs_tol.max(0.01 * rel_tol * total),
            ..opts
        };
        let r = integrate_with_breaks(f, &pts, &opts)?;
        if !r.value.is_finite() {
            return Ok(DecadeIntegral::Divergent);
        }
        total += r.value;
        err += r.abs_error;
        blocks.push(r.value);
        let n = blocks.len();
        if r.value <= rel_tol * total {
            return Ok(DecadeIntegral::Finite {
                value: total,
                abs_error: err + r.value,
            });
        }
        if n >= 4 && blocks[n - 1] >= 0.95 * blocks[n - 2] && blocks[n - 2] >= 0.95 * blocks[n - 3] {
            return Ok(DecadeIntegral::Divergent);
        }
    }
    // Slowly shrinking blocks: geometric bound on what remains.
    let n = blocks.len();
    let ratio = blocks[n - 1] / blocks[n - 2];
    if ratio < 1.0 {
        let rest = blocks[n - 1] * ratio / (1.0 - ratio);
        Ok(DecadeIntegral::Finite {
            value: total + rest,
            abs_error: err + rest,
        })
    } else {
        Ok(DecadeIntegral::Divergent)
    }
}

/// Something that can be evaluated as `ln f(x)` on `(0, ∞)`.
pub trait LogFunction: Sync {
    fn ln_at(&self, x: f64) -> f64;
}

impl LogFunction for TemperingFunction {
    fn ln_at(&self, x: f64) -> f64 {
        self.ln_eval(x).unwrap_or(f64::NAN)
    }
}

/// Wraps a plain value function.
#[derive(Clone)]
pub struct RawFunction(pub ScalarFn);

impl LogFunction for RawFunction {
    fn ln_at(&self, x: f64) -> f64 {
        (self.0)(x).ln()
    }
}

/// Weibull survival function `exp(-(x/λ)^k)`; log-concave for `k > 1`.
pub fn weibull_sf(k: f64, lambda: f64) -> RawFunction {
    RawFunction(Arc::new(move |x: f64| (-(x / lambda).powf(k)).exp()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneRatioReport {
    pub monotone: bool,
    pub first_violation: Option<usize>,
    pub ratios: Vec<f64>,
}

/// Checks that `x ↦ f(x + y) / f(x)` is non-decreasing along `xs`.
pub fn check_monotone_ratio(f: &dyn LogFunction, y: f64, xs: &[f64]) -> MonotoneRatioReport {
    let ratios: Vec<f64> = xs.iter().map(|&x| (f.ln_at(x + y) - f.ln_at(x)).exp()).collect();
    let first_violation = ratios
        .windows(2)
        .position(|w| !(w[1] >= w[0] - MONOTONE_SLACK * w[0].abs().max(1.0)))
        .map(|i| i + 1);
    MonotoneRatioReport {
        monotone: first_violation.is_none(),
        first_violation,
        ratios,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CmCheckOptions {
    /// Forward-difference step.
    pub h: f64,
    /// Absolute accuracy of the function values.
    pub value_noise: f64,
}

impl Default for CmCheckOptions {
    fn default() -> Self {
        Self {
            h: 0.05,
            value_noise: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderMargin {
    pub order: usize,
    /// Smallest `(-1)^n Δⁿ_h f(x)` over the grid.
    pub worst_margin: f64,
    pub worst_x: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmReport {
    pub orders: Vec<OrderMargin>,
    pub passed: bool,
}

/// Finite-difference screen for complete monotonicity: `(-1)^n Δⁿ_h f(x) ≥ -tol`
/// for `1 ≤ n ≤ max_order`. A necessary condition only.
pub fn check_complete_monotonicity(
    f: &dyn LogFunction,
    xs: &[f64],
    max_order: usize,
    opts: &CmCheckOptions,
) -> CmReport {
    let max_order = max_order.clamp(1, 8);
    let h = opts.h;
    let mut orders = Vec::with_capacity(max_order);
    for n in 1..=max_order {
        let mut worst = f64::INFINITY;
        let mut worst_x = f64::NAN;
        let mut scale: f64 = 0.0;
        for &x in xs {
            let vals: Vec<f64> = (0..=n).map(|j| f.ln_at(x + j as f64 * h).exp()).collect();
            scale = scale.max(vals[0]);
            // (-1)^n Δⁿ f(x) = Σ_j (-1)^j C(n, j) f(x + jh)
            let mut binom = 1.0;
            let mut acc = 0.0;
            for (j, v) in vals.iter().enumerate() {
                if j > 0 {
                    binom *= (n - j + 1) as f64 / j as f64;
                }
                acc += if j % 2 == 0 { binom } else { -binom } * v;
            }
            if acc < worst || worst_x.is_nan() {
                worst = acc;
                worst_x = x;
            }
        }
        let tol = 2f64.powi(n as i32) * opts.value_noise * scale.max(1.0);
        orders.push(OrderMargin {
            order: n,
            worst_margin: worst,
            worst_x,
            passed: worst >= -tol,
        });
    }
    let passed = orders.iter().all(|o| o.passed);
    CmReport { orders, passed }
}
