//! The TSα law with Lévy triplet `(b, 0, ν)`,
//! `ν(dx) = δ± q±(|x|) |x|^{-1-α} dx`, truncation `1{|x| < 1}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, oscillatory_tail, QuadOptions};
use crate::tempering::{decade_integral, DecadeIntegral, TemperingFunction, TemperingKind};

/// Accuracy requested from the Lévy-Khintchine quadratures.
const PSI_ABS_TOL: f64 = 1e-13;
const PSI_REL_TOL: f64 = 1e-11;

/// Largest abscissa handed to a tempering function from the `x = w^{-1/α}` maps.
const X_CLAMP: f64 = 1e300;

/// Points used by the exponential-growth test for `∫_{>1} e^{sx} ν(dx)`.
const DECAY_PROBE: (f64, f64) = (1e5, 1e6);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// Parameters of a TSα law.
#[derive(Debug, Clone)]
pub struct TSAlphaSpec {
    alpha: f64,
    delta_plus: f64,
    delta_minus: f64,
    q_plus: TemperingFunction,
    q_minus: TemperingFunction,
    drift_b: f64,
}

impl TSAlphaSpec {
    pub fn new(
        alpha: f64,
        delta_plus: f64,
        delta_minus: f64,
        q_plus: TemperingFunction,
        q_minus: TemperingFunction,
        drift_b: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Validation(format!(
                "alpha must lie strictly inside (0,2), got {alpha}"
            )));
        }
        for (name, d) in [("delta_plus", delta_plus), ("delta_minus", delta_minus)] {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Validation(format!("{name} must be finite and >= 0, got {d}")));
            }
        }
        if delta_plus + delta_minus <= 0.0 {
            return Err(Error::Validation(
                "delta_plus + delta_minus must be positive (otherwise the law is a point mass)".into(),
            ));
        }
        if !drift_b.is_finite() {
            return Err(Error::Validation(format!("drift_b must be finite, got {drift_b}")));
        }
        for (name, q) in [("plus", &q_plus), ("minus", &q_minus)] {
            if let TemperingKind::Kr { alpha: a, .. } = q.kind() {
                if (a - alpha).abs() > 1e-12 {
                    return Err(Error::Validation(format!(
                        "{name} KR tempering is built for alpha = {a} but the law has alpha = {alpha}"
                    )));
                }
            }
        }
        Ok(Self {
            alpha,
            delta_plus,
            delta_minus,
            q_plus,
            q_minus,
            drift_b,
        })
    }

    /// Jumps only to the right; the left tempering slot holds a copy of `q`.
    pub fn one_sided(alpha: f64, delta: f64, q: TemperingFunction, drift_b: f64) -> Result<Self> {
        Self::new(alpha, delta, 0.0, q.clone(), q, drift_b)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn drift(&self) -> f64 {
        self.drift_b
    }

    pub fn delta(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.delta_plus,
            Side::Minus => self.delta_minus,
        }
    }

    pub fn tempering(&self, side: Side) -> &TemperingFunction {
        match side {
            Side::Plus => &self.q_plus,
            Side::Minus => &self.q_minus,
        }
    }

    /// `γ±` of the tempering function on that side.
    pub fn tail_index(&self, side: Side) -> f64 {
        self.tempering(side).tail_index()
    }

    /// The law of `-X`.
    pub fn reflect(&self) -> Self {
        Self {
            alpha: self.alpha,
            delta_plus: self.delta_minus,
            delta_minus: self.delta_plus,
            q_plus: self.q_minus.clone(),
            q_minus: self.q_plus.clone(),
            drift_b: -self.drift_b,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.drift_b == 0.0
            && self.delta_plus == self.delta_minus
            && format!("{:?}", self.q_plus) == format!("{:?}", self.q_minus)
    }

    fn ln_levy_density_side(&self, side: Side, x: f64) -> f64 {
        self.ln_tilted_levy_density(side, 0.0, x)
    }

    /// `ln(e^{sx} ν(x))` on one side, with `sx + ln q(x)` summed first so the
    /// two large terms cancel exactly when they should.
    pub(crate) fn ln_tilted_levy_density(&self, side: Side, s: f64, x: f64) -> f64 {
        let d = self.delta(side);
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        let tilted = s * x + self.tempering(side).ln_at_clamped(x);
        tilted + (d.ln() - (1.0 + self.alpha) * x.ln())
    }

    pub fn levy_density(&self, x: f64) -> Result<f64> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("Lévy density needs finite x != 0, got {x}")));
        }
        let side = if x > 0.0 { Side::Plus } else { Side::Minus };
        let d = self.delta(side);
        if d == 0.0 {
            return Ok(0.0);
        }
        let t = x.abs();
        Ok(d * self.tempering(side).eval(t)? / t.powf(1.0 + self.alpha))
    }

    /// `ν([x, ∞))` for `x > 0`.
    pub fn levy_tail(&self, x: f64) -> Result<f64> {
        self.levy_tail_side(Side::Plus, x)
    }

    /// `ν([x, ∞))` on the plus side or `ν((-∞, -x])` on the minus side.
    pub fn levy_tail_side(&self, side: Side, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("Lévy tail needs x > 0, got {x}")));
        }
        let d = self.delta(side);
        if d == 0.0 {
            return Ok(0.0);
        }
        let a = self.alpha;
        let q = self.tempering(side);
        // t = x w^{-1/α}: ∫_x^∞ q(t) t^{-1-α} dt = (x^{-α}/α) ∫_0^1 q(x w^{-1/α}) dw
        let r = integrate(
            |w: f64| q.ln_at_clamped(x * w.powf(-1.0 / a)).exp(),
            0.0,
            1.0,
            &QuadOptions::with_tol(1e-16, 1e-12),
        )?;
        Ok(d * x.powf(-a) / a * r.value)
    }

    /// `∫_{|x|≤1} x² ν(dx)`.
    pub fn small_jump_second_moment(&self) -> Result<f64> {
        let a = self.alpha;
        let mut total = 0.0;
        for side in [Side::Plus, Side::Minus] {
            let d = self.delta(side);
            if d == 0.0 {
                continue;
            }
            let q = self.tempering(side);
            // x = v^{1/(2-α)} absorbs x^{1-α}
            let r = integrate(
                |v: f64| q.ln_at_clamped(v.powf(1.0 / (2.0 - a))).exp(),
                0.0,
                1.0,
                &QuadOptions::with_tol(1e-16, 1e-12),
            )?;
            total += d * r.value / (2.0 - a);
        }
        Ok(total)
    }

    pub fn nu1(&self) -> Result<Nu1Law> {
        Nu1Law::new(self.clone())
    }

    /// Whether `∫_{x>1} e^{s|x|} ν(dx)` is finite on `side`, decided from the
    /// growth rate of `s x + ln q(x)` far out in the tail.
    pub fn exp_moment_finite(&self, side: Side, s: f64) -> bool {
        if s <= 0.0 || self.delta(side) == 0.0 {
            return true;
        }
        let q = self.tempering(side);
        let (x0, x1) = DECAY_PROBE;
        let g0 = s * x0 + q.ln_at_clamped(x0);
        let g1 = s * x1 + q.ln_at_clamped(x1);
        let rate = (g1 - g0) / (x1 - x0);
        rate.is_finite() && rate <= 1e-10 * s.max(1.0)
    }

    pub fn mgf_finite(&self, s: f64) -> bool {
        if s >= 0.0 {
            self.exp_moment_finite(Side::Plus, s)
        } else {
            self.exp_moment_finite(Side::Minus, -s)
        }
    }

    /// `κ(ζ) = ln E e^{ζX}` for complex `ζ` with `Re ζ` in the m.g.f. domain.
    /// `ψ(u) = κ(iu)` and `φ(u - is) = exp κ(s + iu)`.
    pub fn complex_cumulant(&self, zeta: Complex64) -> Result<Complex64> {
        if !self.mgf_finite(zeta.re) {
            return Err(Error::Domain(format!(
                "Re ζ = {} lies outside the exponential-moment domain",
                zeta.re
            )));
        }
        let mut k = zeta * self.drift_b;
        if self.delta_plus > 0.0 {
            k += self.side_integral(Side::Plus, zeta)?;
        }
        if self.delta_minus > 0.0 {
            k += self.side_integral(Side::Minus, -zeta)?;
        }
        Ok(k)
    }

    /// `ψ(u) = iub + ∫ (e^{iux} - 1 - iux 1{|x|<1}) ν(dx)`.
    pub fn characteristic_exponent(&self, u: f64) -> Result<Complex64> {
        if u == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.complex_cumulant(Complex64::new(0.0, u))
    }

    /// `κ(s)`, or `+∞` outside the exponential-moment domain.
    pub fn cumulant(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        if !self.mgf_finite(s) {
            return Ok(f64::INFINITY);
        }
        Ok(self.complex_cumulant(Complex64::new(s, 0.0))?.re)
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        Ok(self.cumulant(s)?.exp())
    }

    /// `J(ω) = ∫_0^∞ (e^{ωx} - 1 - ωx 1{x<1}) δ q(x) x^{-1-α} dx` for one side.
    fn side_integral(&self, side: Side, omega: Complex64) -> Result<Complex64> {
        let a = self.alpha;
        let d = self.delta(side);
        let q = self.tempering(side);
        let opts = QuadOptions::with_tol(PSI_ABS_TOL, PSI_REL_TOL);
        let u = omega.im.abs();
        let s = omega.re;

        // δ q(x) (e^{ωx} - 1) in log space
        let em1 = |x: f64| -> Complex64 {
            let lq = d.ln() + q.ln_at_clamped(x);
            if s * x < 700.0 {
                lq.exp() * expm1_c(omega * x)
            } else {
                Complex64::from_polar((s * x + lq).exp(), omega.im * x) - lq.exp()
            }
        };
        // ω² ∫_0^c φ₂(ωx) δ q(x) x^{1-α} dx with x = c v^{1/(2-α)}
        let small = |c: f64| -> Result<Complex64> {
            let r = integrate(
                |v: f64| {
                    let x = c * v.powf(1.0 / (2.0 - a));
                    phi2(omega * x) * (d.ln() + q.ln_at_clamped(x)).exp()
                },
                0.0,
                1.0,
                &opts,
            )?;
            Ok(omega * omega * r.value * c.powf(2.0 - a) / (2.0 - a))
        };

        if u <= 1.0 {
            let inner = small(1.0)?;
            let x1 = if u == 0.0 { f64::INFINITY } else { (std::f64::consts::PI / u).max(1.0) };
            // x = w^{-1/α} on [1, x1]
            let w_lo = if x1.is_finite() { x1.powf(-a) } else { 0.0 };
            let mapped = integrate(
                |w: f64| em1(w.powf(-1.0 / a).min(X_CLAMP)),
                w_lo,
                1.0,
                &opts,
            )?
            .value
                / a;
            if !x1.is_finite() {
                return Ok(inner + mapped);
            }
            let tail = self.oscillating_tail(side, omega, x1, &opts)?;
            let nu_tail = self.levy_tail_side(side, x1)?;
            Ok(inner + mapped + tail - nu_tail)
        } else {
            let xc = 1.0 / u;
            let inner = small(xc)?;
            let tail = self.oscillating_tail(side, omega, xc, &opts)?;
            let nu_tail = self.levy_tail_side(side, xc)?;
            // ω ∫_{xc}^1 δ q(x) x^{-α} dx with x = e^t
            let drift_part = integrate(
                |t: f64| (d.ln() + q.ln_at_clamped(t.exp()) + (1.0 - a) * t).exp(),
                xc.ln(),
                0.0,
                &QuadOptions::with_tol(PSI_ABS_TOL, PSI_REL_TOL),
            )?
            .value;
            Ok(inner + tail - nu_tail - omega * drift_part)
        }
    }

    /// `∫_{x0}^∞ e^{ωx} δ q(x) x^{-1-α} dx` with `Im ω ≠ 0`.
    fn oscillating_tail(
        &self,
        side: Side,
        omega: Complex64,
        x0: f64,
        opts: &QuadOptions,
    ) -> Result<Complex64> {
        let g = |x: f64| {
            let l = self.ln_tilted_levy_density(side, omega.re, x);
            Complex64::from_polar(l.exp(), omega.im * x)
        };
        Ok(oscillatory_tail(g, x0, omega.im, opts, 20_000)?.value)
    }
}

/// `(e^w - 1 - w)/w²`, by series near the origin.
pub(crate) fn phi2(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 3..30 {
            term = term * w / k as f64;
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (expm1_c(w) - w) / (w * w)
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
pub(crate) fn expm1_c(z: Complex64) -> Complex64 {
    let (sin, cos) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let em1 = z.re.exp_m1();
    // e^{a}cos b - 1 = expm1(a) cos b - 2 sin²(b/2)
    Complex64::new(em1 * cos - 2.0 * half * half, z.re.exp() * sin)
}

trait ClampedEval {
    fn ln_at_clamped(&self, x: f64) -> f64;
}

impl ClampedEval for TemperingFunction {
    fn ln_at_clamped(&self, x: f64) -> f64 {
        self.ln_eval(x.min(X_CLAMP)).unwrap_or(f64::NEG_INFINITY)
    }
}

/// Big jumps normalised to a probability law on `(1, ∞)`.
#[derive(Debug, Clone)]
pub struct Nu1Law {
    parent: TSAlphaSpec,
    normalizer: f64,
}

impl Nu1Law {
    pub fn new(parent: TSAlphaSpec) -> Result<Self> {
        if parent.delta(Side::Plus) == 0.0 {
            return Err(Error::Domain("the big-jump law needs delta_plus > 0".into()));
        }
        let normalizer = parent.levy_tail(1.0)?;
        Ok(Self { parent, normalizer })
    }

    pub fn parent(&self) -> &TSAlphaSpec {
        &self.parent
    }

    /// `ν̄(1)`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if x <= 1.0 {
            return Ok(0.0);
        }
        Ok(self.parent.levy_density(x)? / self.normalizer)
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return f64::NEG_INFINITY;
        }
        self.parent.ln_levy_density_side(Side::Plus, x) - self.normalizer.ln()
    }

    pub fn tail(&self, x: f64) -> Result<f64> {
        if x <= 1.0 {
            return Ok(1.0);
        }
        Ok(self.parent.levy_tail(x)? / self.normalizer)
    }

    /// `∫_1^∞ e^{sx} ν₁(dx)`, or `+∞` when the decade sums stop shrinking.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(1.0);
        }
        let ln_norm = self.normalizer.ln();
        let ln_f = |x: f64| {
            if x <= 1.0 {
                f64::NEG_INFINITY
            } else {
                self.parent.ln_tilted_levy_density(Side::Plus, s, x) - ln_norm
            }
        };
        match decade_integral(&ln_f, 1.0, 1.0, 1e-13)? {
            DecadeIntegral::Finite { value, .. } => Ok(value),
            DecadeIntegral::Divergent => Ok(f64::INFINITY),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;
    use statrs::function::gamma::{gamma, gamma_ur};

    fn exp_spec(alpha: f64, theta: f64) -> TSAlphaSpec {
        TSAlphaSpec::one_sided(alpha, 1.0, TemperingFunction::exponential(theta).unwrap(), 0.0).unwrap()
    }

    /// Closed form of `J(ω)` for `q = e^{-θx}`, `δ = 1`, `α ∈ (0,1) ∪ (1,2)`.
    fn exp_side_closed_form(alpha: f64, theta: f64, omega: Complex64) -> Complex64 {
        let full = gamma(-alpha)
            * ((Complex64::new(theta, 0.0) - omega).powf(alpha) - theta.powf(alpha)
                + omega * alpha * theta.powf(alpha - 1.0));
        // ∫_1^∞ x e^{-θx} x^{-1-α} dx = θ^{α-1} Γ(1-α, θ)
        let s = 1.0 - alpha;
        let upper = if s > 0.0 {
            gamma_ur(s, theta) * gamma(s)
        } else {
            (gamma_ur(s + 1.0, theta) * gamma(s + 1.0) - theta.powf(s) * (-theta).exp()) / s
        };
        full + omega * theta.powf(alpha - 1.0) * upper
    }

    #[test]
    fn validation() {
        let q = TemperingFunction::exponential(1.0).unwrap();
        assert!(matches!(
            TSAlphaSpec::one_sided(2.0, 1.0, q.clone(), 0.0),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            TSAlphaSpec::one_sided(0.0, 1.0, q.clone(), 0.0),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            TSAlphaSpec::new(0.5, 0.0, 0.0, q.clone(), q.clone(), 0.0),
            Err(Error::Validation(_))
        ));
        let kr = TemperingFunction::kr(1.2, 0.3, 1.0).unwrap();
        assert!(TSAlphaSpec::one_sided(0.5, 1.0, kr, 0.0).is_err());
    }

    #[test]
    fn levy_density_examples() {
        let spec = exp_spec(0.5, 1.0);
        assert!((spec.levy_density(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(spec.levy_density(-1.0).unwrap(), 0.0);
        assert!(spec.levy_density(0.0).is_err());
        let q = TemperingFunction::kr(1.2, 0.3, 1.0).unwrap();
        let spec = TSAlphaSpec::one_sided(1.2, 2.0, q, 0.0).unwrap();
        let s = -1.5;
        let q2 = 1.5 * gamma(s)
            * crate::special_functions::gamma_star_quadrature(s, 2.0, 1e-11).unwrap().value;
        let expect = 2.0 * q2 / 2f64.powf(2.2);
        assert!((spec.levy_density(2.0).unwrap() / expect - 1.0).abs() < 1e-8);
    }

    #[test]
    fn levy_tail_examples() {
        // ∫_1^∞ e^{-θt} t^{-3/2} dt = 2e^{-θ} - 2√(πθ) erfc(√θ)
        let oracle = |theta: f64| 2.0 * (-theta).exp() - 2.0 * (std::f64::consts::PI * theta).sqrt() * erfc(theta.sqrt());
        for theta in [1e-8, 1.0] {
            let v = exp_spec(0.5, theta).levy_tail(1.0).unwrap();
            assert!((v - oracle(theta)).abs() < 1e-9, "θ={theta}: {v}");
        }
        // untempered limit
        let v = exp_spec(0.5, 1e-14).levy_tail(1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-6);
        let spec = exp_spec(0.5, 1.0);
        let t: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|&x| spec.levy_tail(x).unwrap()).collect();
        assert!(t[0] > t[1] && t[1] > t[2]);
    }

    #[test]
    fn nu1_examples() {
        let spec = exp_spec(0.5, 1.0);
        let n = spec.nu1().unwrap();
        assert_eq!(n.tail(1.0).unwrap(), 1.0);
        assert_eq!(n.density(0.5).unwrap(), 0.0);
        let r = n.tail(2.0).unwrap() / n.tail(1.0).unwrap();
        let r2 = spec.levy_tail(2.0).unwrap() / spec.levy_tail(1.0).unwrap();
        assert!((r - r2).abs() < 1e-15);
        assert_eq!(n.mgf(0.0).unwrap(), 1.0);
        // at s = θ the integrand is x^{-1-α}
        let expect = 1.0 / (0.5 * n.normalizer());
        assert!((n.mgf(1.0).unwrap() / expect - 1.0).abs() < 1e-6);
        assert_eq!(n.mgf(1.2).unwrap(), f64::INFINITY);
        // density integrates to one
        let mass = integrate(|w: f64| n.density(w.powf(-2.0)).unwrap() * 2.0 * w.powf(-3.0), 0.0, 1.0, &QuadOptions::with_tol(1e-14, 1e-12)).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn side_integral_matches_closed_form() {
        for &alpha in &[0.5, 1.5] {
            let spec = exp_spec(alpha, 1.0);
            for &(s, u) in &[
                (0.0, 1e-6),
                (0.0, 0.3),
                (0.0, 3.0),
                (0.0, 250.0),
                (0.0, 3e5),
                (0.5, 0.0),
                (1.0, 0.0),
                (1.0, 0.7),
                (1.0, 40.0),
                (-1.0, 5.0),
            ] {
                let z = Complex64::new(s, u);
                let got = spec.complex_cumulant(z).unwrap();
                let want = exp_side_closed_form(alpha, 1.0, z);
                let err = (got - want).norm();
                assert!(err < 1e-9 * want.norm().max(1.0), "α={alpha} ζ={z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn characteristic_exponent_properties() {
        let q = TemperingFunction::exponential(1.0).unwrap();
        let spec = TSAlphaSpec::new(0.5, 1.0, 1.0, q.clone(), q, 0.0).unwrap();
        assert_eq!(spec.characteristic_exponent(0.0).unwrap(), Complex64::new(0.0, 0.0));
        let a = spec.characteristic_exponent(2.3).unwrap();
        let b = spec.characteristic_exponent(-2.3).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        // log-log slope of -Re ψ on [1e2, 1e4]
        let us = crate::quadrature::logspace(1e2, 1e4, 9);
        let pts: Vec<(f64, f64)> = us
            .iter()
            .map(|&u| {
                let re = spec.characteristic_exponent(u).unwrap().re;
                assert!(re < 0.0);
                (u.ln(), (-re).ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 0.5).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn reflection() {
        let spec = TSAlphaSpec::new(
            0.7,
            1.0,
            0.4,
            TemperingFunction::exponential(1.0).unwrap(),
            TemperingFunction::gtgs(0.5, 1.0, 0.5).unwrap(),
            0.3,
        )
        .unwrap();
        let r = spec.reflect();
        assert_eq!(r.delta(Side::Plus), 0.4);
        assert_eq!(r.drift(), -0.3);
        let rr = r.reflect();
        assert_eq!(format!("{rr:?}"), format!("{spec:?}"));
        for &u in &[0.1, 1.0, 7.0, 60.0] {
            let a = r.characteristic_exponent(u).unwrap();
            let b = spec.characteristic_exponent(-u).unwrap();
            assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "u={u}");
        }
        let one = exp_spec(0.5, 1.0);
        assert_eq!(one.reflect().delta(Side::Plus), 0.0);
    }

    #[test]
    fn cumulant_against_second_scheme() {
        let spec = exp_spec(0.5, 1.0);
        let k = spec.cumulant(0.5).unwrap();
        // plain adaptive quadrature on the original variable
        let opts = QuadOptions::with_tol(1e-15, 1e-13);
        let s: f64 = 0.5;
        let near = integrate(
            |x: f64| ((s * x).exp_m1() - s * x) * (-x).exp() * x.powf(-1.5),
            0.0,
            1.0,
            &opts,
        )
        .unwrap()
        .value;
        let far = crate::quadrature::integrate_with_breaks(
            |x: f64| (s * x).exp_m1() * (-x).exp() * x.powf(-1.5),
            &[1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 300.0],
            &opts,
        )
        .unwrap()
        .value;
        assert!((k - (near + far)).abs() < 1e-8);
        assert_eq!(spec.cumulant(0.0).unwrap(), 0.0);
        assert!(spec.cumulant(1.0).unwrap().is_finite());
        assert_eq!(spec.cumulant(1.01).unwrap(), f64::INFINITY);
        // one-sided to the right: every negative tilt is finite
        assert!(spec.cumulant(-3.0).unwrap().is_finite());
    }

    #[test]
    fn small_jump_moment_finite() {
        let spec = exp_spec(1.9, 1.0);
        let m = spec.small_jump_second_moment().unwrap();
        assert!(m.is_finite() && m > 0.0);
    }

    #[test]
    fn phi2_continuity() {
        let w = Complex64::new(0.3, 0.39);
        let a = phi2(w);
        let b = (expm1_c(w) - w) / (w * w);
        assert!((a - b).norm() < 1e-13);
        assert!((phi2(Complex64::new(0.0, 0.0)) - 0.5).norm() < 1e-17);
    }
}
