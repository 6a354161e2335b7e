//! Example laws and closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, gamma_ur};

use tempered_stable::levy::TSAlphaSpec;
use tempered_stable::tempering::TemperingFunction;

pub const SQRT_PI: f64 = 1.772_453_850_905_516;
/// erf(1) to 30 digits (mpmath); statrs is off in the tenth digit here.
pub const ERF_ONE: f64 = 0.842_700_792_949_714_869;
/// Γ(-1/2, 1) to 30 digits (mpmath).
pub const GAMMA_MINUS_HALF_ONE: f64 = 0.178_147_711_781_560_690;

pub fn exponential_spec() -> TSAlphaSpec {
    TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::exponential(1.0).unwrap(), 0.0).unwrap()
}

pub fn kr_spec(r: f64) -> TSAlphaSpec {
    TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::kr(0.5, 0.3, r).unwrap(), 0.0).unwrap()
}

pub fn gtgs_spec() -> TSAlphaSpec {
    TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::gtgs(0.4, 1.0, 0.5).unwrap(), 0.0).unwrap()
}

pub fn heavy_spec() -> TSAlphaSpec {
    TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::gtgs(0.0, 1.0, 0.5).unwrap(), 0.0).unwrap()
}

/// Composite Simpson on `[a, b]` with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `ν̄(1) = Γ(-1/2, θ)` for `δ = 1`, `α = 1/2`, exponential tempering.
pub fn exp_half_levy_tail_at_one(theta: f64) -> f64 {
    2.0 * (-theta).exp() - 2.0 * (SQRT_PI * theta.sqrt()) * erfc(theta.sqrt())
}

/// With `α = 1/2`, `θ = 1`, drift `b` and weight `δ`, the law is
/// `μ_δ + IG(m, λ)` where `IG` is inverse Gaussian with mean `m = δ√π` and
/// shape `λ = 2πδ²`, and `μ_δ = b - δ√π erf(1)`.
pub struct InverseGaussian {
    pub shift: f64,
    pub m: f64,
    pub lambda: f64,
}

impl InverseGaussian {
    pub fn new(delta: f64, b: f64) -> Self {
        Self {
            shift: b - delta * SQRT_PI * ERF_ONE,
            m: delta * SQRT_PI,
            lambda: 2.0 * std::f64::consts::PI * delta * delta,
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let y = x - self.shift;
        if y <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (m, l) = (self.m, self.lambda);
        0.5 * (l / (2.0 * std::f64::consts::PI)).ln() - 1.5 * y.ln() - l * (y - m).powi(2) / (2.0 * m * m * y)
    }

    pub fn sf(&self, x: f64) -> f64 {
        let y = x - self.shift;
        if y <= 0.0 {
            return 1.0;
        }
        let (m, l) = (self.m, self.lambda);
        let r = (l / y).sqrt();
        let phi_c = |z: f64| 0.5 * erfc(z / std::f64::consts::SQRT_2);
        phi_c(r * (y / m - 1.0)) - (2.0 * l / m).exp() * phi_c(r * (y / m + 1.0))
    }
}

/// `κ(1)` for the exponential example by Simpson in variables that remove
/// both endpoint singularities: `x = t²` on `(0,1)`, `x = t^{-2}` beyond.
pub fn exp_kappa_one_simpson() -> f64 {
    let small = |t: f64| {
        let u = t * t;
        if u < 1e-4 {
            // (1 - e^{-u} - u e^{-u}) / u = u/2 - u²/3 + u³/8
            2.0 * (u / 2.0 - u * u / 3.0 + u * u * u / 8.0)
        } else {
            2.0 * (1.0 - (-u).exp() - u * (-u).exp()) / u
        }
    };
    let large = |t: f64| if t == 0.0 { 2.0 } else { 2.0 * (1.0 - (-1.0 / (t * t)).exp()) };
    simpson(small, 0.0, 1.0, 20_000) + simpson(large, 0.0, 1.0, 20_000)
}

/// `κ(1) = √π (2 - erf 1)` for the exponential example.
pub fn exp_kappa_one_closed() -> f64 {
    SQRT_PI * (2.0 - ERF_ONE)
}

/// One-sided exponential tempering, `α ∈ (0,1)`, `δ = 1`, `b = 0`:
/// `κ(ω) = Γ(-α)[(θ-ω)^α - θ^α + αθ^{α-1}ω] + ωθ^{α-1}Γ(1-α, θ)`.
pub fn exp_cumulant_closed(alpha: f64, theta: f64, omega: Complex64) -> Complex64 {
    let g = gamma(-alpha);
    let big = (Complex64::new(theta, 0.0) - omega).powf(alpha) - theta.powf(alpha)
        + alpha * theta.powf(alpha - 1.0) * omega;
    let comp = gamma_ur(1.0 - alpha, theta) * gamma(1.0 - alpha);
    g * big + omega * theta.powf(alpha - 1.0) * comp
}
