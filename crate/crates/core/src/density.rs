//! Densities and survival functions by Fourier inversion of `exp ψ`.
//!
//! Point values integrate `φ(u - is) = E e^{(s+iu)X}` along a line shifted
//! into the strip of analyticity: `s = γ₊` for the right tail, `s = -γ₋` for
//! the left tail, and the real axis when the tail is heavy. The shift turns
//! `e^{-θx}`-small values into `O(1)` integrals times an explicit factor
//! `e^{κ(s) - sx}`, so tails far below the double range are still resolved in
//! log space. The exponent along the line is tabulated once per shift by
//! piecewise Chebyshev interpolation.

use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::levy::{Side, TSAlphaSpec};
use crate::quadrature::{gauss_kronrod21, integrate, QuadOptions};

/// Chebyshev nodes per panel.
const CHEB_NODES: usize = 24;
/// Right end of the first panel; later panels double in length.
const FIRST_PANEL: f64 = 1e-7;
/// Hard cap on the tabulated frequency range.
const U_CAP: f64 = 1e7;
/// Tabulation stops once `Re κ(s+iu) - κ(s)` falls below this.
const LOG_DECAY_CUTOFF: f64 = -50.0;
/// Maximum number of oscillation half-periods integrated for one point.
const MAX_PIECES: f64 = 5e6;
/// Tail probability left outside an automatically chosen domain.
const DOMAIN_EPS: f64 = 1e-8;
/// Largest acceptable mass outside a grid domain.
const MISSING_MASS_TOL: f64 = 1e-6;
/// Largest acceptable truncation error of the grid transform.
const GRID_TRUNCATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
struct ChebPanel {
    a: f64,
    b: f64,
    coef: Vec<Complex64>,
}

impl ChebPanel {
    fn eval(&self, u: f64) -> Complex64 {
        let t = (2.0 * u - self.a - self.b) / (self.b - self.a);
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in self.coef.iter().skip(1).rev() {
            let b0 = *c + b1 * (2.0 * t) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coef[0] + b1 * t - b2
    }
}

/// `κ(s + iu)` for `u ≥ 0` as piecewise Chebyshev interpolants.
#[derive(Debug, Clone)]
pub struct PsiTable {
    shift: f64,
    kappa_shift: f64,
    panels: Vec<ChebPanel>,
    /// Largest Chebyshev tail coefficient accepted.
    pub fit_error: f64,
}

impl PsiTable {
    pub fn build(spec: &TSAlphaSpec, shift: f64) -> Result<Self> {
        let kappa_shift = spec.cumulant(shift)?;
        if !kappa_shift.is_finite() {
            return Err(Error::Domain(format!(
                "shift {shift} lies outside the exponential-moment domain"
            )));
        }
        let eval = |u: f64| spec.complex_cumulant(Complex64::new(shift, u));
        let mut panels = Vec::new();
        let mut fit_error: f64 = 0.0;
        let mut a = 0.0;
        let mut b = FIRST_PANEL;
        let mut below = 0;
        loop {
            fit_panel(&eval, a, b, 0, &mut panels, &mut fit_error)?;
            let end = panels.last().map(|p| p.eval(b)).unwrap_or_default();
            if end.re - kappa_shift < LOG_DECAY_CUTOFF {
                below += 1;
                if below >= 2 {
                    break;
                }
            } else {
                below = 0;
            }
            if b >= U_CAP {
                break;
            }
            a = b;
            b = (2.0 * b).min(U_CAP);
        }
        Ok(Self {
            shift,
            kappa_shift,
            panels,
            fit_error,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `κ(s)`, the real value at `u = 0`.
    pub fn kappa_shift(&self) -> f64 {
        self.kappa_shift
    }

    /// End of the tabulated range.
    pub fn u_max(&self) -> f64 {
        self.panels.last().map(|p| p.b).unwrap_or(0.0)
    }

    pub fn panel_edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.panels.iter().map(|p| p.a).collect();
        e.push(self.u_max());
        e
    }

    /// `κ(s + iu)`; conjugate symmetric in `u`. `None` past the table.
    pub fn kappa(&self, u: f64) -> Option<Complex64> {
        let v = u.abs();
        if v > self.u_max() {
            return None;
        }
        let i = self.panels.partition_point(|p| p.b < v).min(self.panels.len() - 1);
        let k = self.panels[i].eval(v);
        Some(if u < 0.0 { k.conj() } else { k })
    }
}

fn fit_panel(
    eval: &(dyn Fn(f64) -> Result<Complex64> + Sync),
    a: f64,
    b: f64,
    depth: usize,
    out: &mut Vec<ChebPanel>,
    fit_error: &mut f64,
) -> Result<()> {
    let n = CHEB_NODES;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let t = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos();
            eval(mid + half * t)
        })
        .collect::<Result<_>>()?;
    let mut coef = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in coef.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            acc += v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
        }
        *c = acc * (2.0 / n as f64);
    }
    coef[0] *= 0.5;
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let tail = coef[n - 3..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    // quadrature noise in κ sits near 1e-12 relative
    if tail > 1e-11 * scale && depth < 6 {
        fit_panel(eval, a, mid, depth + 1, out, fit_error)?;
        return fit_panel(eval, mid, b, depth + 1, out, fit_error);
    }
    *fit_error = fit_error.max(tail);
    out.push(ChebPanel { a, b, coef });
    Ok(())
}

/// A point value held as a logarithm, with its relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub ln_value: f64,
    pub rel_error: f64,
}

impl PointValue {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// `e^{-iux}`
    Density,
    /// `e^{-(s+iu)x} / (s+iu)`
    Tail,
    /// `Im(e^{-iux} φ) / u` on the real axis
    GilPelaez,
}

/// Fourier inversion of one TSα law and its convolution powers, with
/// exponent tables cached per contour shift.
pub struct Inverter {
    spec: TSAlphaSpec,
    tables: Mutex<Vec<(u64, Arc<PsiTable>)>>,
}

impl Inverter {
    pub fn new(spec: TSAlphaSpec) -> Self {
        Self {
            spec,
            tables: Mutex::new(Vec::new()),
        }
    }

    pub fn spec(&self) -> &TSAlphaSpec {
        &self.spec
    }

    pub fn table(&self, shift: f64) -> Result<Arc<PsiTable>> {
        let key = shift.to_bits();
        if let Some((_, t)) = self.tables.lock().unwrap().iter().find(|(k, _)| *k == key) {
            return Ok(t.clone());
        }
        let t = Arc::new(PsiTable::build(&self.spec, shift)?);
        self.tables.lock().unwrap().push((key, t.clone()));
        Ok(t)
    }

    /// Characteristic function `exp ψ(u)` from the table on the real axis.
    pub fn cf(&self, u: f64) -> Result<Complex64> {
        let t = self.table(0.0)?;
        Ok(t.kappa(u).map(|k| k.exp()).unwrap_or_default())
    }

    /// Contour shift used on each tail.
    pub fn shift_for(&self, side: Side) -> f64 {
        let spec = &self.spec;
        let g = spec.tail_index(side);
        let s = if spec.delta(side) == 0.0 {
            // no jumps that way: every exponential moment exists
            1.0
        } else {
            g
        };
        side.sign() * s
    }

    fn shift_at(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.shift_for(Side::Plus)
        } else {
            self.shift_for(Side::Minus)
        }
    }

    pub fn pdf_point(&self, x: f64, tol: f64) -> Result<f64> {
        Ok(self.ln_pdf_point_fold(x, tol, 1)?.value())
    }

    pub fn ln_pdf_point(&self, x: f64, tol: f64) -> Result<PointValue> {
        self.ln_pdf_point_fold(x, tol, 1)
    }

    pub fn sf_point(&self, x: f64, tol: f64) -> Result<f64> {
        self.sf_point_fold(x, tol, 1)
    }

    pub fn ln_sf_point(&self, x: f64, tol: f64) -> Result<PointValue> {
        self.ln_sf_point_fold(x, tol, 1)
    }

    /// Upper tail of the two-fold convolution, from `exp(2ψ)`.
    pub fn convolution_sf(&self, x: f64, tol: f64) -> Result<f64> {
        self.sf_point_fold(x, tol, 2)
    }

    pub fn ln_convolution_sf(&self, x: f64, tol: f64) -> Result<PointValue> {
        self.ln_sf_point_fold(x, tol, 2)
    }

    /// Density of the `fold`-fold convolution at `x`, in log space.
    pub fn ln_pdf_point_fold(&self, x: f64, tol: f64, fold: u32) -> Result<PointValue> {
        check_tol(tol)?;
        let s = self.shift_at(x);
        let table = self.table(s)?;
        let m = fold as f64;
        let (r, err) = self.contour_integral(&table, fold, x, Kernel::Density, tol)?;
        if !(r > err) {
            return Err(Error::NonPositive {
                x,
                value: r,
                achieved: err,
            });
        }
        Ok(PointValue {
            ln_value: m * table.kappa_shift() - s * x + (r / std::f64::consts::PI).ln(),
            rel_error: err / r,
        })
    }

    pub fn sf_point_fold(&self, x: f64, tol: f64, fold: u32) -> Result<f64> {
        check_tol(tol)?;
        let s = self.shift_at(x);
        if s == 0.0 {
            return self.gil_pelaez(x, tol, fold).map(|(v, _)| v);
        }
        let table = self.table(s)?;
        let m = fold as f64;
        let (r, _) = self.contour_integral(&table, fold, x, Kernel::Tail, tol)?;
        let v = (m * table.kappa_shift() - s * x).exp() * r / std::f64::consts::PI;
        // a left shift yields the distribution function
        Ok(if s > 0.0 { v } else { 1.0 + v })
    }

    /// `ln F̄(x)` for the `fold`-fold convolution. Deep right tails stay
    /// accurate because the shifted integral carries the small factor
    /// explicitly.
    pub fn ln_sf_point_fold(&self, x: f64, tol: f64, fold: u32) -> Result<PointValue> {
        check_tol(tol)?;
        let s = self.shift_at(x);
        if s <= 0.0 {
            let (v, err) = if s == 0.0 {
                self.gil_pelaez(x, tol, fold)?
            } else {
                let table = self.table(s)?;
                let (r, e) = self.contour_integral(&table, fold, x, Kernel::Tail, tol)?;
                let scale = (fold as f64 * table.kappa_shift() - s * x).exp() / std::f64::consts::PI;
                (1.0 + scale * r, scale * e)
            };
            if !(v > err) {
                return Err(Error::NonPositive {
                    x,
                    value: v,
                    achieved: err,
                });
            }
            return Ok(PointValue {
                ln_value: v.ln(),
                rel_error: err / v,
            });
        }
        let table = self.table(s)?;
        let (r, err) = self.contour_integral(&table, fold, x, Kernel::Tail, tol)?;
        if !(r > err) {
            return Err(Error::NonPositive {
                x,
                value: r,
                achieved: err,
            });
        }
        Ok(PointValue {
            ln_value: fold as f64 * table.kappa_shift() - s * x + (r / std::f64::consts::PI).ln(),
            rel_error: err / r,
        })
    }

    fn gil_pelaez(&self, x: f64, tol: f64, fold: u32) -> Result<(f64, f64)> {
        let table = self.table(0.0)?;
        let (r, err) = self.contour_integral(&table, fold, x, Kernel::GilPelaez, tol)?;
        let pi = std::f64::consts::PI;
        Ok((0.5 + r / pi, err / pi))
    }

    /// `Re ∫_0^U g(u) du` for the chosen kernel, with
    /// `g = exp(m(κ(s+iu) - κ(s)))·kernel`. Returns the value and an error bound.
    fn contour_integral(
        &self,
        table: &PsiTable,
        fold: u32,
        x: f64,
        kernel: Kernel,
        tol: f64,
    ) -> Result<(f64, f64)> {
        let m = fold as f64;
        let s = table.shift();
        let k0 = table.kappa_shift();
        let g = |u: f64| -> f64 {
            let k = match table.kappa(u) {
                Some(k) => k,
                None => return 0.0,
            };
            let phi = (m * (k - k0)).exp();
            match kernel {
                Kernel::Density => (phi * Complex64::from_polar(1.0, -u * x)).re,
                Kernel::Tail => {
                    let z = Complex64::new(s, u);
                    (phi * Complex64::from_polar(1.0, -u * x) / z).re
                }
                Kernel::GilPelaez => (phi * Complex64::from_polar(1.0, -u * x)).im / u,
            }
        };
        let envelope = |u: f64| -> f64 {
            let k = match table.kappa(u) {
                Some(k) => k,
                None => return 0.0,
            };
            let phi = (m * (k.re - k0)).exp();
            match kernel {
                Kernel::Density => phi,
                Kernel::Tail => phi / s.hypot(u),
                Kernel::GilPelaez => phi * x.abs().max(1.0),
            }
        };

        let edges = table.panel_edges();
        let u_max = table.u_max();
        let step = if x == 0.0 { f64::INFINITY } else { std::f64::consts::PI / x.abs() };
        if u_max / step > MAX_PIECES {
            return Err(Error::Convergence {
                what: "inversion integral (too many oscillations)",
                achieved: f64::INFINITY,
                requested: tol,
            });
        }
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let k = ((w[1] - w[0]) / step).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / k as f64;
            for j in 0..k {
                let lo = w[0] + j as f64 * h;
                let hi = if j + 1 == k { w[1] } else { lo + h };
                pieces.push((lo, hi));
            }
        }

        // scale of the integrand, for the first-pass absolute target
        let mass: f64 = edges
            .windows(2)
            .map(|w| gauss_kronrod21(&envelope, w[0], w[1]).0)
            .sum();
        let truncation = envelope(u_max * (1.0 - 1e-12)) * u_max;

        let run = |target: f64| -> Result<(f64, f64)> {
            let mut total = 0.0;
            let mut err = 0.0;
            for &(lo, hi) in &pieces {
                let share = target * (hi - lo) / u_max;
                let (v, e) = gauss_kronrod21(&g, lo, hi);
                if e <= share.max(1e-17 * v.abs()) {
                    total += v;
                    err += e;
                } else {
                    let r = integrate(&g, lo, hi, &QuadOptions {
                        abs_tol: share,
                        rel_tol: 1e-15,
                        max_intervals: 200,
                    })
                    .or_else(|e| match e {
                        Error::Convergence { achieved, .. } => {
                            let (v, _) = gauss_kronrod21(&g, lo, hi);
                            Ok(crate::quadrature::QuadResult {
                                value: v,
                                abs_error: achieved,
                                evaluations: 0,
                            })
                        }
                        other => Err(other),
                    })?;
                    total += r.value;
                    err += r.abs_error;
                }
            }
            Ok((total, err + truncation))
        };

        let first = run(1e-10 * mass)?;
        let want = tol * first.0.abs();
        if first.1 <= want {
            return Ok(first);
        }
        let second = run(want.max(1e-15 * mass))?;
        Ok(second)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 1e-12 && tol < 1.0) {
        return Err(Error::Domain(format!("tolerance must lie in [1e-12, 1), got {tol}")));
    }
    Ok(())
}

pub fn pdf_point(spec: &TSAlphaSpec, x: f64, tol: f64) -> Result<f64> {
    Inverter::new(spec.clone()).pdf_point(x, tol)
}

pub fn sf_point(spec: &TSAlphaSpec, x: f64, tol: f64) -> Result<f64> {
    Inverter::new(spec.clone()).sf_point(x, tol)
}

pub fn convolution_sf(spec: &TSAlphaSpec, x: f64, tol: f64) -> Result<f64> {
    Inverter::new(spec.clone()).convolution_sf(x, tol)
}

/// Equispaced density and survival values from one FFT.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
    pub pdf_values: Vec<f64>,
    pub sf_values: Vec<f64>,
    /// Probability outside the domain, which folds back onto the grid.
    pub aliasing_error_estimate: f64,
    /// `(1/π) ∫_{u_max}^∞ |φ|` beyond the highest frequency used.
    pub truncation_error_estimate: f64,
}

impl DensityGrid {
    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn mass(&self) -> f64 {
        self.pdf_values.iter().sum::<f64>() * self.dx
    }

    pub fn mean(&self) -> f64 {
        self.pdf_values
            .iter()
            .enumerate()
            .map(|(j, p)| self.x(j) * p)
            .sum::<f64>()
            * self.dx
    }

    /// Linear interpolation of the distribution function `1 - sf`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.dx;
        if t <= 0.0 {
            return 1.0 - self.sf_values[0];
        }
        let j = t.floor() as usize;
        if j + 1 >= self.n {
            return 1.0 - self.sf_values[self.n - 1];
        }
        let f = t - j as f64;
        1.0 - (self.sf_values[j] * (1.0 - f) + self.sf_values[j + 1] * f)
    }

    /// Point where the interpolated distribution function reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let j = self
            .sf_values
            .iter()
            .position(|&sf| 1.0 - sf >= p)
            .unwrap_or(self.n - 1);
        if j == 0 {
            return self.x0;
        }
        let (c0, c1) = (1.0 - self.sf_values[j - 1], 1.0 - self.sf_values[j]);
        self.x(j - 1) + self.dx * (p - c0) / (c1 - c0)
    }
}

/// Density on `x_j = a + j(b-a)/n`, `n` a power of two `≥ 2¹⁰`.
pub fn pdf_grid(spec: &TSAlphaSpec, domain: (f64, f64), n: usize) -> Result<DensityGrid> {
    pdf_grid_with(&Inverter::new(spec.clone()), domain, n)
}

pub fn pdf_grid_with(inv: &Inverter, domain: (f64, f64), n: usize) -> Result<DensityGrid> {
    let (a, b) = domain;
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("grid domain [{a}, {b}] is empty or unbounded")));
    }
    if n < 1024 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("grid size must be a power of two >= 1024, got {n}")));
    }
    let table = inv.table(0.0)?;
    let dx = (b - a) / n as f64;
    let du = 2.0 * std::f64::consts::PI / (n as f64 * dx);
    let u_top = (n - 1) as f64 * du;

    let truncation = abs_cf_tail(&table, u_top) / std::f64::consts::PI;
    if truncation > GRID_TRUNCATION_TOL {
        let mut u_need = u_top;
        while abs_cf_tail(&table, u_need) / std::f64::consts::PI > GRID_TRUNCATION_TOL && u_need < table.u_max() {
            u_need *= 1.25;
        }
        let required_n = ((u_need * (b - a) / (2.0 * std::f64::consts::PI)).ceil() as usize + 1)
            .next_power_of_two();
        return Err(Error::GridTooCoarse { required_n });
    }

    let coeffs: Vec<(f64, Complex64)> = (0..n)
        .map(|k| {
            let u = k as f64 * du;
            let w = if k == 0 { 0.5 } else { 1.0 };
            let phi = table.kappa(u).map(|kk| kk.exp()).unwrap_or_default();
            (u, phi * Complex64::from_polar(w, -u * a))
        })
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut buf: Vec<Complex64> = coeffs.iter().map(|c| c.1).collect();
    fft.process(&mut buf);
    // p' from the same sum with φ(u) replaced by -iu φ(u)
    let mut dbuf: Vec<Complex64> = coeffs.iter().map(|&(u, c)| Complex64::new(0.0, -u) * c).collect();
    fft.process(&mut dbuf);
    let scale = du / std::f64::consts::PI;
    // negative values are round-off where the density vanishes
    let pdf_values: Vec<f64> = buf.iter().map(|c| (c.re * scale).max(0.0)).collect();
    let slopes: Vec<f64> = dbuf.iter().map(|c| c.re * scale).collect();

    let tol = 1e-8;
    let tail_b = inv.sf_point(b, tol)?;
    let head_a = 1.0 - inv.sf_point(a, tol)?;
    let missing = tail_b.max(0.0) + head_a.max(0.0);
    if missing > MISSING_MASS_TOL {
        return Err(Error::DomainTooNarrow { missing_mass: missing });
    }

    let mut sf_values = vec![0.0; n];
    let mut acc = tail_b.max(0.0);
    // trapezoid from x_j to b with p(b) taken as 0, plus the Euler-Maclaurin
    // end correction -(dx²/12)(p'(b) - p'(x_j))
    let mut prev = 0.0;
    let end_slope = slopes[n - 1];
    for j in (0..n).rev() {
        acc += 0.5 * dx * (pdf_values[j] + prev);
        prev = pdf_values[j];
        let corrected = acc - dx * dx / 12.0 * (end_slope - slopes[j]);
        sf_values[j] = corrected.clamp(0.0, 1.0);
    }

    Ok(DensityGrid {
        x0: a,
        dx,
        n,
        pdf_values,
        sf_values,
        aliasing_error_estimate: missing,
        truncation_error_estimate: truncation,
    })
}

/// `∫_{u0}^{U} |φ(u)| du` over the table plus a crude bound past its end.
fn abs_cf_tail(table: &PsiTable, u0: f64) -> f64 {
    let u_max = table.u_max();
    if u0 >= u_max {
        return 0.0;
    }
    let f = |u: f64| table.kappa(u).map(|k| k.re.exp()).unwrap_or(0.0);
    let mut edges: Vec<f64> = table.panel_edges().into_iter().filter(|&e| e > u0).collect();
    edges.insert(0, u0);
    edges
        .windows(2)
        .map(|w| gauss_kronrod21(&f, w[0], w[1]).0)
        .sum::<f64>()
        + f(u_max * (1.0 - 1e-12)) * u_max
}

/// Domain `[a, b]` whose edges carry less than `1e-8` probability, from
/// Chernoff bounds `P(X ≥ b) ≤ e^{κ(s) - sb}` where exponential moments
/// exist and from point inversion where they do not.
pub fn auto_domain(spec: &TSAlphaSpec) -> Result<(f64, f64)> {
    let inv = Inverter::new(spec.clone());
    let b = edge(spec, &inv, Side::Plus)?;
    let a = edge(spec, &inv, Side::Minus)?;
    Ok((a, b))
}

fn edge(spec: &TSAlphaSpec, inv: &Inverter, side: Side) -> Result<f64> {
    let sign = side.sign();
    let s_top = if spec.delta(side) == 0.0 { 50.0 } else { spec.tail_index(side) };
    let ln_eps = DOMAIN_EPS.ln();
    if s_top > 0.0 {
        let mut best = f64::INFINITY;
        for i in 0..60 {
            let s = s_top * 10f64.powf(-3.0 * (59 - i) as f64 / 59.0);
            let k = spec.cumulant(sign * s)?;
            if k.is_finite() {
                best = best.min((k - ln_eps) / s);
            }
        }
        if best.is_finite() {
            return Ok(sign * best);
        }
    }
    // heavy tail: walk out until the point inversion says the tail is small
    let mut x: f64 = 1.0;
    while x < 1e9 {
        let p = if sign > 0.0 {
            inv.sf_point(x, 1e-6)?
        } else {
            1.0 - inv.sf_point(-x, 1e-6)?
        };
        if p < DOMAIN_EPS {
            return Ok(sign * x);
        }
        x *= 2.0;
    }
    Err(Error::DomainTooNarrow { missing_mass: DOMAIN_EPS })
}

/// Smallest power-of-two grid on `domain` that passes the truncation check.
pub fn auto_grid(inv: &Inverter, domain: (f64, f64)) -> Result<DensityGrid> {
    let mut n = 1024;
    loop {
        match pdf_grid_with(inv, domain, n) {
            Err(Error::GridTooCoarse { required_n }) if required_n > n && required_n <= 1 << 24 => {
                n = required_n;
            }
            other => return other,
        }
    }
}
