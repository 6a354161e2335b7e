//! Grid and point inversion against each other and against symmetries.

mod common;

use common::*;
use tempered_stable::density::{auto_domain, auto_grid, pdf_grid, Inverter};
use tempered_stable::diagnostics::corollary_tail_curve;
use tempered_stable::levy::{Side, TSAlphaSpec};
use tempered_stable::quadrature::{integrate, QuadOptions};
use tempered_stable::tempering::TemperingFunction;
use tempered_stable::Error;

fn symmetric_spec() -> TSAlphaSpec {
    let q = TemperingFunction::exponential(1.0).unwrap();
    TSAlphaSpec::new(1.2, 1.0, 1.0, q.clone(), q, 0.0).unwrap()
}

fn skewed_spec(b: f64) -> TSAlphaSpec {
    TSAlphaSpec::new(
        1.5,
        1.0,
        0.5,
        TemperingFunction::exponential(1.0).unwrap(),
        TemperingFunction::exponential(2.0).unwrap(),
        b,
    )
    .unwrap()
}

#[test]
fn symmetric_law_has_even_density() {
    let spec = symmetric_spec();
    assert!(spec.is_symmetric());
    let grid = pdf_grid(&spec, (-20.0, 20.0), 2048).unwrap();
    for j in 1..grid.n / 2 {
        let (a, b) = (grid.pdf_values[j], grid.pdf_values[grid.n - j]);
        assert!((a - b).abs() < 1e-10, "x = {}", grid.x(j));
    }
    let inv = Inverter::new(spec);
    for x in [0.3, 2.0, 9.0] {
        let (a, b) = (inv.pdf_point(x, 1e-10).unwrap(), inv.pdf_point(-x, 1e-10).unwrap());
        assert!((a / b - 1.0).abs() < 1e-8);
    }
    assert!((inv.sf_point(0.0, 1e-10).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn grid_matches_point_values() {
    let inv = Inverter::new(skewed_spec(0.0));
    let grid = auto_grid(&inv, auto_domain(inv.spec()).unwrap()).unwrap();
    for j in (0..grid.n).step_by(97) {
        let x = grid.x(j);
        let p = inv.pdf_point(x, 1e-10).unwrap();
        assert!((grid.pdf_values[j] - p).abs() < 1e-8, "x = {x}");
        let f = inv.sf_point(x, 1e-10).unwrap();
        assert!((grid.sf_values[j] - f).abs() < 1e-6, "x = {x}: {} vs {f}, dx = {}", grid.sf_values[j], grid.dx);
    }
}

#[test]
fn drift_translates_the_density() {
    let b = 0.7;
    let (a, m) = (Inverter::new(skewed_spec(0.0)), Inverter::new(skewed_spec(b)));
    for x in [-3.0, -0.5, 0.0, 1.5, 6.0, 25.0] {
        let p0 = a.ln_pdf_point(x, 1e-10).unwrap().ln_value;
        let p1 = m.ln_pdf_point(x + b, 1e-10).unwrap().ln_value;
        assert!((p0 - p1).abs() < 1e-8, "x = {x}");
    }
}

#[test]
fn reflection_mirrors_the_density() {
    let spec = skewed_spec(0.3);
    let (a, r) = (Inverter::new(spec.clone()), Inverter::new(spec.reflect()));
    for x in [-8.0, -1.0, 0.2, 4.0, 30.0] {
        let p = a.ln_pdf_point(x, 1e-10).unwrap().ln_value;
        let q = r.ln_pdf_point(-x, 1e-10).unwrap().ln_value;
        assert!((p - q).abs() < 1e-8, "x = {x}");
    }
}

#[test]
fn minus_side_curve_is_plus_side_of_reflection() {
    let spec = skewed_spec(0.0);
    let xs = [10.0, 20.0, 40.0];
    let minus = corollary_tail_curve(&Inverter::new(spec.clone()), Side::Minus, &xs, 1e-9).unwrap();
    let plus = corollary_tail_curve(&Inverter::new(spec.reflect()), Side::Plus, &xs, 1e-9).unwrap();
    assert_eq!(minus.values, plus.values);
    assert_eq!(minus.target, plus.target);
}

#[test]
fn median_from_grid_and_point() {
    let inv = Inverter::new(exponential_spec());
    let grid = auto_grid(&inv, auto_domain(inv.spec()).unwrap()).unwrap();
    let m = grid.quantile(0.5);
    assert!((inv.sf_point(m, 1e-10).unwrap() - 0.5).abs() < 1e-4);
    // against the closed form
    let ig = InverseGaussian::new(1.0, 0.0);
    assert!((ig.sf(m) - 0.5).abs() < 1e-4);
}

#[test]
fn parseval() {
    let spec = skewed_spec(0.0);
    let inv = Inverter::new(spec.clone());
    let grid = auto_grid(&inv, auto_domain(&spec).unwrap()).unwrap();
    let lhs: f64 = grid.pdf_values.iter().map(|p| p * p).sum::<f64>() * grid.dx;
    // ∫p² = (1/π) ∫_0^∞ |φ(u)|² du
    let f = |u: f64| (2.0 * spec.characteristic_exponent(u).unwrap().re).exp();
    let rhs = integrate(f, 0.0, 200.0, &QuadOptions::with_tol(1e-14, 1e-12)).unwrap().value / std::f64::consts::PI;
    assert!((lhs / rhs - 1.0).abs() < 1e-8, "{lhs} vs {rhs}");
}

#[test]
fn convolution_sf_matches_grid_convolution() {
    let inv = Inverter::new(skewed_spec(0.0));
    let grid = pdf_grid(inv.spec(), (-15.0, 45.0), 4096).unwrap();
    let n = grid.n;
    // P(X + Y > x) = Σ_j p(x_j) dx · F̄(x - x_j), with F̄ taken from the grid
    for x in [0.0, 3.0, 10.0] {
        let mut s = 0.0;
        for j in 0..n {
            let y = x - grid.x(j);
            let f = if y < grid.x0 { 1.0 } else { 1.0 - grid.cdf_at(y) };
            s += grid.pdf_values[j] * grid.dx * f;
        }
        let c = inv.convolution_sf(x, 1e-10).unwrap();
        assert!((s - c).abs() < 1e-4, "x = {x}: {s} vs {c}");
    }
}

#[test]
fn grid_rejects_bad_inputs() {
    let spec = exponential_spec();
    assert!(matches!(pdf_grid(&spec, (0.0, 1.0), 1000), Err(Error::Domain(_))));
    assert!(matches!(pdf_grid(&spec, (2.0, 1.0), 1024), Err(Error::Domain(_))));
    assert!(matches!(pdf_grid(&spec, (-0.5, 0.5), 1024), Err(Error::DomainTooNarrow { .. })));
    match pdf_grid(&spec, (-2.0, 400.0), 1024) {
        Err(Error::GridTooCoarse { required_n }) => assert!(required_n > 1024),
        other => panic!("unexpected {other:?}"),
    }
}
