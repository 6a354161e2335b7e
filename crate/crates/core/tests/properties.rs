//! Invariants checked over random parameters.

mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::simpson;
use tempered_stable::cli::parse_config;
use tempered_stable::diagnostics::{nu1_convolution_ratio, nu1_dominating_bound, RatioCurve};
use tempered_stable::levy::{Side, TSAlphaSpec};
use tempered_stable::quadrature::logspace;
use tempered_stable::tempering::{check_monotone_ratio, TemperingFunction};
use tempered_stable::Error;

fn tempering() -> impl Strategy<Value = (f64, TemperingFunction)> {
    prop_oneof![
        (0.1f64..1.9, 0.05f64..3.0).prop_map(|(a, t)| (a, TemperingFunction::exponential(t).unwrap())),
        // α + p kept clear of the excluded integers
        (0.1f64..0.8, 0.05f64..0.15, 0.5f64..3.0)
            .prop_map(|(a, p, r)| (a, TemperingFunction::kr(a, p, r).unwrap())),
        (0.1f64..1.9, 0.0f64..1.0, 0.2f64..2.0, 0.2f64..0.95)
            .prop_map(|(a, t, l, g)| (a, TemperingFunction::gtgs(t, l, g).unwrap())),
    ]
}

fn two_sided() -> impl Strategy<Value = TSAlphaSpec> {
    (0.1f64..1.9, 0.1f64..2.0, 0.0f64..2.0, 0.1f64..3.0, 0.1f64..3.0, -1.0f64..1.0).prop_map(
        |(a, dp, dm, tp, tm, b)| {
            TSAlphaSpec::new(
                a,
                dp,
                dm,
                TemperingFunction::exponential(tp).unwrap(),
                TemperingFunction::exponential(tm).unwrap(),
                b,
            )
            .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tempering_is_a_survival_function((_a, q) in tempering(), x in 0.01f64..50.0, h in 0.01f64..5.0) {
        let (a, b) = (q.eval(x).unwrap(), q.eval(x + h).unwrap());
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b <= a);
    }

    #[test]
    fn translation_ratio_is_monotone((_a, q) in tempering(), y in 0.1f64..5.0) {
        let xs = logspace(0.1, 100.0, 60);
        let r = check_monotone_ratio(&q, y, &xs);
        prop_assert!(r.monotone, "violation at {:?}", r.first_violation);
        // log-convexity: the ratio rises to its limit e^{-γy} from below
        let limit = (-q.tail_index() * y).exp();
        for v in r.ratios {
            prop_assert!(v > 0.0 && v <= limit * (1.0 + 1e-9));
        }
    }

    #[test]
    fn characteristic_exponent_symmetries(spec in two_sided(), u in 0.0f64..50.0) {
        let p = spec.characteristic_exponent(u).unwrap();
        let m = spec.characteristic_exponent(-u).unwrap();
        prop_assert!(p.re <= 1e-12);
        prop_assert!((p - m.conj()).norm() < 1e-10 * p.norm().max(1.0));
        let r = spec.reflect().characteristic_exponent(u).unwrap();
        prop_assert!((r - m).norm() < 1e-10 * m.norm().max(1.0));
    }

    #[test]
    fn drift_enters_linearly(spec in two_sided(), u in -30.0f64..30.0, db in -2.0f64..2.0) {
        let moved = TSAlphaSpec::new(
            spec.alpha(),
            spec.delta(Side::Plus),
            spec.delta(Side::Minus),
            spec.tempering(Side::Plus).clone(),
            spec.tempering(Side::Minus).clone(),
            spec.drift() + db,
        )
        .unwrap();
        let d = moved.characteristic_exponent(u).unwrap() - spec.characteristic_exponent(u).unwrap();
        prop_assert!((d - Complex64::new(0.0, u * db)).norm() < 1e-10 * (1.0 + (u * db).abs()));
    }

    #[test]
    fn cumulant_is_convex(spec in two_sided(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let g = spec.tail_index(Side::Plus);
        let (s, t) = (a * g, b * g);
        let mid = spec.cumulant(0.5 * (s + t)).unwrap();
        let avg = 0.5 * (spec.cumulant(s).unwrap() + spec.cumulant(t).unwrap());
        prop_assert!(mid <= avg + 1e-10 * avg.abs().max(1.0));
    }

    #[test]
    fn big_jump_ratio_below_dominating_integral(
        alpha in 0.2f64..1.8,
        theta in 0.1f64..2.0,
        x in 4.0f64..300.0,
    ) {
        let spec = TSAlphaSpec::one_sided(alpha, 1.0, TemperingFunction::exponential(theta).unwrap(), 0.0).unwrap();
        let norm = spec.levy_tail(1.0).unwrap();
        let v = nu1_convolution_ratio(&spec, norm, x).unwrap().exp();
        let bound = 2.0 / norm * simpson(|z| nu1_dominating_bound(&spec, z).unwrap(), 1.0, 0.5 * x, 2000);
        prop_assert!(v <= bound * (1.0 + 1e-8), "{v} > {bound}");
    }

    #[test]
    fn unknown_keys_name_their_line(pad in 0usize..6, key in "[a-z]{3,9}") {
        prop_assume!(![
            "command", "alpha", "subject", "tol", "y", "x_min", "x_max", "n_points",
            "drift_b", "delta_plus", "delta_minus", "log_spacing", "output_path",
        ].contains(&key.as_str()) && !key.starts_with("control"));
        let text = format!("{}alpha = 0.5\n{key} = 1\n[plus]\nkind = exponential\ntheta = 1\n", "# c\n".repeat(pad));
        match parse_config(&text) {
            Err(Error::Parse { line, reason }) => {
                prop_assert_eq!(line, pad + 2);
                prop_assert!(reason.contains(&key));
            }
            other => prop_assert!(false, "unexpected {other:?}"),
        }
    }

    #[test]
    fn curves_with_shrinking_small_gaps_converge(c in 0.01f64..1.0, target in 0.1f64..100.0) {
        // gaps c/x fall below 0.05 by the last three points when c < 0.05·x
        let xs = logspace(1.0, 100.0, 10);
        let ln: Vec<f64> = xs.iter().map(|x| target.ln() + (c / x).ln_1p()).collect();
        let curve = RatioCurve::from_ln("t", xs.clone(), ln, target, 0.05, vec![]);
        let expect = c / xs[7] < 0.05;
        prop_assert_eq!(curve.converged, expect);
        prop_assert!((curve.last_rel_gap - c / 100.0).abs() < 1e-12);
    }
}
