// `!(x < y)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
use approx::assert_relative_eq;
use proptest::prelude::*;
use qt3_core::bench::{
    format_sci, parse_csv_tables, render_report, run_benchmark, Format, RunSpec,
};
use qt3_core::driver::{apriori_h0, integrate, GuardMode, IntegratorConfig, Termination};
use qt3_core::field::{derivatives_of, FnField, ScalarField};
use qt3_core::jet::Jet2;
use qt3_core::problems::{builtin_problems, TABLE_PROBLEMS};
use qt3_core::riccati::{qt3_step, quadratic_model, QuadraticModel};
use qt3_core::special::arccot_real;
use qt3_core::steppers::Method;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL0: f64 = 1e-14;

fn five_point(g: impl Fn(f64) -> f64, x: f64, step: f64) -> f64 {
    (g(x - 2.0 * step) - 8.0 * g(x - step) + 8.0 * g(x + step) - g(x + 2.0 * step)) / (12.0 * step)
}

#[test]
fn jet_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let step = 1e-4;
    for p in builtin_problems() {
        let (lo, hi) = p.default_window;
        let f = |y: f64| p.field.value(y).unwrap();
        for _ in 0..1000 {
            // keep the stencil inside the window
            let y = rng.gen_range(lo + 2.0 * step..=hi - 2.0 * step);
            let d = derivatives_of(p.field.as_ref(), y).unwrap();
            let fp = five_point(f, y, step);
            assert!(
                (fp - d.fp).abs() <= 1e-6 * (1.0 + d.fp.abs()),
                "{} f' at {y}: {fp} vs {}",
                p.name,
                d.fp
            );
            let fpp = five_point(|x| derivatives_of(p.field.as_ref(), x).unwrap().fp, y, step);
            assert!(
                (fpp - d.fpp).abs() <= 1e-6 * (1.0 + d.fpp.abs()),
                "{} f'' at {y}: {fpp} vs {}",
                p.name,
                d.fpp
            );
        }
    }
}

fn jet() -> impl Strategy<Value = Jet2> {
    (-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64).prop_map(|(v, d1, d2)| Jet2::new(v, d1, d2))
}

fn within_ulps(got: f64, want: f64, scale: f64, ulps: f64) -> bool {
    (got - want).abs() <= ulps * f64::EPSILON * scale.max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn jet_neutral_elements(x in jet()) {
        prop_assert_eq!(x * Jet2::constant(1.0), x);
        prop_assert_eq!(x + Jet2::constant(0.0), x);
    }

    #[test]
    fn jet_mul_commutes_bitwise(x in jet(), y in jet()) {
        let (a, b) = (x * y, y * x);
        prop_assert_eq!(a.v.to_bits(), b.v.to_bits());
        prop_assert_eq!(a.d1.to_bits(), b.d1.to_bits());
        prop_assert_eq!(a.d2.to_bits(), b.d2.to_bits());
    }

    #[test]
    fn jet_exp_inverts_ln(v in 0.1..10.0f64, d1 in -10.0..10.0f64, d2 in -10.0..10.0f64) {
        let x = Jet2::new(v, d1, d2);
        let r = x.ln().unwrap().exp();
        prop_assert!(within_ulps(r.v, v, v, 4.0), "{:?}", r);
        prop_assert!(within_ulps(r.d1, d1, d1.abs(), 4.0), "{:?}", r);
        // the second component passes through d2/v - (d1/v)^2 + (d1/v)^2
        prop_assert!(within_ulps(r.d2, d2, d2.abs() + d1 * d1 / v, 4.0), "{:?}", r);
    }

    #[test]
    fn hmax_exceeds_rough_estimate(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64) {
        let m = QuadraticModel::new(a, b, c);
        let s = b * b + m.delta.abs();
        let rough = if s == 0.0 { f64::INFINITY } else { 2.0 / s.sqrt() };
        prop_assert!(m.h_max() >= rough * (1.0 - 1e-14), "h_max {} < {}", m.h_max(), rough);
    }

    #[test]
    fn arccot_inverts_cot(x in -1e3..1e6f64) {
        let t = arccot_real(x);
        prop_assert!(t > 0.0 && t < std::f64::consts::PI);
        let back = 1.0 / t.tan();
        prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0), "{x} -> {t} -> {back}");
    }

    // For x << 0 the result is pi - 1/|x|, and the spacing of doubles near pi
    // alone limits the relative accuracy of cot(arccot(x)) to about ulp(pi) |x|.
    #[test]
    fn arccot_inverts_cot_near_pi(x in -1e6..-1e3f64) {
        let t = arccot_real(x);
        prop_assert!(t > 0.0 && t < std::f64::consts::PI);
        let back = 1.0 / t.tan();
        let limit = 2.0 * f64::EPSILON * std::f64::consts::PI * x.abs();
        prop_assert!((back - x).abs() <= limit * x.abs(), "{x} -> {t} -> {back}");
    }

    #[test]
    fn arccot_is_strictly_decreasing(x in -1e3..1e3f64, dx in 1e-3..10.0f64) {
        prop_assert!(arccot_real(x + dx) < arccot_real(x));
    }

    #[test]
    fn driver_is_deterministic(h in 0.005..0.3f64, pi in 0usize..6, mi in 0usize..6) {
        let p = &builtin_problems()[pi];
        let cfg = IntegratorConfig::new(h, p.t_end, p.default_window);
        let method = Method::ALL[mi];
        let a = integrate(method, p.field.as_ref(), p.y0, &cfg).unwrap();
        let b = integrate(method, p.field.as_ref(), p.y0, &cfg).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.y.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.y.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn success_sample_count(h in 0.01..0.1f64, t_end in 0.5..2.0f64) {
        let p = &builtin_problems()[3]; // gompertz
        let cfg = IntegratorConfig::new(h, t_end, p.default_window);
        let traj = integrate(Method::RK4, p.field.as_ref(), p.y0, &cfg).unwrap();
        prop_assert!(traj.status.is_success());
        let ratio = t_end / h;
        if (ratio - ratio.round()).abs() > 1e-6 {
            prop_assert_eq!(traj.len(), ratio.floor() as usize + 1);
        }
        prop_assert!(traj.t.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn consistency_slope() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tested = 0;
    while tested < 200 {
        let m = QuadraticModel::new(
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(-2.0..=2.0),
        );
        // leading defect term is b c h / 2
        if (m.b * m.c).abs() < 0.1 {
            continue;
        }
        let hs: Vec<f64> = (0..12).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
        let pts: Vec<(f64, f64)> = hs
            .iter()
            .map(|&h| {
                let w = qt3_step(&m, 0.0, h, TOL0).unwrap();
                (h.ln(), (w / h - m.c).abs().ln())
            })
            .collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / n, sy / n);
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!(slope >= 0.9, "{m:?}: slope {slope}");
        assert!(qt3_step(&m, 0.3, 1e-12, TOL0).unwrap() - 0.3 < 1e-10);
        tested += 1;
    }
}

#[test]
fn even_root_symmetry_of_trig_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let m = QuadraticModel::new(
            rng.gen_range(0.5..=2.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(0.5..=2.0),
        );
        assert!(m.delta < 0.0);
        let h = 0.5 * m.h_max().min(1.0);
        let formula = |s: f64| {
            let x = 0.5 * s * h;
            2.0 * m.c * x.sin() / (s * x.cos() - m.b * x.sin())
        };
        let s = (-m.delta).sqrt();
        let (p, q) = (formula(s), formula(-s));
        assert!(within_ulps(p, q, p.abs(), 4.0), "{p} vs {q}");
        assert_relative_eq!(p, m.increment_trig(h), max_relative = 1e-15);
    }
}

#[test]
fn hmax_continuous_at_zero_discriminant() {
    for b in [0.1, 1.0, 2.0, 7.5] {
        // delta = b^2 - 4ac = 1e-12
        let m = QuadraticModel::new(1.0, b, (b * b - 1e-12) / 4.0);
        let two_over_b = 2.0 / b;
        assert!(
            (m.h_max() - two_over_b).abs() <= 1e-6 * two_over_b,
            "b={b}: {}",
            m.h_max()
        );
    }
}

#[test]
fn apriori_bound_below_every_local_blowup_time() {
    for p in builtin_problems() {
        let (lo, hi) = p.default_window;
        let est = apriori_h0(p.field.as_ref(), p.default_window, TOL0, p.t_end, 2049).unwrap();
        let rough = 2.0 / est.s_max.sqrt();
        for i in 0..100 {
            let y = lo + (hi - lo) * i as f64 / 99.0;
            let m = quadratic_model(p.field.as_ref(), y).unwrap();
            assert!(
                rough <= m.h_max() * (1.0 + 1e-12),
                "{} y={y}: {rough} > {}",
                p.name,
                m.h_max()
            );
        }
    }
}

#[test]
fn failures_truncate_to_completed_steps() {
    // logistic from 0.5 leaves [0, 5] partway
    let p = &builtin_problems()[0];
    let cfg = IntegratorConfig::new(0.05, p.t_end, (0.0, 5.0));
    for method in Method::ALL {
        let traj = integrate(method, p.field.as_ref(), p.y0, &cfg).unwrap();
        match traj.status {
            Termination::LeftWindow { at_step } => {
                assert_eq!(traj.len(), at_step + 1, "{method}");
                assert!(traj.y.iter().all(|&y| (0.0..=5.0).contains(&y)));
            }
            other => panic!("{method}: {other}"),
        }
    }
    let blowup = &builtin_problems()[6];
    let cfg = IntegratorConfig::new(0.1, 2.0, (-1.0, 2.0));
    let traj = integrate(Method::QT3, blowup.field.as_ref(), 0.0, &cfg).unwrap();
    assert!(matches!(
        traj.status,
        Termination::StepSizeUndefined { at_step: 0, .. }
    ));
    assert_eq!(traj.y, vec![0.0]);
}

#[test]
fn guard_modes_agree_when_no_guard_fires() {
    for name in TABLE_PROBLEMS {
        let p = qt3_core::problems::find_problem(name).unwrap();
        let base = IntegratorConfig::new(0.05, p.t_end, p.default_window);
        let rt = integrate(Method::QT3, p.field.as_ref(), p.y0, &base).unwrap();
        let ap = integrate(
            Method::QT3,
            p.field.as_ref(),
            p.y0,
            &base.with_guard(GuardMode::Apriori),
        )
        .unwrap();
        assert_eq!(rt, ap, "{name}");
    }
}

#[test]
fn exact_solutions_satisfy_their_equations() {
    for p in builtin_problems().into_iter().filter(|p| p.has_exact()) {
        let y = |t: f64| p.exact(t).unwrap();
        for i in 1..=50 {
            let t = p.t_end * i as f64 / 51.0;
            let dydt = five_point(y, t, 1e-3);
            let f = p.field.value(y(t)).unwrap();
            assert!(
                (dydt - f).abs() <= 1e-6 * (1.0 + f.abs()),
                "{} t={t}: {dydt} vs {f}",
                p.name
            );
        }
    }
}

#[test]
fn exact_solutions_are_monotone() {
    for p in builtin_problems().into_iter().filter(|p| p.has_exact()) {
        let ys: Vec<f64> = (0..1000)
            .map(|i| p.exact(p.t_end * i as f64 / 999.0).unwrap())
            .collect();
        assert!(ys.windows(2).all(|w| w[1] >= w[0]), "{}", p.name);
    }
}

#[test]
fn csv_round_trips_at_printed_precision() {
    let report = run_benchmark(&RunSpec::default()).unwrap();
    let csv = render_report(&report, Format::Csv).unwrap();
    let parsed = parse_csv_tables(&csv);
    assert_eq!(parsed.len(), report.tables.len());
    for (table, back) in report.tables.iter().zip(&parsed) {
        assert_eq!(table.problem, back.problem);
        assert_eq!(back.header, ["h", "K3", "BS3", "RK4", "QT3"]);
        for ((h, row), (bh, brow)) in table.steps.iter().zip(&table.cells).zip(&back.rows) {
            assert_eq!(h, bh);
            for (cell, parsed) in row.iter().zip(brow) {
                let clamped = cell.clamped().unwrap();
                let parsed = parsed.unwrap();
                // identical to the printed value, and within half a unit of the fifth digit
                assert_eq!(parsed, format_sci(clamped).parse::<f64>().unwrap());
                assert!((parsed - clamped).abs() <= 5e-5 * clamped);
                assert_eq!(parsed == 0.0, clamped == 0.0);
            }
        }
    }
}

#[test]
fn user_fields_get_automatic_derivatives() {
    let f = FnField::new("cubic", |y: Jet2| Ok(y * y * y - y.scale(2.0)));
    let d = derivatives_of(&f, 1.5).unwrap();
    assert_eq!(
        (d.f, d.fp, d.fpp),
        (1.5f64.powi(3) - 3.0, 3.0 * 2.25 - 2.0, 9.0)
    );
    assert_eq!(f.value(2.0).unwrap(), 4.0);
}
