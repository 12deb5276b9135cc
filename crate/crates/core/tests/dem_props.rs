use k4free_core::dem::{
    builtin_triple_specs, central_difference, hoeffding_bound, synthetic_tails,
    transform_increments, validate_spec, CheckStatus, DemVariableSpec, ScalarFn,
};
use k4free_core::{rng, ParamSet};
use proptest::prelude::*;
use rand::Rng;

fn specs() -> Vec<DemVariableSpec> {
    let mut out = Vec::new();
    for p in [
        ParamSet::paper(1_000_000).unwrap(),
        ParamSet::desk(4096).unwrap(),
        ParamSet::desk(256).unwrap(),
    ] {
        out.extend(builtin_triple_specs(&p));
    }
    out
}

#[test]
fn builtin_identity_and_integral_items_pass() {
    for spec in specs() {
        let r = validate_spec(&spec);
        for item in ["derivative_identity", "f_integral"] {
            assert_eq!(
                r.get(item).unwrap().status,
                CheckStatus::Pass,
                "{} {item}: {:?}",
                spec.name,
                r.get(item)
            );
        }
    }
}

#[test]
fn analytic_x_derivative_is_y_difference() {
    for spec in specs() {
        let end = spec.horizon();
        for i in 0..=1000 {
            let t = end * i as f64 / 1000.0;
            let d = spec.x.derivative(t, 1e-5 * end);
            let y = spec.y_plus.eval(t) - spec.y_minus.eval(t);
            assert!(
                (d - y).abs() <= 1e-12 * y.abs().max(1.0),
                "{} t={t}",
                spec.name
            );
        }
    }
}

#[test]
fn h_is_half_of_f_prime() {
    for spec in specs() {
        let end = spec.horizon();
        for i in 0..=100 {
            let t = end * i as f64 / 100.0;
            let fd = central_difference(&|u| spec.f.eval(u), t, 1e-6 * end);
            let h = spec.h.eval(t);
            assert!(
                (2.0 * h - fd).abs() <= 1e-6 * fd.abs().max(1.0),
                "{} t={t}",
                spec.name
            );
        }
    }
}

#[test]
fn desk_checklist_names_its_failures() {
    let [open, interm, partial] = builtin_triple_specs(&ParamSet::desk(4096).unwrap());
    for spec in [&open, &interm, &partial] {
        let r = validate_spec(spec);
        assert_eq!(r.items.len(), 10);
        assert!(r.failing().contains(&"m_upper"));
    }
    assert!(validate_spec(&open).failing().contains(&"nonnegative"));
}

fn test_spec() -> DemVariableSpec {
    DemVariableSpec {
        name: "test".into(),
        x: ScalarFn::new(|t| 1.0 + t * t),
        y_plus: ScalarFn::new(|t| 2.0 * t + 0.5),
        y_minus: ScalarFn::constant(0.5),
        f: ScalarFn::new(|t| 1.0 + t),
        h: ScalarFn::new(|t| 0.25 + t),
        scale: 50.0,
        s_sigma: 4.0,
        lambda: 3.0,
        beta: 1.0,
        tau: 2.0,
        u_sigma: 5.0,
        s: 200.0,
        m: 400.0,
    }
}

#[test]
fn one_step_compensated_increments() {
    let spec = test_spec();
    let yp = (spec.y_plus.eval(0.0) + spec.h.eval(0.0) / spec.s_sigma) * spec.scale / spec.s;
    let a = transform_increments(&spec, &[(yp, 0.0)], None).unwrap();
    let expected = 2.0 * spec.h.eval(0.0) / spec.s_sigma * spec.scale / spec.s;
    assert!(a.z_pm[1].abs() < 1e-15);
    assert!((a.z_pp[1] - expected).abs() < 1e-15);
    assert_eq!(a.z_pp[0], 0.0);
}

#[test]
fn frozen_sequences_stay_constant() {
    let spec = test_spec();
    let obs: Vec<(f64, f64)> = (0..50).map(|i| (0.1 * (i % 3) as f64, 0.05)).collect();
    let a = transform_increments(&spec, &obs, Some(20)).unwrap();
    for z in [&a.z_pp, &a.z_pm, &a.z_mp, &a.z_mm] {
        assert!(z[20..].iter().all(|&v| v == z[20]));
    }
    assert_eq!(a.frozen_at, Some(20));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn telescoping_identity(seed in any::<u64>(), len in 1usize..300) {
        let spec = test_spec();
        let mut r = rng::stream(seed, 0);
        let obs: Vec<(f64, f64)> = (0..len).map(|_| (r.gen_range(0.0..2.0), r.gen_range(0.0..2.0))).collect();
        let a = transform_increments(&spec, &obs, None).unwrap();
        let mut x = 0.0;
        let mut drift = 0.0;
        let mut err = 0.0;
        for (i, &(yp, ym)) in obs.iter().enumerate() {
            let t = i as f64 / spec.s;
            x += yp - ym;
            drift += (spec.y_plus.eval(t) - spec.y_minus.eval(t)) * spec.scale / spec.s;
            err += spec.h.eval(t) * 2.0 * spec.scale / (spec.s_sigma * spec.s);
            let lhs = a.z_pm[i + 1] - a.z_mp[i + 1];
            let rhs = x - drift - err;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
            let lhs = a.z_pp[i + 1] - a.z_mm[i + 1];
            let rhs = x - drift + err;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }
    }
}

#[test]
fn synthetic_tails_respect_bound() {
    let mut r = rng::stream(7, 7);
    let (m, big_m, big_n) = (100, 1.0, 10.0);
    let grid: Vec<f64> = (1..10).map(|i| i as f64 * 10.0).collect();
    for p in synthetic_tails(m, big_m, big_n, 2000, &grid, &mut r).unwrap() {
        assert!(p.empirical <= p.bound, "{p:?}");
        assert!(
            hoeffding_bound(p.a, m as f64, big_m, big_n)
                .unwrap()
                .hypothesis_ok
        );
    }
}
