//! Worked systems against an independent undetermined-coefficients oracle.

mod common;

use common::{centre_system, cs_system, fields, oracle, to_map};

use ultramani_core::dynamics::{stable_membership, Verdict, Witness};
use ultramani_core::field::{AbsValue, FieldSpec};
use ultramani_core::manifolds::{
    centre_chart, centre_stable_chart, irwin_stable_chart, irwin_unstable_chart, normalize, series_chart,
    shell_samples, verify_invariance, Mode,
};
use ultramani_core::series::{MultiIndex, TruncatedMap};

#[test]
fn centre_stable_chart_matches_oracle() {
    for f in fields() {
        let s = cs_system(f);
        let map = to_map(&s, &[0, 1], f, AbsValue::ONE);
        let sys = normalize(&map, AbsValue::ONE, Mode::CentreStable).unwrap();
        assert_eq!(sys.lambda(), &f.one());
        let chart = centre_stable_chart(&sys, 8).unwrap();
        assert!(chart.certification.pass, "{:?}", chart.certification);
        let want = oracle(&s, 8, f);
        let phi = chart.unscaled(&sys).unwrap();
        for k in 2..=8u32 {
            let got = phi.component(k).coeff(0, &MultiIndex::new(vec![k]));
            assert!(got.agrees_to(&want[0][k as usize], 30), "degree {k}: {got} vs {}", want[0][k as usize]);
        }
    }
}

#[test]
fn centre_chart_matches_oracle() {
    for f in fields() {
        let s = centre_system(f);
        let map = to_map(&s, &[1, 0, 2], f, AbsValue::ONE);
        let sys = normalize(&map, AbsValue::ONE, Mode::Centre).unwrap();
        let chart = centre_chart(&sys, 8).unwrap();
        assert!(chart.certification.pass, "{:?}", chart.certification);
        let want = oracle(&s, 8, f);
        let phi = chart.unscaled(&sys).unwrap();
        let p = f.uniformizer();
        let d2 = p.div(&(&f.one() - &p)).unwrap();
        let e2 = (&p * &p).div(&(&p - &f.one())).unwrap();
        assert!(want[0][2].agrees_to(&d2, 30));
        assert!(want[1][2].agrees_to(&e2, 30));
        for k in 2..=8u32 {
            for j in 0..2 {
                let got = phi.component(k).coeff(j, &MultiIndex::new(vec![k]));
                assert!(got.agrees_to(&want[j][k as usize], 30), "degree {k}, output {j}");
            }
        }
    }
}

#[test]
fn fault_injection_is_caught_at_its_degree() {
    let f = FieldSpec::padic(5, 40).unwrap();
    let map = to_map(&cs_system(f), &[0, 1], f, AbsValue::ONE);
    let sys = normalize(&map, AbsValue::ONE, Mode::CentreStable).unwrap();
    let mut chart = centre_stable_chart(&sys, 8).unwrap();
    let idx = MultiIndex::new(vec![5]);
    let c = chart.phi.component(5).coeff(0, &idx);
    chart.phi.add_term(0, idx, f.uniformizer().pow(38).unwrap());
    assert_ne!(chart.phi.component(5).coeff(0, &MultiIndex::new(vec![5])), c);
    let cert = verify_invariance(&sys, &chart, 8, 10);
    assert!(!cert.pass);
    assert_eq!(cert.first_failing_degree, Some(5));
}

#[test]
fn irwin_agrees_with_series_in_the_gap() {
    let f = FieldSpec::padic(5, 40).unwrap();
    let map = to_map(&cs_system(f), &[0, 1], f, AbsValue::ONE);
    let a = AbsValue::from_ratio(1, 2);
    let sys = normalize(&map, a, Mode::Stable).unwrap();
    let chart = series_chart(&sys, 20).unwrap();
    let tol = AbsValue::from_int_exponent(36);
    for x in shell_samples(f, &sys.block_weights(0), sys.radius(), 10, 7) {
        let sol = irwin_stable_chart(&sys, &x, None).unwrap();
        let diff = &sol.value[0] - &chart.eval(&x)[0];
        assert!(diff.abs_bound() <= tol, "x = {}: {}", x[0], diff);
        assert!(sol.lip_g < AbsValue::ONE);
    }
}

#[test]
fn unstable_orbit_with_nilpotent_tangent() {
    let f = FieldSpec::padic(5, 40).unwrap();
    let p = f.uniformizer();
    let mut m = TruncatedMap::zero(f, 2, 2, 2, AbsValue::ONE);
    m.add_term(0, MultiIndex::new(vec![2, 0]), f.one());
    m.add_term(1, MultiIndex::new(vec![0, 1]), p.inv().unwrap());
    m.add_term(1, MultiIndex::new(vec![2, 0]), f.one());
    let sys = normalize(&m, AbsValue::ONE, Mode::Unstable).unwrap();
    let y = vec![p.pow(2).unwrap()];
    let sol = irwin_unstable_chart(&sys, &y, Some(10)).unwrap();
    assert!(sol.orbit.len() >= 11);
    assert!(sol.lip_g < AbsValue::ONE);
}

#[test]
fn membership_verdicts_on_the_worked_system() {
    let f = FieldSpec::padic(5, 40).unwrap();
    let p = f.uniformizer();
    let map = to_map(&cs_system(f), &[0, 1], f, AbsValue::ONE);
    let sys = normalize(&map, AbsValue::ONE, Mode::CentreStable).unwrap();
    let chart = centre_stable_chart(&sys, 8).unwrap();
    let b = AbsValue::from_ratio(1, 2);

    let off = stable_membership(&sys, &chart, &[f.zero(), p.clone()], Some(b), 20).unwrap();
    assert_eq!(off.verdict, Verdict::NonMember);
    match off.witness {
        Witness::BoundViolated { step, norm, bound } => {
            assert_eq!(step, 1);
            assert_eq!(norm, AbsValue::ONE);
            assert!(norm > bound);
        }
        w => panic!("unexpected witness {w:?}"),
    }

    let on = chart.graph_point(&[p.pow(2).unwrap()]);
    let cert = stable_membership(&sys, &chart, &on, None, 20).unwrap();
    assert_eq!(cert.verdict, Verdict::Member);
    let zero = stable_membership(&sys, &chart, &[f.zero(), f.zero()], None, 20).unwrap();
    assert_eq!(zero.verdict, Verdict::Member);
}
