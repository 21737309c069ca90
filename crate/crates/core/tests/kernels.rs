use std::f64::consts::PI;

use gcarma::expspline::GreenFunction;
use gcarma::filters::min_on_unit_circle;
use gcarma::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random pole sets: real poles and conjugate pairs, kept apart so that
/// root-finding is well conditioned; optionally some imaginary poles.
fn pole_set(max_n: usize, allow_imaginary: bool) -> impl Strategy<Value = Vec<C64>> {
    let pole = prop_oneof![
        (0.1..2.0f64, any::<bool>()).prop_map(|(r, neg)| vec![c(if neg { -r } else { r }, 0.0)]),
        (0.1..1.5f64, 0.2..3.0f64, any::<bool>()).prop_map(|(r, i, neg)| {
            let re = if neg { -r } else { r };
            vec![c(re, i), c(re, -i)]
        }),
        (0.0..3.0f64).prop_map(move |i| if allow_imaginary { vec![c(0.0, i)] } else { vec![c(-0.2 - i / 2.0, 0.0)] }),
    ];
    prop::collection::vec(pole, 1..=max_n).prop_map(move |groups| {
        let mut poles: Vec<C64> = groups.into_iter().flatten().collect();
        poles.truncate(max_n);
        poles
    })
}

fn well_separated(poles: &[C64], gap: f64) -> bool {
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            if (poles[i] - poles[j]).norm() < gap {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn admissible_systems_have_positive_bspline_spectrum(poles in pole_set(6, true)) {
        prop_assume!(well_separated(&poles, 0.1));
        let sys = match PoleZeroSystem::all_pole(poles) { Ok(s) => s, Err(_) => return Ok(()) };
        let bl = discrete_bspline_filter(&sys).unwrap();
        prop_assert!(min_on_unit_circle(&bl, 1024) > 0.0);
        for k in 0..sys.order() as i64 {
            prop_assert!((bl.at(-k) - bl.at(k).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn spectral_factor_reproduces_bspline_kernel(poles in pole_set(6, true), zero in prop::option::of(-2.0..2.0f64)) {
        prop_assume!(well_separated(&poles, 0.15));
        let zeros: Vec<C64> = zero.filter(|_| poles.len() > 1).map(|z| vec![c(z, 0.0)]).unwrap_or_default();
        let sys = match PoleZeroSystem::new(poles, zeros, c(1.0, 0.0)) { Ok(s) => s, Err(_) => return Ok(()) };
        let bl = discrete_bspline_filter(&sys).unwrap();
        let f = spectral_factorize_detailed(&bl).unwrap();
        prop_assert!(f.roots.iter().all(|z| z.norm() < 1.0));
        let scale = bl.taps().iter().fold(1.0f64, |m, t| m.max(t.norm()));
        prop_assert!(f.residual <= 1e-9 * scale);
        for i in 0..1024 {
            let w = 2.0 * PI * i as f64 / 1024.0;
            let target = bl.frequency_response(w).re;
            prop_assert!((f.filter.frequency_response(w).norm_sqr() - target).abs() <= 1e-9 * target.max(1e-300) + 1e-12);
        }
    }

    #[test]
    fn localization_annihilates_exponentials(poles in pole_set(6, true)) {
        let d = localization_coeffs(&poles);
        prop_assert_eq!(d.len(), poles.len() + 1);
        prop_assert_eq!(d.at(0), c(1.0, 0.0));
        for &p in &poles {
            let s = Signal::new(0, (0..20).map(|k| (p * k as f64).exp()).collect());
            let scale = s.max_abs();
            let u = gcarma::inverse::fir_valid(d.taps(), &s).unwrap();
            prop_assert!(u.max_abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn left_inverse_after_warm_up(poles in pole_set(5, false), data in prop::collection::vec(-1.0..1.0f64, 50)) {
        prop_assume!(well_separated(&poles, 0.05));
        let sys = PoleZeroSystem::all_pole(poles).unwrap();
        let rate = sys.min_decay_rate().unwrap();
        let warm = (-(1e-12f64).ln() / rate).ceil() as i64 + 4 * sys.order() as i64;
        // A bounded signal on a long window; compare in the middle.
        let x = Signal::new(-warm - 60, (0..(2 * warm + 170)).map(|i| c(data[i as usize % data.len()], 0.0)).collect());
        let u = apply_localization(&sys, &x).unwrap();
        let (back, report) = apply_inverse_composite(&sys, &u);
        prop_assert!(report.residuals.is_empty());
        for k in -40..40 {
            prop_assert!((back.at(k) - x.at(k)).norm() < 1e-10, "k={}", k);
        }
        // Bounded-input bounded-output gain.
        let bound: f64 = sys.poles().iter().map(|p| 1.0 / (1.0 - (-p.re.abs()).exp())).product();
        let (y, _) = apply_inverse_composite(&sys, &x);
        prop_assert!(y.max_abs() <= bound * x.max_abs() * (1.0 + 1e-9));
    }

    #[test]
    fn increment_charfn_is_bounded(w1 in -3.0..3.0f64, w2 in -3.0..3.0f64) {
        let sys = PoleZeroSystem::all_pole(vec![c(-0.05, PI / 2.0), c(-0.05, -PI / 2.0)]).unwrap();
        for spec in [
            InnovationSpec::gaussian(0.5).unwrap(),
            InnovationSpec::poisson(1.0 / 32.0, AmplitudeLaw::default()).unwrap(),
            InnovationSpec::symmetric_stable(1.2, 1.0).unwrap(),
        ] {
            let v = charfn_increment(&spec, &sys, &[w1, w2]).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-12);
            let m = charfn_increment(&spec, &sys, &[-w1, -w2]).unwrap();
            prop_assert!((v - m.conj()).norm() < 1e-9);
        }
    }
}

#[test]
fn green_function_examples() {
    let g = GreenFunction::new(&PoleZeroSystem::all_pole(vec![c(-1.0, 0.0)]).unwrap());
    let g2 = GreenFunction::new(&PoleZeroSystem::all_pole(vec![c(-1.0, 0.0), c(-2.0, 0.0)]).unwrap());
    let g3 = GreenFunction::new(&PoleZeroSystem::all_pole(vec![c(1.0, 0.0)]).unwrap());
    for i in 0..200 {
        let t = -5.0 + 0.05 * i as f64 + 0.001;
        let causal = if t >= 0.0 { 1.0 } else { 0.0 };
        assert!((g.eval(t).re - causal * (-t).exp()).abs() < 1e-14);
        assert!((g2.eval(t).re - causal * ((-t).exp() - (-2.0 * t).exp())).abs() < 1e-14);
        assert!((g3.eval(t).re + (1.0 - causal) * t.exp()).abs() < 1e-14);
    }
    assert_eq!(g.eval(0.0), c(1.0, 0.0));
    assert_eq!(g3.eval(0.0), c(0.0, 0.0));
}

#[test]
fn system_examples() {
    let levy = PoleZeroSystem::all_pole(vec![c(0.0, 0.0)]).unwrap();
    assert_eq!((levy.order(), levy.n0()), (1, 1));
    let ar2 = PoleZeroSystem::all_pole(vec![c(-0.05, PI / 2.0), c(-0.05, -PI / 2.0)]).unwrap();
    assert_eq!(ar2.n0(), 0);
    assert!(ar2.is_stationary() && ar2.is_real());
    assert!(matches!(
        PoleZeroSystem::all_pole(vec![c(0.0, 0.0), c(0.0, 2.0 * PI)]),
        Err(Error::RieszViolation(_))
    ));
    assert!(matches!(
        PoleZeroSystem::new(vec![c(-1.0, 0.0)], vec![c(0.0, 0.0)], c(1.0, 0.0)),
        Err(Error::OrderViolation { .. })
    ));
    let half = rescale_system(&PoleZeroSystem::all_pole(vec![c(-1.0, 0.0)]).unwrap(), 0.5).unwrap();
    assert!((half.poles()[0] - c(-0.5, 0.0)).norm() < 1e-15);
    let d = rescale_system(&levy, 0.3).unwrap();
    assert_eq!(d.poles(), &[c(0.0, 0.0)]);
}

#[test]
fn bspline_ground_truth_shapes() {
    let rect = bspline_l(&PoleZeroSystem::all_pole(vec![c(0.0, 0.0)]).unwrap());
    assert_eq!(rect.eval(1.0), c(0.0, 0.0));
    assert_eq!(rect.eval(0.0), c(1.0, 0.0));
    let ex3 = PoleZeroSystem::all_pole(vec![c(0.0, 3.0 * PI / 4.0), c(0.0, -3.0 * PI / 4.0)]).unwrap();
    let b = bspline_l(&ex3);
    let a = bspline_alpha(ex3.poles());
    for i in 0..300 {
        let t = -0.5 + 3.0 * i as f64 / 300.0;
        assert_eq!(b.eval(t), a.eval(t));
        if !(0.0..2.0).contains(&t) {
            assert_eq!(b.eval(t), c(0.0, 0.0));
        }
    }
}
