use std::f64::consts::PI;

use gcarma::filters::StationaryAutocorr;
use gcarma::statistics::{autocovariance, ks_two_sample, tuples};
use gcarma::*;
use rustfft::FftPlanner;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ex4() -> PoleZeroSystemF64 {
    PoleZeroSystem::all_pole(vec![c(-0.05, PI / 2.0), c(-0.05, -PI / 2.0)]).unwrap()
}

#[test]
fn rescaled_system_predicts_step_half_samples() {
    // Samples of the pole -1 process every 0.5 are unit-step samples of the
    // rescaled system (pole -0.5) driven by the rescaled innovation.
    let sys = PoleZeroSystem::all_pole(vec![c(-1.0, 0.0)]).unwrap().with_step(0.5).unwrap();
    let spec = InnovationSpec::gaussian(0.5).unwrap();
    let r: RealizationF64 = generate(&sys, &spec, Method::Auto, 400_000, 77).unwrap();
    let unit = rescale_system(&sys, 0.5).unwrap();
    assert!((unit.poles()[0] - c(-0.5, 0.0)).norm() < 1e-15);
    assert_eq!(unit.step(), 1.0);
    let var = spec.rescale(0.5).unwrap().variance().unwrap();
    let theory = StationaryAutocorr::new(&unit, var).unwrap();
    let est = autocovariance(&r.samples, 4, 50).unwrap();
    for k in 0..=4 {
        let t = theory.eval(k as f64).re;
        assert!((est.values[k].re - t).abs() < 3.5 * est.std_errors[k], "lag {k}: {} vs {t}", est.values[k].re);
    }
}

#[test]
fn independence_beyond_order() {
    let sys = ex4();
    let n = 200_000;
    let specs = [
        InnovationSpec::gaussian(0.5).unwrap(),
        InnovationSpec::poisson(0.25, AmplitudeLaw::default()).unwrap(),
        InnovationSpec::poisson(0.5, AmplitudeLaw::Uniform { lo: -1.0, hi: 2.0 }).unwrap(),
    ];
    for spec in &specs {
        let r: RealizationF64 = generate(&sys, spec, Method::Auto, n, 5).unwrap();
        let est = autocovariance(r.increments.as_ref().unwrap(), 6, 50).unwrap();
        for lag in sys.order() + 1..=6 {
            assert!(est.values[lag].re.abs() < 3.5 * est.std_errors[lag], "{spec:?} lag {lag}");
        }
    }
}

#[test]
fn oversampled_gaussian_matches_exact_route() {
    let sys = PoleZeroSystem::all_pole(vec![c(-0.5, 1.0), c(-0.5, -1.0)]).unwrap();
    let spec = InnovationSpec::gaussian(0.5).unwrap();
    let exact: RealizationF64 = generate(&sys, &spec, Method::Auto, 60_000, 1).unwrap();
    let fine: RealizationF64 = generate(&sys, &spec, Method::Oversampled { m: 64 }, 60_000, 2).unwrap();
    let stable2 = InnovationSpec::symmetric_stable(2.0, 0.5).unwrap();
    let sas2: RealizationF64 = generate(&sys, &stable2, Method::Oversampled { m: 64 }, 60_000, 3).unwrap();
    let pick = |r: &RealizationF64| -> Vec<f64> { r.increments.as_ref().unwrap().iter().step_by(3).map(|v| v.re).collect() };
    assert!(ks_two_sample(&pick(&exact), &pick(&fine)).unwrap().pass);
    assert!(ks_two_sample(&pick(&exact), &pick(&sas2)).unwrap().pass);
}

fn periodogram_average(x: &[C64], seg: usize) -> Vec<f64> {
    let fft = FftPlanner::<f64>::new().plan_fft_forward(seg);
    let mut p = vec![0.0; seg];
    let count = x.len() / seg;
    for s in 0..count {
        let mut buf = x[s * seg..(s + 1) * seg].to_vec();
        fft.process(&mut buf);
        for (a, v) in p.iter_mut().zip(&buf) {
            *a += v.norm_sqr() / seg as f64 / count as f64;
        }
    }
    p
}

#[test]
fn mixture_spectrum_is_sum_of_components() {
    let a = ex4();
    let b = PoleZeroSystem::all_pole(vec![c(-0.3, 0.0)]).unwrap();
    let comps = vec![
        MixedComponent { system: a.clone(), innovation: InnovationSpec::gaussian(0.5).unwrap(), method: Method::Auto },
        MixedComponent { system: b.clone(), innovation: InnovationSpec::gaussian(2.0).unwrap(), method: Method::Auto },
    ];
    let r: RealizationF64 = generate_mixed(&comps, 1 << 18, 8).unwrap();
    let seg = 256;
    let p = periodogram_average(&r.samples, seg);
    let count = (r.samples.len() / seg) as f64;
    // Compare smoothed bins away from the strongly peaked region near pi/2.
    for &j in &[10usize, 30, 100, 120] {
        let w = 2.0 * PI * j as f64 / seg as f64;
        let theory = power_spectrum(&a, 1.0, w).unwrap().process.unwrap() + power_spectrum(&b, 4.0, w).unwrap().process.unwrap();
        let avg: f64 = (j - 2..=j + 2).map(|i| p[i]).sum::<f64>() / 5.0;
        // Segment leakage of a smooth spectrum is small at these bins; Bartlett sd is theory/sqrt(5 count).
        assert!((avg - theory).abs() < 4.0 * theory / (5.0 * count).sqrt() + 0.03 * theory, "bin {j}: {avg} vs {theory}");
    }
}

#[test]
fn mixture_charfn_is_product() {
    let sys = PoleZeroSystem::all_pole(vec![c(-1.0, 0.0), c(-0.4, 0.0)]).unwrap();
    let g = InnovationSpec::gaussian(0.3).unwrap();
    let p = InnovationSpec::poisson(0.5, AmplitudeLaw::default()).unwrap();
    let comps = vec![
        MixedComponent { system: sys.clone(), innovation: g.clone(), method: Method::Auto },
        MixedComponent { system: sys.clone(), innovation: p.clone(), method: Method::Auto },
    ];
    let r: RealizationF64 = generate_mixed(&comps, 300_000, 13).unwrap();
    let t = tuples(r.increments.as_ref().unwrap(), 1, sys.order() + 1);
    let omegas: Vec<Vec<f64>> = [0.3, 0.8, 1.5, 2.5].iter().map(|&w| vec![w]).collect();
    let theory: Vec<C64> = omegas
        .iter()
        .map(|w| charfn_increment(&g, &sys, w).unwrap() * charfn_increment(&p, &sys, w).unwrap())
        .collect();
    let report = empirical_charfn(&t, &omegas, Some(&theory), 4).unwrap();
    assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
}

#[test]
fn single_component_mixture_matches_component() {
    let sys = ex4();
    let spec = InnovationSpec::gaussian(0.5).unwrap();
    let comps = vec![MixedComponent { system: sys.clone(), innovation: spec.clone(), method: Method::Auto }];
    let mix: RealizationF64 = generate_mixed(&comps, 100_000, 21).unwrap();
    let solo: RealizationF64 = generate(&sys, &spec, Method::Auto, 100_000, 22).unwrap();
    let a: Vec<f64> = mix.samples.iter().step_by(50).map(|v| v.re).collect();
    let b: Vec<f64> = solo.samples.iter().step_by(50).map(|v| v.re).collect();
    assert!(ks_two_sample(&a, &b).unwrap().pass);
}
