//! Empirical estimators and their comparison with the theoretical predictions:
//! autocovariances with block-jackknife errors, characteristic functions with
//! bootstrap bands, a periodogram flatness test, a Kolmogorov-Smirnov test
//! against a normal law and a stability-index regression.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::expspline::bspline_autocorr;
use crate::innovations::InnovationSpec;
use crate::scalar::Scalar;
use crate::system::PoleZeroSystem;

pub const DEFAULT_JACKKNIFE_BLOCKS: usize = 50;
pub const DEFAULT_BOOTSTRAP_REPS: usize = 500;
pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;
pub const WHITENESS_SEGMENT: usize = 256;
pub const MIN_WHITENESS_LENGTH: usize = 1 << 14;
pub const MIN_CHARFN_TUPLES: usize = 10_000;

/// One comparison between an estimate and its reference.
#[derive(Debug, Clone, PartialEq)]
pub struct StatCheck {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub theory: Option<f64>,
    pub abs_diff: Option<f64>,
    /// `abs_diff / std_error`, or the test statistic for tests without a reference value.
    pub z: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl StatCheck {
    /// Passes when `|estimate - theory| <= threshold * std_error`.
    pub fn z_test(name: impl Into<String>, estimate: f64, std_error: f64, theory: f64, threshold: f64) -> Self {
        let diff = (estimate - theory).abs();
        let z = diff / std_error;
        Self {
            name: name.into(),
            estimate,
            std_error,
            theory: Some(theory),
            abs_diff: Some(diff),
            z: Some(z),
            threshold,
            pass: z <= threshold,
        }
    }

    /// Passes when `statistic <= threshold`.
    pub fn upper_bound(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            estimate: statistic,
            std_error: f64::NAN,
            theory: None,
            abs_diff: None,
            z: Some(statistic),
            threshold,
            pass: statistic <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatReport {
    pub checks: Vec<StatCheck>,
}

impl StatReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn extend(&mut self, other: StatReport) {
        self.checks.extend(other.checks);
    }

    pub fn failures(&self) -> impl Iterator<Item = &StatCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn to_f64<T: Scalar>(x: &[Complex<T>]) -> Vec<Complex<f64>> {
    x.iter().map(|v| Complex::new(v.re.as_f64(), v.im.as_f64())).collect()
}

/// Biased (`1/n`) sample autocovariance `r(k) = (1/n) sum_i x_i conj(x_{i+k})` after
/// removing the sample mean, with block-jackknife standard errors of its real part.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovEstimate {
    pub values: Vec<Complex<f64>>,
    pub std_errors: Vec<f64>,
}

pub fn autocovariance<T: Scalar>(x: &[Complex<T>], maxlag: usize, blocks: usize) -> Result<AutocovEstimate> {
    let n = x.len();
    if n <= maxlag + 1 || blocks < 2 || n < 2 * blocks {
        return Err(Error::SignalTooShort { len: n, needed: (maxlag + 2).max(2 * blocks) });
    }
    let x = to_f64(x);
    let mean = x.iter().sum::<Complex<f64>>() / n as f64;
    let x: Vec<_> = x.iter().map(|v| v - mean).collect();
    let block_len = n / blocks;
    let mut values = Vec::with_capacity(maxlag + 1);
    let mut std_errors = Vec::with_capacity(maxlag + 1);
    for lag in 0..=maxlag {
        let mut per_block = vec![Complex::new(0.0, 0.0); blocks];
        let mut counts = vec![0usize; blocks];
        let mut total = Complex::new(0.0, 0.0);
        for i in 0..n - lag {
            let p = x[i] * x[i + lag].conj();
            total += p;
            let g = (i / block_len).min(blocks - 1);
            per_block[g] += p;
            counts[g] += 1;
        }
        let est = total / n as f64;
        // Leave-one-block-out estimates, normalized by the remaining sample size.
        let leave_out: Vec<f64> = (0..blocks)
            .map(|g| {
                let removed = if g == blocks - 1 { n - g * block_len } else { block_len };
                ((total - per_block[g]) / (n - removed) as f64).re
            })
            .collect();
        let mean_lo = leave_out.iter().sum::<f64>() / blocks as f64;
        let var = leave_out.iter().map(|v| (v - mean_lo).powi(2)).sum::<f64>() * (blocks - 1) as f64 / blocks as f64;
        values.push(est);
        std_errors.push(var.sqrt().max(f64::MIN_POSITIVE));
    }
    Ok(AutocovEstimate { values, std_errors })
}

/// Autocovariance of `x` for lags `0..=maxlag`, compared with `theory[k]` when given.
pub fn empirical_autocorr<T: Scalar>(x: &[Complex<T>], maxlag: usize, theory: Option<&[f64]>) -> Result<StatReport> {
    let est = autocovariance(x, maxlag, DEFAULT_JACKKNIFE_BLOCKS)?;
    let checks = (0..=maxlag)
        .map(|k| {
            let name = format!("autocov lag {k}");
            match theory.and_then(|t| t.get(k)) {
                Some(&t) => StatCheck::z_test(name, est.values[k].re, est.std_errors[k], t, DEFAULT_Z_THRESHOLD),
                None => StatCheck {
                    name,
                    estimate: est.values[k].re,
                    std_error: est.std_errors[k],
                    theory: None,
                    abs_diff: None,
                    z: None,
                    threshold: DEFAULT_Z_THRESHOLD,
                    pass: true,
                },
            }
        })
        .collect();
    Ok(StatReport { checks })
}

/// `var0 beta_{LL*}(k)` for `k = 0..=maxlag`: the covariance of the generalized increments.
pub fn increment_autocorr_theory<T: Scalar>(sys: &PoleZeroSystem<T>, var0: f64, maxlag: usize) -> Vec<Complex<f64>> {
    let acf = bspline_autocorr(sys);
    (0..=maxlag)
        .map(|k| {
            let v = acf.eval(T::from_usize_lossy(k));
            Complex::new(v.re.as_f64(), v.im.as_f64()) * var0
        })
        .collect()
}

/// Second-order statistics are only defined for finite-variance innovations.
pub fn require_finite_variance(spec: &InnovationSpec) -> Result<f64> {
    spec.variance()
}

/// Empirical characteristic function at each frequency vector, with bootstrap standard
/// errors and a simultaneous band over all frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct CharfnEstimate {
    pub values: Vec<Complex<f64>>,
    pub std_errors: Vec<f64>,
    /// Critical value of `max_w |phi* - phi^| / se` at the requested level.
    pub band: f64,
}

pub fn charfn_estimate(tuples: &[Vec<f64>], omegas: &[Vec<f64>], reps: usize, level: f64, seed: u64) -> Result<CharfnEstimate> {
    let n = tuples.len();
    if n < 2 || omegas.is_empty() {
        return Err(Error::InvalidParameter("characteristic function needs tuples and frequencies".into()));
    }
    let k = tuples[0].len();
    if tuples.iter().any(|t| t.len() != k) || omegas.iter().any(|w| w.len() != k) {
        return Err(Error::InvalidParameter("tuples and frequency vectors must share one dimension".into()));
    }
    let m = omegas.len();
    // table[i * m + j] = exp(j <tuple_i, omega_j>)
    let table: Vec<Complex<f64>> = tuples
        .iter()
        .flat_map(|t| {
            omegas.iter().map(move |w| {
                let phase: f64 = t.iter().zip(w).map(|(a, b)| a * b).sum();
                Complex::new(0.0, phase).exp()
            })
        })
        .collect();
    let mut values = vec![Complex::new(0.0, 0.0); m];
    for i in 0..n {
        for j in 0..m {
            values[j] += table[i * m + j];
        }
    }
    for v in values.iter_mut() {
        *v /= n as f64;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deviations = vec![vec![0.0; m]; reps];
    let mut acc = vec![Complex::new(0.0, 0.0); m];
    for dev in deviations.iter_mut() {
        acc.iter_mut().for_each(|a| *a = Complex::new(0.0, 0.0));
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let row = &table[i * m..(i + 1) * m];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        for j in 0..m {
            dev[j] = (acc[j] / n as f64 - values[j]).norm();
        }
    }
    let std_errors: Vec<f64> = (0..m)
        .map(|j| {
            let s = deviations.iter().map(|d| d[j] * d[j]).sum::<f64>() / reps as f64;
            s.sqrt().max(f64::MIN_POSITIVE)
        })
        .collect();
    let mut maxima: Vec<f64> = deviations
        .iter()
        .map(|d| d.iter().zip(&std_errors).map(|(x, s)| x / s).fold(0.0, f64::max))
        .collect();
    maxima.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((level * reps as f64).ceil() as usize).clamp(1, reps) - 1;
    Ok(CharfnEstimate { values, std_errors, band: maxima[idx] })
}

/// Empirical characteristic function compared against `theory` within simultaneous 99% bootstrap bands.
pub fn empirical_charfn(
    tuples: &[Vec<f64>],
    omegas: &[Vec<f64>],
    theory: Option<&[Complex<f64>]>,
    seed: u64,
) -> Result<StatReport> {
    if tuples.len() < MIN_CHARFN_TUPLES {
        return Err(Error::SignalTooShort { len: tuples.len(), needed: MIN_CHARFN_TUPLES });
    }
    let est = charfn_estimate(tuples, omegas, DEFAULT_BOOTSTRAP_REPS, 0.99, seed)?;
    let checks = omegas
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let name = format!("charfn {w:?}");
            let phi = est.values[j];
            match theory.and_then(|t| t.get(j)) {
                Some(&t) => {
                    let diff = (phi - t).norm();
                    let z = diff / est.std_errors[j];
                    StatCheck {
                        name,
                        estimate: phi.re,
                        std_error: est.std_errors[j],
                        theory: Some(t.re),
                        abs_diff: Some(diff),
                        z: Some(z),
                        threshold: est.band,
                        pass: z <= est.band,
                    }
                }
                None => StatCheck {
                    name,
                    estimate: phi.re,
                    std_error: est.std_errors[j],
                    theory: None,
                    abs_diff: None,
                    z: None,
                    threshold: est.band,
                    pass: true,
                },
            }
        })
        .collect();
    Ok(StatReport { checks })
}

/// Non-overlapping `k`-tuples `(x[i], ..., x[i + k - 1])` starting every `spacing` samples.
pub fn tuples<T: Scalar>(x: &[Complex<T>], k: usize, spacing: usize) -> Vec<Vec<f64>> {
    let spacing = spacing.max(k).max(1);
    (0..x.len().saturating_sub(k - 1))
        .step_by(spacing)
        .map(|i| x[i..i + k].iter().map(|v| v.re.as_f64()).collect())
        .collect()
}

/// Slope of `log(-log |phi^(w)|)` against `log w`, the stability index of a symmetric stable law.
pub fn stability_index(x: &[f64], omegas: &[f64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = omegas
        .iter()
        .filter_map(|&w| {
            let re = x.iter().map(|v| (w * v).cos()).sum::<f64>() / x.len() as f64;
            let im = x.iter().map(|v| (w * v).sin()).sum::<f64>() / x.len() as f64;
            let m = (re * re + im * im).sqrt();
            (m > 0.0 && m < 1.0).then(|| (w.ln(), (-m.ln()).ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InvalidParameter("stability-index regression needs at least three usable frequencies".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    let resid = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>();
    let se = (resid / (n - 2.0) / sxx).sqrt();
    Ok((slope, se))
}

/// Stability-index regression compared with `alpha` to an absolute tolerance.
pub fn stability_index_check(x: &[f64], omegas: &[f64], alpha: f64, tolerance: f64) -> Result<StatCheck> {
    let (slope, se) = stability_index(x, omegas)?;
    let diff = (slope - alpha).abs();
    Ok(StatCheck {
        name: "stability index".into(),
        estimate: slope,
        std_error: se,
        theory: Some(alpha),
        abs_diff: Some(diff),
        z: Some(diff / se.max(f64::MIN_POSITIVE)),
        threshold: tolerance,
        pass: diff <= tolerance,
    })
}

/// Bartlett-averaged periodogram flatness test at the 1% level.
///
/// Segments of [`WHITENESS_SEGMENT`] samples; `T = S sum_j (P_j / var - 1)^2` over the
/// frequencies that are independent under the null (`0 < j < L/2` for real data,
/// `j != 0` for complex data) is compared with the 99% quantile of chi-square(J).
pub fn whiteness_check<T: Scalar>(e: &[Complex<T>]) -> Result<StatReport> {
    let n = e.len();
    if n < MIN_WHITENESS_LENGTH {
        return Err(Error::SignalTooShort { len: n, needed: MIN_WHITENESS_LENGTH });
    }
    let x = to_f64(e);
    let real = x.iter().all(|v| v.im == 0.0);
    let mean = x.iter().sum::<Complex<f64>>() / n as f64;
    let x: Vec<_> = x.iter().map(|v| v - mean).collect();
    let var = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    let l = WHITENESS_SEGMENT;
    let segments = n / l;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(l);
    let mut power = vec![0.0; l];
    let mut buf = vec![Complex::new(0.0, 0.0); l];
    for s in 0..segments {
        buf.copy_from_slice(&x[s * l..(s + 1) * l]);
        fft.process(&mut buf);
        for (p, v) in power.iter_mut().zip(&buf) {
            *p += v.norm_sqr() / l as f64;
        }
    }
    let bins: Vec<usize> = if real { (1..l / 2).collect() } else { (1..l).collect() };
    let sf = segments as f64;
    let stat: f64 = bins.iter().map(|&j| sf * (power[j] / sf / var - 1.0).powi(2)).sum();
    let dof = bins.len() as f64;
    let threshold = ChiSquared::new(dof).expect("positive degrees of freedom").inverse_cdf(0.99);
    Ok(StatReport { checks: vec![StatCheck::upper_bound(format!("periodogram flatness ({} bins)", bins.len()), stat, threshold)] })
}

/// Kolmogorov-Smirnov distance to `N(mean, sd^2)`, compared with the 1% critical value `1.628 / sqrt(n)`.
pub fn ks_normal(x: &[f64], mean: f64, sd: f64) -> Result<StatCheck> {
    if x.is_empty() {
        return Err(Error::SignalTooShort { len: 0, needed: 1 });
    }
    let normal = Normal::new(mean, sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut xs = x.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = normal.cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    Ok(StatCheck::upper_bound("Kolmogorov-Smirnov vs normal", d, 1.628 / n.sqrt()))
}

/// Two-sample Kolmogorov-Smirnov distance with the 1% critical value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<StatCheck> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::SignalTooShort { len: a.len().min(b.len()), needed: 1 });
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let crit = 1.628 * ((na + nb) / (na * nb)).sqrt();
    Ok(StatCheck::upper_bound("two-sample Kolmogorov-Smirnov", d, crit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_gaussian, Realization};
    use crate::scalar::cplx;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn white(n: usize, seed: u64) -> Vec<Complex<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex::new(StandardNormal.sample(&mut rng), 0.0)).collect()
    }

    #[test]
    fn iid_autocorr_is_delta() {
        let x = white(100_000, 1);
        let r = empirical_autocorr(&x, 5, Some(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        for c in &r.checks {
            assert!(c.std_error > 0.0);
        }
    }

    #[test]
    fn jackknife_error_matches_iid_theory() {
        // For i.i.d. unit-variance data, sd of the lag-1 estimate is about 1/sqrt(n).
        let x = white(200_000, 2);
        let est = autocovariance(&x, 1, 50).unwrap();
        let expected = 1.0 / (200_000f64).sqrt();
        assert!((est.std_errors[1] / expected - 1.0).abs() < 0.35);
    }

    #[test]
    fn increment_correlation_examples() {
        let ex4 = PoleZeroSystem::all_pole(vec![cplx(-0.05, PI / 2.0), cplx(-0.05, -PI / 2.0)]).unwrap();
        let r: Realization<f64> = generate_gaussian(&ex4, 1.0, 200_000, 3).unwrap();
        let theory: Vec<f64> = increment_autocorr_theory(&ex4, 1.0, 4).iter().map(|v| v.re).collect();
        assert!(theory[2].abs() < 1e-12 && theory[3] == 0.0);
        let report = empirical_autocorr(r.increments.as_ref().unwrap(), 4, Some(&theory)).unwrap();
        assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());

        let d2 = PoleZeroSystem::all_pole(vec![cplx(0.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        let r: Realization<f64> = generate_gaussian(&d2, 1.0, 200_000, 4).unwrap();
        let est = autocovariance(r.increments.as_ref().unwrap(), 1, 50).unwrap();
        assert!((est.values[1].re / est.values[0].re - 0.25).abs() < 0.01);
    }

    #[test]
    fn charfn_of_zero_frequency_is_one() {
        let x = white(20_000, 5);
        let t = tuples(&x, 1, 1);
        let est = charfn_estimate(&t, &[vec![0.0]], 50, 0.99, 1).unwrap();
        assert_eq!(est.values[0], Complex::new(1.0, 0.0));
    }

    #[test]
    fn gaussian_charfn_within_bands() {
        let x = white(40_000, 6);
        let t = tuples(&x, 2, 2);
        let omegas: Vec<Vec<f64>> = (1..=6).map(|i| vec![0.3 * i as f64, -0.2 * i as f64]).collect();
        let theory: Vec<Complex<f64>> = omegas.iter().map(|w| Complex::new((-0.5 * (w[0] * w[0] + w[1] * w[1])).exp(), 0.0)).collect();
        let report = empirical_charfn(&t, &omegas, Some(&theory), 9).unwrap();
        assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
        let wrong: Vec<Complex<f64>> = theory.iter().map(|v| v * 0.9).collect();
        assert!(!empirical_charfn(&t, &omegas, Some(&wrong), 9).unwrap().all_pass());
        assert!(empirical_charfn(&t[..100], &omegas, None, 9).is_err());
    }

    #[test]
    fn stability_index_regression() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<f64> = (0..100_000).map(|_| crate::innovations::standard_stable(1.2, &mut rng)).collect();
        let omegas: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
        let check = stability_index_check(&x, &omegas, 1.2, 0.1).unwrap();
        assert!(check.pass, "{check:?}");
    }

    #[test]
    fn whiteness_examples() {
        let x = white(1 << 16, 10);
        assert!(whiteness_check(&x).unwrap().all_pass());
        assert!(whiteness_check(&x[..1000]).is_err());

        let d2 = PoleZeroSystem::all_pole(vec![cplx(0.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        let r: Realization<f64> = generate_gaussian(&d2, 1.0, 1 << 16, 11).unwrap();
        assert!(!whiteness_check(r.increments.as_ref().unwrap()).unwrap().all_pass());
        let e = crate::generators::whiten_increments(&d2, &r.increments_signal().unwrap()).unwrap();
        assert!(whiteness_check(&e.samples[64..]).unwrap().all_pass());
    }

    #[test]
    fn ks_tests() {
        let x: Vec<f64> = white(50_000, 12).iter().map(|v| v.re).collect();
        assert!(ks_normal(&x, 0.0, 1.0).unwrap().pass);
        assert!(!ks_normal(&x, 0.1, 1.0).unwrap().pass);
        let y: Vec<f64> = white(50_000, 13).iter().map(|v| v.re).collect();
        assert!(ks_two_sample(&x, &y).unwrap().pass);
        let z: Vec<f64> = y.iter().map(|v| v * 1.1).collect();
        assert!(!ks_two_sample(&x, &z).unwrap().pass);
    }

    #[test]
    fn second_order_refused_for_heavy_tails() {
        let s = InnovationSpec::symmetric_stable(1.2, 1.0).unwrap();
        assert!(matches!(require_finite_variance(&s), Err(Error::UndefinedVariance(_))));
    }
}
