//! Sample paths `s[k] = s(k T)`, `k = 0..n`, of processes `L s = w`.
//!
//! All generators compute the generalized increments `u = d_alpha * s` first
//! and then apply the composite right inverse of the localization operator:
//!
//! * Gaussian: `u` is white noise shaped by the spectral factor of `B_L`
//!   (exact in law).
//! * Compound Poisson: `u[k] = sum_n a_n beta_L(k - t_n)` from the drawn
//!   impulses (exact).
//! * Any innovation: `beta_L` replaced by its piecewise-constant version on a
//!   grid `1/m`, driven by i.i.d. innovation integrals over the fine cells.
//!
//! Systems with a sampling step `T != 1` are first rescaled to unit step.
//! When the system has poles off the imaginary axis, `burn_in` extra samples
//! are generated on both sides and discarded so that the zero-initialized
//! recursions have settled.

use num_complex::Complex;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::expspline::{bspline_l, oversampled_taps, piecewise_constant_error};
use crate::filters::{discrete_bspline_filter, spectral_factorize};
use crate::innovations::{draw_grid_increments, draw_poisson_knots, AmplitudeLaw, InnovationSpec, PoissonKnots};
use crate::inverse::{apply_inverse_composite, BoundaryReport};
use crate::scalar::{czero, Scalar};
use crate::signal::Signal;
use crate::system::{rescale_system, PoleZeroSystem};

/// Default oversampling factor of the piecewise-constant kernel.
pub const DEFAULT_OVERSAMPLING: usize = 64;
/// Residual level the zero-initialized recursions must decay to before output starts.
pub const BURN_IN_LEVEL: f64 = 1e-10;
const KERNEL_ERROR_PROBES: usize = 16;

/// Piecewise-constant kernel used by the oversampled generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OversamplingInfo {
    pub factor: usize,
    /// Sup-norm distance between `beta_L` and its piecewise-constant version.
    pub kernel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization<T> {
    /// `s[k]` for `k = 0..n`.
    pub samples: Vec<Complex<T>>,
    pub step: T,
    pub seed: u64,
    pub boundary: BoundaryReport<T>,
    /// Poisson impulses in unit-step time, with the amplitudes actually used.
    pub knots: Option<PoissonKnots>,
    /// `u[k]` for `k = 0..n`; `None` for mixtures of systems with different poles.
    pub increments: Option<Vec<Complex<T>>>,
    pub oversampling: Option<OversamplingInfo>,
    /// Number of discarded samples on each side.
    pub burn_in: usize,
}

impl<T: Scalar> Realization<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn as_signal(&self) -> Signal<T> {
        Signal::new(0, self.samples.clone())
    }

    pub fn increments_signal(&self) -> Option<Signal<T>> {
        self.increments.as_ref().map(|u| Signal::new(0, u.clone()))
    }
}

/// Burn-in length `ceil(-ln(level) / min |Re alpha|)` over the poles off the imaginary axis.
pub fn burn_in_length<T: Scalar>(sys: &PoleZeroSystem<T>) -> usize {
    match sys.min_decay_rate() {
        Some(rate) => {
            let r = rate.as_f64();
            (-(BURN_IN_LEVEL.ln()) / r).ceil() as usize
        }
        None => 0,
    }
}

struct Plan<T> {
    sys: PoleZeroSystem<T>,
    n: usize,
    burn: usize,
    order: usize,
}

impl<T: Scalar> Plan<T> {
    fn new(sys: &PoleZeroSystem<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("realization length must be positive".into()));
        }
        let sys = unit_step(sys)?;
        let burn = burn_in_length(&sys);
        let order = sys.order();
        Ok(Self { sys, n, burn, order })
    }

    /// Increment indices `lo..hi` that are generated.
    fn range(&self) -> (i64, i64) {
        (-(self.burn as i64), (self.n + self.burn) as i64)
    }

    fn finish(
        &self,
        u: Signal<T>,
        step: T,
        seed: u64,
        knots: Option<PoissonKnots>,
        oversampling: Option<OversamplingInfo>,
    ) -> Realization<T> {
        let (s, boundary) = apply_inverse_composite(&self.sys, &u);
        let n = self.n as i64;
        Realization {
            samples: s.window(0, n).samples,
            step,
            seed,
            boundary,
            knots,
            increments: Some(u.window(0, n).samples),
            oversampling,
            burn_in: self.burn,
        }
    }
}

fn unit_step<T: Scalar>(sys: &PoleZeroSystem<T>) -> Result<PoleZeroSystem<T>> {
    if sys.step() == T::one() {
        Ok(sys.clone())
    } else {
        rescale_system(sys, sys.step())
    }
}

fn real_signal<T: Scalar>(start: i64, values: &[f64]) -> Signal<T> {
    Signal::new(start, values.iter().map(|&v| Complex::new(T::lit(v), T::zero())).collect())
}

/// Gaussian innovation with `sigma_0^2 = var0`: `u = conj(b_L+) * e`, `e[k] ~ N(0, var0)` i.i.d.
pub fn generate_gaussian<T: Scalar>(sys: &PoleZeroSystem<T>, var0: f64, n: usize, seed: u64) -> Result<Realization<T>> {
    if !(var0 > 0.0 && var0.is_finite()) {
        return Err(Error::InvalidParameter(format!("innovation variance must be positive, got {var0}")));
    }
    let plan = Plan::new(sys, n)?;
    // Dilating white noise by T scales its variance by 1/T.
    let var0 = var0 / sys.step().as_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = spectral_factorize(&discrete_bspline_filter(&plan.sys)?)?;
    let taps: Vec<Complex<T>> = b.taps().iter().map(|t| t.conj()).collect();
    let (lo, hi) = plan.range();
    let e_start = lo - (taps.len() as i64 - 1);
    let normal = Normal::new(0.0, var0.sqrt()).expect("positive variance");
    let e: Vec<f64> = (e_start..hi).map(|_| normal.sample(&mut rng)).collect();
    let e = real_signal::<T>(e_start, &e);
    let u = crate::inverse::fir_valid(&taps, &e)?;
    Ok(plan.finish(u, sys.step(), seed, None, None))
}

/// Compound Poisson innovation: impulses on `[lo - N, hi + N]`, exact increments.
pub fn generate_poisson<T: Scalar>(
    sys: &PoleZeroSystem<T>,
    lambda: f64,
    amplitude: &AmplitudeLaw,
    n: usize,
    seed: u64,
) -> Result<Realization<T>> {
    let spec = InnovationSpec::poisson(lambda, amplitude.clone())?;
    let spec = spec.rescale(sys.step().as_f64())?;
    let InnovationSpec::CompoundPoisson { lambda, amplitude } = spec else { unreachable!() };
    let plan = Plan::new(sys, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = plan.range();
    let order = plan.order as i64;
    let knots = draw_poisson_knots(lambda, &amplitude, (lo - order) as f64, (hi + order) as f64, &mut rng);
    let u = poisson_increments(&bspline_l(&plan.sys), &knots, lo, hi);
    Ok(plan.finish(u, sys.step(), seed, Some(knots), None))
}

/// `u[k] = sum_n a_n beta_L(k - t_n)` on `lo..hi`.
pub fn poisson_increments<T: Scalar>(beta: &crate::expspline::PiecewiseExpPoly<T>, knots: &PoissonKnots, lo: i64, hi: i64) -> Signal<T> {
    let (_, n) = beta.support();
    let mut u = vec![czero::<T>(); (hi - lo).max(0) as usize];
    for (&t, &a) in knots.times.iter().zip(&knots.amplitudes) {
        let first = (t.ceil() as i64).max(lo);
        let last = (t.floor() as i64 + n).min(hi - 1);
        let tt = T::lit(t);
        for k in first..=last {
            u[(k - lo) as usize] = u[(k - lo) as usize] + beta.eval(T::from_i64_lossy(k) - tt) * T::lit(a);
        }
    }
    Signal::new(lo, u)
}

/// Any innovation through the piecewise-constant kernel `beta_L(floor(m t) / m)`.
pub fn generate_levy_oversampled<T: Scalar>(
    sys: &PoleZeroSystem<T>,
    spec: &InnovationSpec,
    m: usize,
    n: usize,
    seed: u64,
) -> Result<Realization<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter("oversampling factor must be positive".into()));
    }
    spec.validate()?;
    let spec = spec.rescale(sys.step().as_f64())?;
    let plan = Plan::new(sys, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = bspline_l(&plan.sys);
    let taps = oversampled_taps(&beta, m);
    let kernel_error = piecewise_constant_error(&beta, m, KERNEL_ERROR_PROBES).as_f64();
    let (lo, hi) = plan.range();
    let mi = m as i64;
    // Fine cell i covers ((i - 1)/m, i/m]; u[k] needs cells m k - j, j = 0..=m N.
    let first = mi * lo - (taps.len() as i64 - 1);
    let last = mi * (hi - 1);
    let fine = draw_grid_increments(&spec, (last - first + 1) as usize, 1.0 / m as f64, &mut rng);
    let fine: Vec<T> = fine.into_iter().map(T::lit).collect();
    let u: Vec<Complex<T>> = (lo..hi)
        .map(|k| {
            let base = (mi * k - first) as usize;
            taps.iter().enumerate().fold(czero(), |acc, (j, &b)| acc + b * fine[base - j])
        })
        .collect();
    let info = OversamplingInfo { factor: m, kernel_error };
    Ok(plan.finish(Signal::new(lo, u), sys.step(), seed, None, Some(info)))
}

/// How a component is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Gaussian route for Gaussian innovations, exact impulses for compound
    /// Poisson, oversampled kernel with the default factor otherwise.
    #[default]
    Auto,
    Oversampled { m: usize },
}

/// Generates one process with the method chosen by [`Method`].
pub fn generate<T: Scalar>(sys: &PoleZeroSystem<T>, spec: &InnovationSpec, method: Method, n: usize, seed: u64) -> Result<Realization<T>> {
    match (method, spec) {
        (Method::Oversampled { m }, _) => generate_levy_oversampled(sys, spec, m, n, seed),
        (Method::Auto, InnovationSpec::Gaussian { .. }) => generate_gaussian(sys, spec.variance()?, n, seed),
        (Method::Auto, InnovationSpec::CompoundPoisson { lambda, amplitude }) => generate_poisson(sys, *lambda, amplitude, n, seed),
        (Method::Auto, InnovationSpec::SymmetricStable { alpha, b_alpha }) if *alpha == 2.0 => {
            generate_gaussian(sys, 2.0 * b_alpha, n, seed)
        }
        (Method::Auto, InnovationSpec::SymmetricStable { .. }) => generate_levy_oversampled(sys, spec, DEFAULT_OVERSAMPLING, n, seed),
    }
}

#[derive(Debug, Clone)]
pub struct MixedComponent<T> {
    pub system: PoleZeroSystem<T>,
    pub innovation: InnovationSpec,
    pub method: Method,
}

/// Sum of independent components; each gets its own seed drawn from `seed`.
///
/// Increments are reported only when every component has the same poles.
pub fn generate_mixed<T: Scalar>(components: &[MixedComponent<T>], n: usize, seed: u64) -> Result<Realization<T>> {
    let Some(first) = components.first() else {
        return Err(Error::InvalidParameter("a mixture needs at least one component".into()));
    };
    let step = first.system.step();
    if components.iter().any(|c| c.system.step() != step) {
        return Err(Error::InvalidParameter("all mixture components must share the sampling step".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let same_poles = components.iter().all(|c| c.system.poles() == first.system.poles());
    let mut samples = vec![czero::<T>(); n];
    let mut increments = same_poles.then(|| vec![czero::<T>(); n]);
    let mut residuals: Vec<Complex<T>> = Vec::new();
    let mut burn_in = 0;
    let mut oversampling = None;
    for c in components {
        let r = generate(&c.system, &c.innovation, c.method, n, master.next_u64())?;
        for (acc, v) in samples.iter_mut().zip(&r.samples) {
            *acc = *acc + *v;
        }
        if let (Some(acc), Some(u)) = (increments.as_mut(), r.increments.as_ref()) {
            for (a, v) in acc.iter_mut().zip(u) {
                *a = *a + *v;
            }
        }
        if residuals.len() < r.boundary.residuals.len() {
            residuals.resize(r.boundary.residuals.len(), czero());
        }
        for (a, v) in residuals.iter_mut().zip(&r.boundary.residuals) {
            *a = *a + *v;
        }
        burn_in = burn_in.max(r.burn_in);
        oversampling = oversampling.or(r.oversampling);
    }
    Ok(Realization {
        samples,
        step,
        seed,
        boundary: BoundaryReport { residuals },
        knots: None,
        increments,
        oversampling,
        burn_in,
    })
}

/// Recovers the white sequence `e` behind Gaussian increments by inverting
/// `conj(b_L+)` causally (stable, since its zeros lie inside the unit circle).
/// The first few samples carry the zero-initialization transient.
pub fn whiten_increments<T: Scalar>(sys: &PoleZeroSystem<T>, u: &Signal<T>) -> Result<Signal<T>> {
    let sys = unit_step(sys)?;
    let b = spectral_factorize(&discrete_bspline_filter(&sys)?)?;
    let taps: Vec<Complex<T>> = b.taps().iter().map(|t| t.conj()).collect();
    let mut e: Vec<Complex<T>> = Vec::with_capacity(u.len());
    for k in 0..u.len() {
        let mut acc = u.samples[k];
        for (m, &t) in taps.iter().enumerate().skip(1) {
            if m <= k {
                acc = acc - t * e[k - m];
            }
        }
        e.push(acc / taps[0]);
    }
    Ok(Signal::new(u.start, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expspline::bspline_autocorr;
    use crate::inverse::apply_localization;
    use crate::scalar::cplx;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        cplx(re, im)
    }

    fn sys(poles: &[Complex<f64>]) -> PoleZeroSystem<f64> {
        PoleZeroSystem::all_pole(poles.to_vec()).unwrap()
    }

    fn check_increments(sys: &PoleZeroSystem<f64>, r: &Realization<f64>) {
        let u = apply_localization(sys, &r.as_signal()).unwrap();
        let inc = r.increments.as_ref().unwrap();
        let scale = 1.0f64.max(r.samples.iter().fold(0.0, |m, v| m.max(v.norm())));
        for k in u.start..u.end() {
            assert!((u.at(k) - inc[k as usize]).norm() <= 1e-12 * scale, "k={k}");
        }
    }

    #[test]
    fn brownian_motion() {
        let s = sys(&[c(0.0, 0.0)]);
        let r: Realization<f64> = generate_gaussian(&s, 1.0, 1000, 1).unwrap();
        assert_eq!(r.samples[0], c(0.0, 0.0));
        assert_eq!(r.burn_in, 0);
        let inc = r.increments.as_ref().unwrap();
        for k in 1..1000 {
            assert!((r.samples[k] - r.samples[k - 1] - inc[k]).norm() < 1e-12);
        }
        check_increments(&s, &r);
    }

    #[test]
    fn determinism() {
        let s = sys(&[c(-0.05, PI / 2.0), c(-0.05, -PI / 2.0)]);
        let a: Realization<f64> = generate_gaussian(&s, 1.0, 500, 42).unwrap();
        let b: Realization<f64> = generate_gaussian(&s, 1.0, 500, 42).unwrap();
        assert_eq!(a, b);
        let c2: Realization<f64> = generate_gaussian(&s, 1.0, 500, 43).unwrap();
        assert_ne!(a.samples, c2.samples);
        let spec = InnovationSpec::symmetric_stable(1.2, 1.0).unwrap();
        let a: Realization<f64> = generate_levy_oversampled(&s, &spec, 8, 200, 9).unwrap();
        let b: Realization<f64> = generate_levy_oversampled(&s, &spec, 8, 200, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn poisson_paths() {
        let normal = AmplitudeLaw::default();
        let zero: Realization<f64> = generate_poisson(&sys(&[c(-1.0, 0.0)]), 0.0, &normal, 100, 1).unwrap();
        assert!(zero.samples.iter().all(|v| *v == c(0.0, 0.0)));

        // Compound Poisson process: piecewise constant, jumps only across knots.
        let s = sys(&[c(0.0, 0.0)]);
        let r: Realization<f64> = generate_poisson(&s, 0.2, &normal, 300, 5).unwrap();
        let knots = r.knots.as_ref().unwrap();
        for k in 1..300 {
            let jumps: f64 = knots
                .times
                .iter()
                .zip(&knots.amplitudes)
                .filter(|(t, _)| **t > (k - 1) as f64 && **t <= k as f64)
                .map(|(_, a)| a)
                .sum();
            assert!((r.samples[k] - r.samples[k - 1] - c(jumps, 0.0)).norm() < 1e-12);
        }
        check_increments(&s, &r);

        // Double integrator: second differences vanish between knots.
        let s = sys(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let r: Realization<f64> = generate_poisson(&s, 0.05, &normal, 400, 8).unwrap();
        let knots = r.knots.as_ref().unwrap();
        for k in 2..400 {
            let near = knots.times.iter().any(|&t| t > (k - 2) as f64 && t <= k as f64);
            if !near {
                let d2 = r.samples[k] - r.samples[k - 1] * 2.0 + r.samples[k - 2];
                assert!(d2.norm() < 1e-10, "k={k}");
            }
        }
        assert!(r.boundary.max_abs() < 1e-12);
        check_increments(&s, &r);
    }

    #[test]
    fn poisson_increments_are_reproducible_from_knots() {
        let s = sys(&[c(-0.5, 1.0), c(-0.5, -1.0), c(0.3, 0.0)]);
        let r: Realization<f64> = generate_poisson(&s, 0.3, &AmplitudeLaw::default(), 200, 2).unwrap();
        let beta = bspline_l(&s);
        let u = r.increments.as_ref().unwrap();
        let knots = r.knots.as_ref().unwrap();
        for k in 0..200 {
            let direct: Complex<f64> = knots
                .times
                .iter()
                .zip(&knots.amplitudes)
                .map(|(&t, &a)| beta.eval(k as f64 - t) * a)
                .sum();
            assert!((direct - u[k]).norm() < 1e-12);
        }
        check_increments(&s, &r);
    }

    #[test]
    fn increments_recovered_for_all_generators() {
        let systems = [
            sys(&[c(-0.05, PI / 2.0), c(-0.05, -PI / 2.0)]),
            sys(&[c(0.0, 0.0), c(-1.0, 0.0), c(0.4, 0.0)]),
            PoleZeroSystem::new(vec![c(0.0, 3.0 * PI / 4.0), c(0.0, -3.0 * PI / 4.0)], vec![c(-0.5, 0.0)], c(1.0, 0.0)).unwrap(),
        ];
        for s in &systems {
            let g: Realization<f64> = generate_gaussian(s, 1.0, 300, 3).unwrap();
            check_increments(s, &g);
            let p: Realization<f64> = generate_poisson(s, 0.5, &AmplitudeLaw::default(), 300, 3).unwrap();
            check_increments(s, &p);
            let spec = InnovationSpec::symmetric_stable(1.5, 1.0).unwrap();
            let o: Realization<f64> = generate_levy_oversampled(s, &spec, 16, 300, 3).unwrap();
            check_increments(s, &o);
            for r in [&g, &p, &o] {
                assert_eq!(r.boundary.residuals.len(), s.n0());
                assert!(r.boundary.max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_increment_correlation() {
        let s = sys(&[c(-0.5, 1.0), c(-0.5, -1.0), c(-1.0, 0.0)]);
        let var0 = 2.0;
        let r: Realization<f64> = generate_gaussian(&s, var0, 200_000, 17).unwrap();
        let u = r.increments.as_ref().unwrap();
        let acf = bspline_autocorr(&s);
        let n = u.len() as f64;
        for lag in 0..5usize {
            let emp: f64 = (0..u.len() - lag).map(|k| (u[k] * u[k + lag].conj()).re).sum::<f64>() / n;
            let theory = var0 * acf.eval(lag as f64).re;
            assert!((emp - theory).abs() < 0.02 * var0, "lag {lag}: {emp} vs {theory}");
        }
    }

    #[test]
    fn whitening_recovers_unit_variance() {
        let s = sys(&[c(-0.5, 1.0), c(-0.5, -1.0), c(-1.0, 0.0)]);
        let r: Realization<f64> = generate_gaussian(&s, 1.5, 50_000, 4).unwrap();
        let e = whiten_increments(&s, &r.increments_signal().unwrap()).unwrap();
        let tail = &e.samples[200..];
        let var = tail.iter().map(|v| v.norm_sqr()).sum::<f64>() / tail.len() as f64;
        assert!((var - 1.5).abs() < 0.05);
        let lag1 = tail.windows(2).map(|w| (w[0] * w[1].conj()).re).sum::<f64>() / tail.len() as f64;
        assert!(lag1.abs() < 0.05);
    }

    #[test]
    fn oversampled_stable_marginal() {
        let s = sys(&[c(-1.0, 0.0), c(-0.5, 0.0)]);
        let (alpha, b) = (1.2, 1.0);
        let m = 16;
        let spec = InnovationSpec::symmetric_stable(alpha, b).unwrap();
        let r: Realization<f64> = generate_levy_oversampled(&s, &spec, m, 60_000, 21).unwrap();
        let info = r.oversampling.unwrap();
        assert_eq!(info.factor, m);
        assert!(info.kernel_error > 0.0);
        let taps = oversampled_taps(&bspline_l(&s), m);
        let norm: f64 = taps.iter().map(|t| t.re.abs().powf(alpha)).sum::<f64>() / m as f64;
        let u = r.increments.as_ref().unwrap();
        // Non-overlapping samples spaced beyond the kernel support.
        let picks: Vec<f64> = u.iter().step_by(3).map(|v| v.re).collect();
        for &w in &[0.5, 1.0, 2.0] {
            let emp = picks.iter().map(|x| (w * x).cos()).sum::<f64>() / picks.len() as f64;
            let theory = (-b * w.powf(alpha) * norm).exp();
            assert!((emp - theory).abs() < 4.0 / (picks.len() as f64).sqrt(), "w={w}: {emp} vs {theory}");
        }
    }

    #[test]
    fn step_rescaling_matches_exact_ou_discretization() {
        // s' = -s + w with sigma_0^2 = 1 sampled every h: AR(1) with
        // coefficient e^{-h} and stationary variance 1/2.
        let h = 0.2;
        let s = sys(&[c(-1.0, 0.0)]).with_step(h).unwrap();
        let r: Realization<f64> = generate_gaussian(&s, 1.0, 200_000, 12).unwrap();
        let x: Vec<f64> = r.samples.iter().map(|v| v.re).collect();
        let n = x.len() as f64;
        let var = x.iter().map(|v| v * v).sum::<f64>() / n;
        let lag1 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n;
        assert!((var - 0.5).abs() < 0.03, "var {var}");
        assert!((lag1 / var - (-h).exp()).abs() < 0.01);
    }

    #[test]
    fn mixture_sums_components() {
        let a = sys(&[c(-1.0, 0.0), c(-0.3, 0.0)]);
        let comps = vec![
            MixedComponent { system: a.clone(), innovation: InnovationSpec::gaussian(0.5).unwrap(), method: Method::Auto },
            MixedComponent {
                system: a.clone(),
                innovation: InnovationSpec::poisson(0.2, AmplitudeLaw::default()).unwrap(),
                method: Method::Auto,
            },
        ];
        let mix: Realization<f64> = generate_mixed(&comps, 400, 99).unwrap();
        let mut master = ChaCha8Rng::seed_from_u64(99);
        let g: Realization<f64> = generate(&a, &comps[0].innovation, Method::Auto, 400, master.next_u64()).unwrap();
        let p: Realization<f64> = generate(&a, &comps[1].innovation, Method::Auto, 400, master.next_u64()).unwrap();
        for k in 0..400 {
            assert!((mix.samples[k] - g.samples[k] - p.samples[k]).norm() < 1e-12);
        }
        check_increments(&a, &mix);
        let other = MixedComponent { system: sys(&[c(-2.0, 0.0), c(-0.3, 0.0)]), ..comps[0].clone() };
        let mix2: Realization<f64> = generate_mixed(&[comps[0].clone(), other], 100, 1).unwrap();
        assert!(mix2.increments.is_none());
    }

    #[test]
    fn f32_generation() {
        let s = PoleZeroSystem::<f32>::all_pole(vec![cplx(-1.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        let r: Realization<f32> = generate_gaussian(&s, 1.0, 200, 5).unwrap();
        assert_eq!(r.samples.len(), 200);
        assert!(r.samples.iter().all(|v| v.re.is_finite()));
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = sys(&[c(-1.0, 0.0)]);
        assert!(generate_gaussian::<f64>(&s, 0.0, 10, 1).is_err());
        assert!(generate_gaussian::<f64>(&s, 1.0, 0, 1).is_err());
        let spec = InnovationSpec::gaussian(1.0).unwrap();
        assert!(generate_levy_oversampled::<f64>(&s, &spec, 0, 10, 1).is_err());
        assert!(generate_mixed::<f64>(&[], 10, 1).is_err());
    }
}
