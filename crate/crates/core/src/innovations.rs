//! Innovation laws (Gaussian, compound Poisson, symmetric alpha-stable): Lévy
//! exponents, variances, samplers and the characteristic functions of the
//! increment sequence and of the sampled process.
//!
//! Innovation parameters and random draws are `f64`; systems may use any scalar.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::expspline::{bspline_l, GreenFunction};
use crate::quadrature::integrate_panels;
use crate::scalar::Scalar;
use crate::system::PoleZeroSystem;

/// Absolute tolerance of the characteristic-function quadratures.
pub const CHARFN_TOLERANCE: f64 = 1e-10;
/// Envelope level below which the Green-function tails are dropped.
pub const TAIL_ENVELOPE: f64 = 1e-12;

/// User-supplied amplitude law for compound Poisson innovations.
pub trait AmplitudeDensity: Send + Sync {
    fn sample(&self, rng: &mut dyn RngCore) -> f64;
    fn density(&self, a: f64) -> f64;
    /// Interval outside of which the density is negligible.
    fn support(&self) -> (f64, f64);
    /// Closed-form `E{e^{j w a}}`, if available.
    fn charfn(&self, _omega: f64) -> Option<Complex<f64>> {
        None
    }
}

#[derive(Clone)]
pub enum AmplitudeLaw {
    Normal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
    Custom(Arc<dyn AmplitudeDensity>),
}

impl fmt::Debug for AmplitudeLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Normal { mean, std } => write!(f, "Normal {{ mean: {mean}, std: {std} }}"),
            Self::Uniform { lo, hi } => write!(f, "Uniform {{ lo: {lo}, hi: {hi} }}"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Default for AmplitudeLaw {
    fn default() -> Self {
        Self::Normal { mean: 0.0, std: 1.0 }
    }
}

struct ScaledDensity {
    inner: Arc<dyn AmplitudeDensity>,
    factor: f64,
}

impl AmplitudeDensity for ScaledDensity {
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.inner.sample(rng) * self.factor
    }

    fn density(&self, a: f64) -> f64 {
        self.inner.density(a / self.factor) / self.factor.abs()
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        let (x, y) = (lo * self.factor, hi * self.factor);
        (x.min(y), x.max(y))
    }

    fn charfn(&self, omega: f64) -> Option<Complex<f64>> {
        self.inner.charfn(omega * self.factor)
    }
}

impl AmplitudeLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::Normal { mean, std } if !(std > 0.0 && std.is_finite() && mean.is_finite()) => {
                Err(Error::InvalidParameter(format!("normal amplitude needs finite mean and std > 0, got {mean}, {std}")))
            }
            Self::Uniform { lo, hi } if !(lo < hi && lo.is_finite() && hi.is_finite()) => {
                Err(Error::InvalidParameter(format!("uniform amplitude needs lo < hi, got [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Normal { mean, std } => mean + std * rng.sample::<f64, _>(StandardNormal),
            Self::Uniform { lo, hi } => rng.random_range(*lo..*hi),
            Self::Custom(d) => {
                let mut adapter = RngAdapter(rng);
                d.sample(&mut adapter)
            }
        }
    }

    /// `E{e^{j w a}}`.
    pub fn charfn(&self, omega: f64) -> Result<Complex<f64>> {
        match self {
            Self::Normal { mean, std } => Ok(Complex::new(-0.5 * std * std * omega * omega, mean * omega).exp()),
            Self::Uniform { lo, hi } => {
                let x = omega * (hi - lo);
                if x.abs() < 1e-8 {
                    return Ok(Complex::new(0.0, omega * 0.5 * (lo + hi)).exp());
                }
                let num = Complex::new(0.0, omega * hi).exp() - Complex::new(0.0, omega * lo).exp();
                Ok(num / Complex::new(0.0, x))
            }
            Self::Custom(d) => match d.charfn(omega) {
                Some(v) => Ok(v),
                None => custom_expectation(d.as_ref(), |a| Complex::new(0.0, omega * a).exp()),
            },
        }
    }

    /// `E{a^2}`.
    pub fn second_moment(&self) -> Result<f64> {
        match self {
            Self::Normal { mean, std } => Ok(mean * mean + std * std),
            Self::Uniform { lo, hi } => Ok((lo * lo + lo * hi + hi * hi) / 3.0),
            Self::Custom(d) => Ok(custom_expectation(d.as_ref(), |a| Complex::new(a * a, 0.0))?.re),
        }
    }

    /// Law of `factor * a`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Self::Normal { mean, std } => Self::Normal { mean: mean * factor, std: std * factor.abs() },
            Self::Uniform { lo, hi } => {
                let (x, y) = (lo * factor, hi * factor);
                Self::Uniform { lo: x.min(y), hi: x.max(y) }
            }
            Self::Custom(d) => Self::Custom(Arc::new(ScaledDensity { inner: d.clone(), factor })),
        }
    }
}

struct RngAdapter<'a, R: ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

fn custom_expectation(d: &dyn AmplitudeDensity, g: impl Fn(f64) -> Complex<f64>) -> Result<Complex<f64>> {
    let (lo, hi) = d.support();
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("custom amplitude support must be a finite interval, got [{lo}, {hi}]")));
    }
    let panels = 64;
    let breaks: Vec<f64> = (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
    integrate_panels(|a: f64| g(a) * d.density(a), &breaks, 1e-12)
}

#[derive(Debug, Clone)]
pub enum InnovationSpec {
    /// `f(w) = -b2 w^2`.
    Gaussian { b2: f64 },
    /// `f(w) = lambda int (e^{j a w} - 1) p_A(a) da`.
    CompoundPoisson { lambda: f64, amplitude: AmplitudeLaw },
    /// `f(w) = -b_alpha |w|^alpha`.
    SymmetricStable { alpha: f64, b_alpha: f64 },
}

impl InnovationSpec {
    pub fn gaussian(b2: f64) -> Result<Self> {
        let s = Self::Gaussian { b2 };
        s.validate()?;
        Ok(s)
    }

    pub fn poisson(lambda: f64, amplitude: AmplitudeLaw) -> Result<Self> {
        let s = Self::CompoundPoisson { lambda, amplitude };
        s.validate()?;
        Ok(s)
    }

    pub fn symmetric_stable(alpha: f64, b_alpha: f64) -> Result<Self> {
        let s = Self::SymmetricStable { alpha, b_alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian { b2 } if !(*b2 > 0.0 && b2.is_finite()) => {
                Err(Error::InvalidParameter(format!("gaussian b2 must be positive, got {b2}")))
            }
            Self::CompoundPoisson { lambda, amplitude } => {
                if !(*lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::InvalidParameter(format!("poisson rate must be non-negative, got {lambda}")));
                }
                amplitude.validate()
            }
            Self::SymmetricStable { alpha, b_alpha } => {
                if !(*alpha > 0.0 && *alpha <= 2.0) {
                    return Err(Error::InvalidParameter(format!("stability index must lie in (0, 2], got {alpha}")));
                }
                if !(*b_alpha > 0.0 && b_alpha.is_finite()) {
                    return Err(Error::InvalidParameter(format!("stable scale must be positive, got {b_alpha}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Lévy exponent `f(w)`.
    pub fn levy_exponent(&self, omega: f64) -> Result<Complex<f64>> {
        Ok(match self {
            Self::Gaussian { b2 } => Complex::new(-b2 * omega * omega, 0.0),
            Self::CompoundPoisson { lambda, amplitude } => {
                if omega == 0.0 {
                    return Ok(Complex::new(0.0, 0.0));
                }
                (amplitude.charfn(omega)? - 1.0) * *lambda
            }
            Self::SymmetricStable { alpha, b_alpha } => Complex::new(-b_alpha * omega.abs().powf(*alpha), 0.0),
        })
    }

    /// `sigma_0^2 = -f''(0)`; `UndefinedVariance` for stable laws with `alpha < 2`.
    pub fn variance(&self) -> Result<f64> {
        match self {
            Self::Gaussian { b2 } => Ok(2.0 * b2),
            Self::CompoundPoisson { lambda, amplitude } => Ok(lambda * amplitude.second_moment()?),
            Self::SymmetricStable { alpha, b_alpha } => {
                if *alpha == 2.0 {
                    Ok(2.0 * b_alpha)
                } else {
                    Err(Error::UndefinedVariance(format!("stable innovation with alpha = {alpha} has infinite variance")))
                }
            }
        }
    }

    /// Innovation of the dilated process: `f~(w) = T f(w / T)` for `T = step`.
    pub fn rescale(&self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("rescaling step must be positive, got {step}")));
        }
        Ok(match self {
            Self::Gaussian { b2 } => Self::Gaussian { b2: b2 / step },
            Self::CompoundPoisson { lambda, amplitude } => {
                Self::CompoundPoisson { lambda: lambda * step, amplitude: amplitude.scaled(1.0 / step) }
            }
            Self::SymmetricStable { alpha, b_alpha } => {
                Self::SymmetricStable { alpha: *alpha, b_alpha: b_alpha * step.powf(1.0 - alpha) }
            }
        })
    }

    /// Upper bound on `|f(x)| / g(|x|)`-style growth used for tail truncation:
    /// returns the largest `|x|` whose contribution `|f(x)|` stays below `level`.
    fn negligible_argument(&self, level: f64) -> f64 {
        match self {
            Self::Gaussian { b2 } => (level / b2).sqrt().min(level),
            Self::CompoundPoisson { lambda, amplitude } => {
                let m = amplitude.second_moment().unwrap_or(1.0).sqrt().max(1e-300);
                (level / (lambda * m).max(1e-300)).min(level)
            }
            Self::SymmetricStable { alpha, b_alpha } => (level / b_alpha).powf(1.0 / alpha).min(level),
        }
    }
}

/// `f(w)` of the innovation.
pub fn levy_exponent(spec: &InnovationSpec, omega: f64) -> Result<Complex<f64>> {
    spec.levy_exponent(omega)
}

/// `sigma_0^2` of the innovation.
pub fn innovation_variance(spec: &InnovationSpec) -> Result<f64> {
    spec.variance()
}

/// Impulses `(t_n, a_n)` of a compound Poisson innovation, sorted by time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoissonKnots {
    pub times: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl PoissonKnots {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// One realization of the innovation over a window.
#[derive(Debug, Clone, PartialEq)]
pub enum InnovationDraw {
    /// `values[i]` is the innovation integrated over `[start + i step, start + (i+1) step)`.
    Grid { start: f64, step: f64, values: Vec<f64> },
    Knots(PoissonKnots),
}

/// Poisson knots on `[a, b]`: count ~ Poisson(lambda (b - a)), uniform times, i.i.d. amplitudes.
pub fn draw_poisson_knots<R: Rng + ?Sized>(lambda: f64, amplitude: &AmplitudeLaw, a: f64, b: f64, rng: &mut R) -> PoissonKnots {
    let mean = lambda * (b - a);
    let count = if mean > 0.0 { Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0) } else { 0 };
    let mut times: Vec<f64> = (0..count).map(|_| rng.random_range(a..b)).collect();
    times.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let amplitudes = (0..count).map(|_| amplitude.sample(rng)).collect();
    PoissonKnots { times, amplitudes }
}

/// Standard symmetric stable variate (`E e^{j w X} = e^{-|w|^alpha}`) by Chambers-Mallows-Stuck.
pub fn standard_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let v = rng.random_range(-half_pi..half_pi);
    if alpha == 1.0 {
        return v.tan();
    }
    let w: f64 = rng.sample(Exp1);
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * ((v - alpha * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// `count` i.i.d. innovation integrals over cells of width `step`.
pub fn draw_grid_increments<R: Rng + ?Sized>(spec: &InnovationSpec, count: usize, step: f64, rng: &mut R) -> Vec<f64> {
    match spec {
        InnovationSpec::Gaussian { b2 } => {
            let sd = (2.0 * b2 * step).sqrt();
            (0..count).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
        }
        InnovationSpec::CompoundPoisson { lambda, amplitude } => {
            let per_cell = Poisson::new(lambda * step).ok();
            (0..count)
                .map(|_| {
                    let n = per_cell.as_ref().map(|d| d.sample(rng) as usize).unwrap_or(0);
                    (0..n).map(|_| amplitude.sample(rng)).sum()
                })
                .collect()
        }
        InnovationSpec::SymmetricStable { alpha, b_alpha } => {
            let scale = (b_alpha * step).powf(1.0 / alpha);
            (0..count).map(|_| scale * standard_stable(*alpha, rng)).collect()
        }
    }
}

/// Innovation over `[a, b]`: knots for compound Poisson, grid integrals otherwise.
pub fn draw_innovations<R: Rng + ?Sized>(
    spec: &InnovationSpec,
    window: (f64, f64),
    grid_step: f64,
    rng: &mut R,
) -> Result<InnovationDraw> {
    let (a, b) = window;
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("innovation window needs a < b, got [{a}, {b}]")));
    }
    spec.validate()?;
    if let InnovationSpec::CompoundPoisson { lambda, amplitude } = spec {
        return Ok(InnovationDraw::Knots(draw_poisson_knots(*lambda, amplitude, a, b, rng)));
    }
    if !(grid_step > 0.0) {
        return Err(Error::InvalidParameter(format!("grid step must be positive, got {grid_step}")));
    }
    let count = ((b - a) / grid_step).ceil() as usize;
    Ok(InnovationDraw::Grid { start: a, step: grid_step, values: draw_grid_increments(spec, count, grid_step, rng) })
}

fn require_real<T: Scalar>(sys: &PoleZeroSystem<T>) -> Result<()> {
    if sys.is_real() {
        Ok(())
    } else {
        Err(Error::Unsupported("characteristic functions are implemented for real-valued systems only".into()))
    }
}

fn integer_breaks(lo: i64, hi: i64) -> Vec<f64> {
    (lo..=hi).map(|k| k as f64).collect()
}

fn exponent_integral(spec: &InnovationSpec, phi: impl Fn(f64) -> f64, breaks: &[f64]) -> Result<Complex<f64>> {
    let mut failure = None;
    let value = integrate_panels(
        |t: f64| match spec.levy_exponent(phi(t)) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex::new(0.0, 0.0)
            }
        },
        breaks,
        CHARFN_TOLERANCE,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Joint characteristic function `E{exp(j sum_i w_i u[k + i])}` of consecutive
/// generalized increments: `exp(int f(sum_i w_i beta_L(i - 1 - t)) dt)`.
pub fn charfn_increment<T: Scalar>(spec: &InnovationSpec, sys: &PoleZeroSystem<T>, omegas: &[f64]) -> Result<Complex<f64>> {
    if omegas.is_empty() {
        return Err(Error::InvalidParameter("at least one frequency is required".into()));
    }
    require_real(sys)?;
    let beta = bspline_l(sys);
    let n = sys.order() as i64;
    let k = omegas.len() as i64;
    let phi = |t: f64| -> f64 {
        omegas
            .iter()
            .enumerate()
            .map(|(i, &w)| w * beta.eval(T::lit(i as f64 - t)).re.as_f64())
            .sum()
    };
    Ok(exponent_integral(spec, phi, &integer_breaks(-n, k - 1))?.exp())
}

/// Largest distance beyond which every Green-function branch stays below `level`.
fn tail_extent<T: Scalar>(green: &GreenFunction<T>, causal: bool, level: f64) -> f64 {
    let terms: Vec<_> = green.terms().iter().filter(|t| t.causal == causal).collect();
    if terms.is_empty() {
        return 0.0;
    }
    let envelope = |s: f64| -> f64 {
        terms
            .iter()
            .map(|t| t.coeff.norm().as_f64() * s.powi(t.degree as i32) * (-(t.pole.re.as_f64().abs()) * s).exp())
            .sum()
    };
    // Past the peaks of s^d e^{-a s} the envelope is decreasing.
    let peak = terms
        .iter()
        .map(|t| t.degree as f64 / t.pole.re.as_f64().abs().max(1e-300))
        .fold(1.0, f64::max);
    let mut s = peak;
    while envelope(s) > level {
        s *= 1.25;
    }
    s.ceil()
}

/// Joint characteristic function `E{exp(j sum_i w_i s(k + i))}` of consecutive
/// samples of a stationary process: `exp(int f(sum_i w_i rho_L(i - 1 - t)) dt)`.
pub fn charfn_sampled_process<T: Scalar>(spec: &InnovationSpec, sys: &PoleZeroSystem<T>, omegas: &[f64]) -> Result<Complex<f64>> {
    if omegas.is_empty() {
        return Err(Error::InvalidParameter("at least one frequency is required".into()));
    }
    if !sys.is_stationary() {
        return Err(Error::Unsupported("the sampled-process characteristic function needs a system without imaginary poles".into()));
    }
    require_real(sys)?;
    let green = GreenFunction::new(sys);
    let weight: f64 = omegas.iter().map(|w| w.abs()).sum::<f64>().max(1e-300);
    let level = spec.negligible_argument(TAIL_ENVELOPE) / weight;
    let ahead = tail_extent(&green, true, level) as i64;
    let behind = tail_extent(&green, false, level) as i64;
    let k = omegas.len() as i64;
    let phi = |t: f64| -> f64 {
        omegas
            .iter()
            .enumerate()
            .map(|(i, &w)| w * green.eval(T::lit(i as f64 - t)).re.as_f64())
            .sum()
    };
    Ok(exponent_integral(spec, phi, &integer_breaks(-ahead - 1, k - 1 + behind + 1))?.exp())
}
