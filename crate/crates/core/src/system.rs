//! Pole/zero description of the whitening operator `L`.
//!
//! A system is the factorized differential operator
//! `P(D) s = b_M Q(D) w` with `P` monic of degree `N` (the poles) and
//! `Q` monic of degree `M < N` (the zeros). Poles on the imaginary axis are
//! the source of non-stationarity; they are kept at the end of the pole list
//! because the shift-variant inverses have to be applied last, in that order.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, Scalar};

/// Default threshold on `|Re(alpha)|` below which a pole counts as imaginary.
pub const DEFAULT_IMAGINARY_TOLERANCE: f64 = 1e-12;

/// Tolerance used when deciding whether two imaginary poles are `2 pi k` apart.
const RIESZ_TOLERANCE: f64 = 1e-9;

/// Admissible pole/zero model with its sampling step.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleZeroSystem<T> {
    poles: Vec<Complex<T>>,
    zeros: Vec<Complex<T>>,
    gain: Complex<T>,
    n0: usize,
    step: T,
    imaginary_tolerance: T,
    real: bool,
}

impl<T: Scalar> PoleZeroSystem<T> {
    /// Builds a system with the default imaginary-axis tolerance and unit step.
    pub fn new(poles: Vec<Complex<T>>, zeros: Vec<Complex<T>>, gain: Complex<T>) -> Result<Self> {
        Self::build(poles, zeros, gain, T::lit(DEFAULT_IMAGINARY_TOLERANCE))
    }

    /// All-pole system with unit gain.
    pub fn all_pole(poles: Vec<Complex<T>>) -> Result<Self> {
        Self::new(poles, Vec::new(), cone())
    }

    /// Validates and normalizes a pole/zero model.
    ///
    /// Poles with `|Re| < imaginary_tolerance` are moved to the end of the list
    /// (stable partition, so the relative order inside each group is kept).
    pub fn build(
        poles: Vec<Complex<T>>,
        zeros: Vec<Complex<T>>,
        gain: Complex<T>,
        imaginary_tolerance: T,
    ) -> Result<Self> {
        if poles.is_empty() || zeros.len() >= poles.len() {
            return Err(Error::OrderViolation { poles: poles.len(), zeros: zeros.len() });
        }
        if poles.iter().chain(zeros.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite())
            || !gain.re.is_finite()
            || !gain.im.is_finite()
        {
            return Err(Error::InvalidParameter("non-finite pole, zero or gain".into()));
        }
        if gain.norm() == T::zero() {
            return Err(Error::InvalidParameter("gain must be non-zero".into()));
        }

        let is_imag = |p: &Complex<T>| p.re.abs() < imaginary_tolerance;
        let (mut ordered, imaginary): (Vec<_>, Vec<_>) = poles.into_iter().partition(|p| !is_imag(p));
        let n0 = imaginary.len();
        ordered.extend(imaginary);

        let two_pi = T::TAU();
        let riesz_tol = T::lit(RIESZ_TOLERANCE);
        let freqs: Vec<T> = ordered[ordered.len() - n0..].iter().map(|p| p.im).collect();
        for (i, &wi) in freqs.iter().enumerate() {
            for &wj in &freqs[i + 1..] {
                let d = wi - wj;
                let k = (d / two_pi).round();
                if k != T::zero() && (d - k * two_pi).abs() < riesz_tol {
                    return Err(Error::RieszViolation(format!(
                        "imaginary poles j{wi} and j{wj} differ by a non-zero multiple of 2*pi"
                    )));
                }
            }
        }

        let real = conjugate_closed(&ordered) && conjugate_closed(&zeros) && gain.im == T::zero();
        Ok(Self { poles: ordered, zeros, gain, n0, step: T::one(), imaginary_tolerance, real })
    }

    /// Same system sampled with step `step` (in the time unit of the poles).
    pub fn with_step(mut self, step: T) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::InvalidParameter(format!("sampling step must be positive, got {step}")));
        }
        self.step = step;
        Ok(self)
    }

    pub fn poles(&self) -> &[Complex<T>] {
        &self.poles
    }

    pub fn zeros(&self) -> &[Complex<T>] {
        &self.zeros
    }

    pub fn gain(&self) -> Complex<T> {
        self.gain
    }

    /// Number of purely imaginary poles (the unstability order).
    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn imaginary_tolerance(&self) -> T {
        self.imaginary_tolerance
    }

    /// Order `N` of the system.
    pub fn order(&self) -> usize {
        self.poles.len()
    }

    pub fn num_zeros(&self) -> usize {
        self.zeros.len()
    }

    /// Poles with a non-zero real part (the shift-invariant part of the inverse).
    pub fn lsi_poles(&self) -> &[Complex<T>] {
        &self.poles[..self.poles.len() - self.n0]
    }

    /// Frequencies `omega_m` of the imaginary poles `j omega_m`, in application order.
    pub fn imaginary_frequencies(&self) -> Vec<T> {
        self.poles[self.poles.len() - self.n0..].iter().map(|p| p.im).collect()
    }

    pub fn is_stationary(&self) -> bool {
        self.n0 == 0
    }

    /// True when poles and zeros are closed under conjugation and the gain is real.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Smallest `|Re(alpha)|` over the shift-invariant poles, if any.
    pub fn min_decay_rate(&self) -> Option<T> {
        self.lsi_poles().iter().map(|p| p.re.abs()).fold(None, |acc, r| match acc {
            None => Some(r),
            Some(a) => Some(a.min(r)),
        })
    }
}

fn conjugate_closed<T: Scalar>(values: &[Complex<T>]) -> bool {
    let mut used = vec![false; values.len()];
    for (i, v) in values.iter().enumerate() {
        if used[i] {
            continue;
        }
        let scale = T::one().max(v.norm());
        let tol = T::lit(1e-12) * scale;
        if v.im.abs() <= tol {
            used[i] = true;
            continue;
        }
        let partner = (0..values.len())
            .find(|&j| j != i && !used[j] && (values[j] - v.conj()).norm() <= tol);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}

/// Unit-step equivalent of `sys` for sampling step `step`.
///
/// Sampling `s` at `k * step` is the same as sampling `s(step * t)` at the
/// integers; the dilated process obeys the system with poles and zeros
/// multiplied by `step` and gain multiplied by `step^(N - M)`, driven by the
/// dilated innovation (see [`crate::innovations::InnovationSpec::rescale`]).
/// The returned system carries `sys.step() / step` as its own step.
pub fn rescale_system<T: Scalar>(sys: &PoleZeroSystem<T>, step: T) -> Result<PoleZeroSystem<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!("rescaling step must be positive, got {step}")));
    }
    if step == T::one() {
        return Ok(sys.clone());
    }
    let excess = (sys.order() - sys.num_zeros()) as i32;
    let poles = sys.poles.iter().map(|p| p * step).collect();
    let zeros = sys.zeros.iter().map(|z| z * step).collect();
    let gain = sys.gain * step.powi(excess);
    let tol = sys.imaginary_tolerance * step.max(T::one());
    PoleZeroSystem::build(poles, zeros, gain, tol)?.with_step(sys.step / step)
}
