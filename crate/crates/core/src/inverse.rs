//! Discrete inverses of the localization operator `Delta_alpha`.
//!
//! Shift-invariant first-order inverses handle poles off the imaginary axis;
//! poles `j omega0` get the shift-variant right inverse that pins the output
//! to zero at `k = 0`. The composite right inverse applies the former first
//! and the latter last, in system pole order.
//!
//! Finite signals are treated as zero outside their stored range: causal
//! recursions start from `y[start - 1] = 0`, anti-causal ones from `y[end] = 0`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::filters::localization_coeffs;
use crate::scalar::{czero, Scalar};
use crate::signal::Signal;
use crate::system::PoleZeroSystem;

/// Residuals of the `n0` boundary conditions at `k = 0`:
/// `s[0]`, `(Delta_{j w_n0} s)[0]`, ..., `(Delta_{j w_2} ... Delta_{j w_n0} s)[0]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundaryReport<T> {
    pub residuals: Vec<Complex<T>>,
}

impl<T: Scalar> BoundaryReport<T> {
    /// Evaluates the boundary operators on `s` directly.
    ///
    /// Condition `i` needs `s[-i+1..=0]`; residuals whose samples are not all
    /// stored are skipped (that cannot happen for outputs of
    /// [`apply_inverse_composite`], which extends its domain to cover them).
    pub fn measure(sys: &PoleZeroSystem<T>, s: &Signal<T>) -> Self {
        let freqs = sys.imaginary_frequencies();
        let mut residuals = Vec::with_capacity(freqs.len());
        if freqs.is_empty() {
            return Self { residuals };
        }
        let mut z = s.clone();
        if !z.contains(0) {
            return Self { residuals };
        }
        residuals.push(z.at(0));
        for &w in freqs[1..].iter().rev() {
            z = difference(Complex::new(T::zero(), w), &z);
            if !z.contains(0) {
                break;
            }
            residuals.push(z.at(0));
        }
        Self { residuals }
    }

    pub fn max_abs(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, r| m.max(r.norm()))
    }
}

/// First-order difference `y[k] = x[k] - e^a x[k-1]` on the valid region.
fn difference<T: Scalar>(a: Complex<T>, x: &Signal<T>) -> Signal<T> {
    let ea = a.exp();
    let samples = x.samples.windows(2).map(|w| w[1] - ea * w[0]).collect();
    Signal { start: x.start + 1, samples }
}

/// Inverse of `Delta_a` by recursion: causal `y[k] = e^a y[k-1] + x[k]` when
/// `Re(a) <= 0`, anti-causal `y[k] = e^{-a} (y[k+1] - x[k+1])` otherwise.
pub fn first_order_inverse<T: Scalar>(a: Complex<T>, x: &Signal<T>) -> Signal<T> {
    let n = x.len();
    let mut y = vec![czero::<T>(); n];
    if a.re <= T::zero() {
        let ea = a.exp();
        let mut prev = czero();
        for k in 0..n {
            prev = ea * prev + x.samples[k];
            y[k] = prev;
        }
    } else {
        let ema = (-a).exp();
        let mut next = czero();
        let mut next_x = czero();
        for k in (0..n).rev() {
            next = ema * (next - next_x);
            y[k] = next;
            next_x = x.samples[k];
        }
    }
    Signal { start: x.start, samples: y }
}

/// Right inverse of `Delta_{j omega0}` with `y[0] = 0`:
/// `y[k] = (h * x)[k] - e^{j omega0 k} (h * x)[0]`, `h[k] = 1_+[k] e^{j omega0 k}`.
///
/// For `k > 0` this is `sum_{m=1}^{k} x[m] e^{j omega0 (k-m)}`, and for `k < 0`
/// it is `-sum_{m=k+1}^{0} x[m] e^{j omega0 (k-m)}`.
pub fn regularized_inverse<T: Scalar>(omega0: T, x: &Signal<T>) -> Signal<T> {
    let a = Complex::new(T::zero(), omega0);
    let running = first_order_inverse(a, x);
    // (h * x)[0]: the causal sum frozen at the last stored index <= 0, rotated to 0.
    let anchor = if x.start > 0 {
        czero()
    } else {
        let last = (x.end() - 1).min(0);
        running.at(last) * Complex::new(T::zero(), omega0 * T::from_i64_lossy(-last)).exp()
    };
    let samples = running
        .samples
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let k = x.start + i as i64;
            if k == 0 {
                czero()
            } else {
                v - Complex::new(T::zero(), omega0 * T::from_i64_lossy(k)).exp() * anchor
            }
        })
        .collect();
    Signal { start: x.start, samples }
}

/// Composite right inverse `Delta_alpha^{-1}`: shift-invariant inverses for the
/// non-imaginary poles, then the regularized inverses for the imaginary ones.
///
/// When the system has imaginary poles, the input domain is zero-extended so
/// that it covers `-(n0 - 1)..=0` and the boundary residuals can be measured.
pub fn apply_inverse_composite<T: Scalar>(sys: &PoleZeroSystem<T>, x: &Signal<T>) -> (Signal<T>, BoundaryReport<T>) {
    let n0 = sys.n0() as i64;
    let mut y = if n0 > 0 {
        let lo = x.start.min(-(n0 - 1));
        let hi = x.end().max(1);
        x.window(lo, hi)
    } else {
        x.clone()
    };
    for &p in sys.lsi_poles() {
        y = first_order_inverse(p, &y);
    }
    for w in sys.imaginary_frequencies() {
        y = regularized_inverse(w, &y);
    }
    let report = BoundaryReport::measure(sys, &y);
    (y, report)
}

/// Applies FIR taps on the valid region: `y[n] = sum_m taps[m] x[n - m]`.
pub fn fir_valid<T: Scalar>(taps: &[Complex<T>], x: &Signal<T>) -> Result<Signal<T>> {
    let order = taps.len().saturating_sub(1);
    if x.len() <= order {
        return Err(Error::SignalTooShort { len: x.len(), needed: order });
    }
    let samples = (order..x.len())
        .map(|n| taps.iter().enumerate().fold(czero(), |acc, (m, &d)| acc + d * x.samples[n - m]))
        .collect();
    Ok(Signal { start: x.start + order as i64, samples })
}

/// Generalized increments `u = d_alpha * s` on the valid region (length shrinks by `N`).
pub fn apply_localization<T: Scalar>(sys: &PoleZeroSystem<T>, s: &Signal<T>) -> Result<Signal<T>> {
    let d = localization_coeffs(sys.poles());
    fir_valid(d.taps(), s)
}
