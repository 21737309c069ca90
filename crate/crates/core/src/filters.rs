//! Discrete kernels attached to a system: the localization filter `d_alpha`,
//! the discrete B-spline `B_L(z)`, its spectral factor `b_L+`, the
//! interpolation prefilter `1 / B_L(z)`, the two-sided sequence `q_alpha`,
//! and the resulting correlation and spectrum formulas.
//!
//! Correlations follow `r(k) = E{x[k'] conj(x[k' + k])}` and spectra are
//! `sum_k r(k) e^{-j w k}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::expspline::{bspline_autocorr, PiecewiseExpPoly};
use crate::inverse::first_order_inverse;
use crate::polyroots::poly_roots;
use crate::scalar::{cone, czero, Scalar};
use crate::signal::Signal;
use crate::system::PoleZeroSystem;

/// Frequency grid used for positivity checks of `B_L(e^{jw})`.
pub const RIESZ_GRID: usize = 4096;
/// Roots closer than this to the unit circle make the factorization fail.
pub const UNIT_CIRCLE_MARGIN: f64 = 1e-8;
/// Default truncation level for `q_alpha`.
pub const DEFAULT_Q_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    /// Exact finite impulse response.
    Fir,
    /// Infinite two-sided response truncated where it falls below a tolerance.
    TwoSidedTruncated,
}

/// Filter `h[offset + i] = taps[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec<T> {
    taps: Vec<Complex<T>>,
    offset: i64,
    kind: FilterKind,
}

impl<T: Scalar> FilterSpec<T> {
    pub fn new(taps: Vec<Complex<T>>, offset: i64, kind: FilterKind) -> Self {
        Self { taps, offset, kind }
    }

    pub fn taps(&self) -> &[Complex<T>] {
        &self.taps
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Last index carrying a tap.
    pub fn last_index(&self) -> i64 {
        self.offset + self.taps.len() as i64 - 1
    }

    /// `h[k]`, zero outside the stored range.
    pub fn at(&self, k: i64) -> Complex<T> {
        let i = k - self.offset;
        if i >= 0 && (i as usize) < self.taps.len() {
            self.taps[i as usize]
        } else {
            czero()
        }
    }

    /// `H(e^{jw}) = sum_k h[k] e^{-j w k}`.
    pub fn frequency_response(&self, omega: T) -> Complex<T> {
        self.taps.iter().enumerate().fold(czero(), |acc, (i, &h)| {
            let k = T::from_i64_lossy(self.offset + i as i64);
            acc + h * Complex::new(T::zero(), -omega * k).exp()
        })
    }

    pub fn as_signal(&self) -> Signal<T> {
        Signal::new(self.offset, self.taps.clone())
    }

    /// Full linear convolution `(h * x)`.
    pub fn convolve(&self, x: &Signal<T>) -> Signal<T> {
        if self.taps.is_empty() || x.is_empty() {
            return Signal::new(self.offset + x.start, Vec::new());
        }
        let mut out = vec![czero(); self.taps.len() + x.len() - 1];
        for (i, &h) in self.taps.iter().enumerate() {
            for (j, &v) in x.samples.iter().enumerate() {
                out[i + j] = out[i + j] + h * v;
            }
        }
        Signal::new(self.offset + x.start, out)
    }
}

fn is_real_taps<T: Scalar>(taps: &[Complex<T>]) -> bool {
    taps.iter().all(|t| t.im == T::zero())
}

fn drop_imaginary<T: Scalar>(taps: &mut [Complex<T>]) {
    for t in taps.iter_mut() {
        t.im = T::zero();
    }
}

/// Coefficients of `D_alpha(z) = prod_n (1 - e^{alpha_n} z^{-1})`, `N + 1` taps from index 0.
pub fn localization_coeffs<T: Scalar>(poles: &[Complex<T>]) -> FilterSpec<T> {
    let mut taps = vec![cone::<T>()];
    for &p in poles {
        let r = p.exp();
        let mut next = vec![czero(); taps.len() + 1];
        for (k, &t) in taps.iter().enumerate() {
            next[k] = next[k] + t;
            next[k + 1] = next[k + 1] - r * t;
        }
        taps = next;
    }
    if conjugate_closed(poles) {
        drop_imaginary(&mut taps);
    }
    FilterSpec::new(taps, 0, FilterKind::Fir)
}

fn conjugate_closed<T: Scalar>(poles: &[Complex<T>]) -> bool {
    let mut used = vec![false; poles.len()];
    'outer: for i in 0..poles.len() {
        if used[i] {
            continue;
        }
        if poles[i].im == T::zero() {
            used[i] = true;
            continue;
        }
        for j in i + 1..poles.len() {
            if !used[j] && poles[j] == poles[i].conj() {
                used[i] = true;
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Smallest value of a Hermitian filter's (real) frequency response on an even grid.
pub fn min_on_unit_circle<T: Scalar>(filter: &FilterSpec<T>, points: usize) -> T {
    let step = T::TAU() / T::from_usize_lossy(points);
    (0..points)
        .map(|i| filter.frequency_response(step * T::from_usize_lossy(i)).re)
        .fold(T::infinity(), |m, v| m.min(v))
}

/// Taps of `B_L(z) = sum_k beta_{LL*}(k) z^{-k}` on lags `-(N-1)..=N-1`.
pub fn discrete_bspline_filter<T: Scalar>(sys: &PoleZeroSystem<T>) -> Result<FilterSpec<T>> {
    discrete_bspline_from_kernel(&bspline_autocorr(sys), sys.is_real())
}

pub(crate) fn discrete_bspline_from_kernel<T: Scalar>(kernel: &PiecewiseExpPoly<T>, real: bool) -> Result<FilterSpec<T>> {
    let (lo, hi) = kernel.support();
    let n = hi.max(-lo);
    let mut taps: Vec<_> = (-n..=n).map(|k| kernel.eval(T::from_i64_lossy(k))).collect();
    let scale = taps.iter().fold(T::zero(), |m, t| m.max(t.norm()));
    let mut offset = -n;
    // The kernel is continuous and vanishes at the ends of its support.
    while taps.len() > 1 && taps[0].norm() <= T::lit(1e-12) * scale && taps[taps.len() - 1].norm() <= T::lit(1e-12) * scale {
        taps.remove(0);
        taps.pop();
        offset += 1;
    }
    // Enforce exact Hermitian symmetry.
    let len = taps.len();
    for i in 0..len / 2 {
        let j = len - 1 - i;
        let avg = (taps[i] + taps[j].conj()) * T::lit(0.5);
        taps[i] = avg;
        taps[j] = avg.conj();
    }
    taps[len / 2].im = T::zero();
    if real {
        drop_imaginary(&mut taps);
    }
    let filter = FilterSpec::new(taps, offset, FilterKind::Fir);
    let min = min_on_unit_circle(&filter, RIESZ_GRID);
    if !(min > T::lit(1e-12) * scale) {
        return Err(Error::RieszViolation(format!("B_L(e^jw) has minimum {min} on the unit circle")));
    }
    Ok(filter)
}

/// Minimum-phase factor `b_L+` of `B_L` and the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFactor<T> {
    /// Causal taps from index 0.
    pub filter: FilterSpec<T>,
    /// Zeros of `b_L+(z)`, all strictly inside the unit circle.
    pub roots: Vec<Complex<T>>,
    /// Leading tap `c`, so that `b_L+(z) = c prod_i (1 - z_i z^{-1})`.
    pub gain: T,
    /// Largest tap error of `b_L+ * conj(b_L+[-.])` against `B_L`.
    pub residual: T,
}

/// Causal `b+` with zeros inside the unit circle and
/// `sum_m b+[m] conj(b+[m - k]) = B[k]`, so `|B+(e^{jw})|^2 = B(e^{jw})`.
pub fn spectral_factorize<T: Scalar>(bl: &FilterSpec<T>) -> Result<FilterSpec<T>> {
    Ok(spectral_factorize_detailed(bl)?.filter)
}

pub fn spectral_factorize_detailed<T: Scalar>(bl: &FilterSpec<T>) -> Result<SpectralFactor<T>> {
    let taps = bl.taps();
    if taps.is_empty() || taps.len() % 2 == 0 || bl.offset() != -((taps.len() as i64 - 1) / 2) {
        return Err(Error::InvalidParameter("spectral factorization needs taps centred on lag 0".into()));
    }
    let half = (taps.len() - 1) / 2;
    let scale = taps.iter().fold(T::zero(), |m, t| m.max(t.norm()));
    let min = min_on_unit_circle(bl, RIESZ_GRID);
    if !(min > T::lit(1e-12) * scale) {
        return Err(Error::FactorizationFailure(format!("B(e^jw) reaches {min} on the unit circle")));
    }
    let b0 = taps[half].re;
    let roots: Vec<Complex<T>> = if half == 0 {
        Vec::new()
    } else {
        // z^half B(z) has ascending coefficients B[half], ..., B[-half].
        let coeffs: Vec<_> = taps.iter().rev().copied().collect();
        let all = poly_roots(&coeffs)?;
        let margin = T::lit(UNIT_CIRCLE_MARGIN);
        if let Some(r) = all.iter().find(|r| (r.norm() - T::one()).abs() < margin) {
            return Err(Error::FactorizationFailure(format!("root {r} lies on the unit circle")));
        }
        let inside: Vec<_> = all.into_iter().filter(|r| r.norm() < T::one()).collect();
        if inside.len() != half {
            return Err(Error::FactorizationFailure(format!(
                "expected {half} roots inside the unit circle, found {}",
                inside.len()
            )));
        }
        inside
    };
    let mut poly = vec![cone::<T>()];
    for &z in &roots {
        let mut next = vec![czero(); poly.len() + 1];
        for (k, &p) in poly.iter().enumerate() {
            next[k] = next[k] + p;
            next[k + 1] = next[k + 1] - z * p;
        }
        poly = next;
    }
    let energy = poly.iter().fold(T::zero(), |s, p| s + p.norm_sqr());
    let gain = (b0 / energy).sqrt();
    let mut btaps: Vec<_> = poly.iter().map(|&p| p * gain).collect();
    if is_real_taps(taps) {
        drop_imaginary(&mut btaps);
    }
    let residual = (0..taps.len())
        .map(|i| {
            let k = i as i64 - half as i64;
            let acc = (0..btaps.len() as i64)
                .filter(|&m| m - k >= 0 && ((m - k) as usize) < btaps.len())
                .fold(czero::<T>(), |a, m| a + btaps[m as usize] * btaps[(m - k) as usize].conj());
            (acc - taps[i]).norm()
        })
        .fold(T::zero(), |m, v| m.max(v));
    let tol = residual_tolerance::<T>() * T::one().max(scale);
    if !(residual <= tol) {
        return Err(Error::FactorizationFailure(format!("factor reproduces B with residual {residual} > {tol}")));
    }
    Ok(SpectralFactor { filter: FilterSpec::new(btaps, 0, FilterKind::Fir), roots, gain, residual })
}

fn residual_tolerance<T: Scalar>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(1e4))
}

/// Exact inverse of `B_L(z)` as a cascade of first-order sections:
/// `1 / (c^2 prod_i (1 - z_i z^{-1}) (1 - conj(z_i) z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationFilter<T> {
    pub roots: Vec<Complex<T>>,
    pub gain: T,
}

impl<T: Scalar> InterpolationFilter<T> {
    pub fn from_factor(f: &SpectralFactor<T>) -> Self {
        Self { roots: f.roots.clone(), gain: f.gain }
    }

    pub fn is_identity(&self) -> bool {
        self.roots.is_empty() && self.gain == T::one()
    }

    /// Applies the cascade on the domain of `x` with zero initial states at both ends.
    pub fn apply(&self, x: &Signal<T>) -> Signal<T> {
        let n = x.len();
        let mut y = x.samples.clone();
        for &z in &self.roots {
            for k in 1..n {
                let prev = y[k - 1];
                y[k] = y[k] + z * prev;
            }
            let zc = z.conj();
            for k in (0..n.saturating_sub(1)).rev() {
                let next = y[k + 1];
                y[k] = y[k] + zc * next;
            }
        }
        let g = T::one() / (self.gain * self.gain);
        Signal::new(x.start, y.into_iter().map(|v| v * g).collect())
    }

    /// Zero padding on each side after which the impulse response is below `tol`.
    pub fn padding(&self, tol: T) -> usize {
        let r = self.roots.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if r == T::zero() {
            return 0;
        }
        let per_root = (tol.ln() / r.ln()).ceil().max(T::zero());
        per_root.to_usize().unwrap_or(0) + 4 * self.roots.len() + 4
    }

    /// Apply to `x` after zero-extending it by [`Self::padding`] on both sides.
    pub fn apply_padded(&self, x: &Signal<T>, tol: T) -> Signal<T> {
        let p = self.padding(tol) as i64;
        self.apply(&x.window(x.start - p, x.end() + p))
    }

    /// Two-sided impulse response `h_int`, truncated below `tol`.
    pub fn impulse_response(&self, tol: T) -> FilterSpec<T> {
        let p = self.padding(tol) as i64;
        let y = self.apply(&Signal::impulse(-p, p));
        let (taps, offset) = trim(y.samples, y.start, tol);
        FilterSpec::new(taps, offset, FilterKind::TwoSidedTruncated)
    }
}

/// Inverse of `B_L(z)` for the system.
pub fn interpolation_filter<T: Scalar>(sys: &PoleZeroSystem<T>) -> Result<InterpolationFilter<T>> {
    let bl = discrete_bspline_filter(sys)?;
    Ok(InterpolationFilter::from_factor(&spectral_factorize_detailed(&bl)?))
}

/// Function in the span of `beta_{LL*}(t - k)` recovered from its integer samples.
#[derive(Debug, Clone)]
pub struct AutocorrInterpolator<T> {
    pub coeffs: Signal<T>,
    pub kernel: PiecewiseExpPoly<T>,
}

impl<T: Scalar> AutocorrInterpolator<T> {
    /// Coefficients `c = h_int * f` for samples `f[k]` (zero outside the stored range).
    pub fn new(sys: &PoleZeroSystem<T>, samples: &Signal<T>) -> Result<Self> {
        let filter = interpolation_filter(sys)?;
        let coeffs = filter.apply_padded(samples, T::lit(1e-16).max(T::epsilon()));
        Ok(Self { coeffs, kernel: bspline_autocorr(sys) })
    }

    /// `f(t) = sum_k c[k] beta_{LL*}(t - k)`.
    pub fn eval(&self, t: T) -> Complex<T> {
        let (lo, hi) = self.kernel.support();
        let center = t.floor().to_i64().unwrap_or(0);
        ((center - hi)..=(center - lo)).fold(czero(), |acc, k| {
            acc + self.coeffs.at(k) * self.kernel.eval(t - T::from_i64_lossy(k))
        })
    }
}

fn trim<T: Scalar>(mut taps: Vec<Complex<T>>, mut offset: i64, tol: T) -> (Vec<Complex<T>>, i64) {
    let first = taps.iter().position(|v| v.norm() >= tol);
    match first {
        None => (vec![czero()], 0),
        Some(f) => {
            let last = taps.iter().rposition(|v| v.norm() >= tol).unwrap();
            taps.truncate(last + 1);
            taps.drain(..f);
            offset += f as i64;
            (taps, offset)
        }
    }
}

/// Two-sided `q_alpha` with `Q(e^{jw}) = 1 / |D_alpha(e^{-jw})|^2`, truncated where `|q| < tol`.
///
/// Computed as `conj(p) * p(-.)` where `p` is the stable inverse of `d_alpha`.
pub fn q_alpha<T: Scalar>(sys: &PoleZeroSystem<T>, tol: T) -> Result<FilterSpec<T>> {
    if !sys.is_stationary() {
        return Err(Error::Unsupported("q_alpha needs a system without imaginary poles".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("q_alpha tolerance must be positive, got {tol}")));
    }
    let decay = sys.min_decay_rate().unwrap_or(T::one());
    let order = T::from_usize_lossy(sys.order());
    let h = ((T::one() / tol).ln() / decay * T::lit(1.5)).ceil() + T::lit(4.0) * order + T::lit(8.0);
    let h = h.to_i64().unwrap_or(i64::MAX / 4);
    let mut v = Signal::impulse(-h, h);
    for &p in sys.poles() {
        v = first_order_inverse(p.conj(), &v);
    }
    v = v.reversed();
    for &p in sys.poles() {
        v = first_order_inverse(p, &v);
    }
    v = v.reversed();
    let (mut taps, offset) = trim(v.samples, v.start, tol);
    // Exact Hermitian symmetry about lag 0.
    let lo = offset;
    let hi = offset + taps.len() as i64 - 1;
    let lag = (-lo).max(hi);
    let mut sym = vec![czero::<T>(); (2 * lag + 1) as usize];
    for k in -lag..=lag {
        let a = if k >= lo && k <= hi { taps[(k - lo) as usize] } else { czero() };
        let b = if -k >= lo && -k <= hi { taps[(-k - lo) as usize].conj() } else { czero() };
        sym[(k + lag) as usize] = (a + b) * T::lit(0.5);
    }
    taps = sym;
    if sys.is_real() {
        drop_imaginary(&mut taps);
    }
    Ok(FilterSpec::new(taps, -lag, FilterKind::TwoSidedTruncated))
}

/// Stationary autocorrelation `r_s(t) = var0 sum_k q[k] beta_{LL*}(t - k)`.
#[derive(Debug, Clone)]
pub struct StationaryAutocorr<T> {
    pub var0: T,
    pub q: FilterSpec<T>,
    pub kernel: PiecewiseExpPoly<T>,
}

impl<T: Scalar> StationaryAutocorr<T> {
    pub fn new(sys: &PoleZeroSystem<T>, var0: T) -> Result<Self> {
        Self::with_tolerance(sys, var0, T::lit(DEFAULT_Q_TOLERANCE))
    }

    pub fn with_tolerance(sys: &PoleZeroSystem<T>, var0: T, tol: T) -> Result<Self> {
        Ok(Self { var0, q: q_alpha(sys, tol)?, kernel: bspline_autocorr(sys) })
    }

    pub fn eval(&self, t: T) -> Complex<T> {
        let (lo, hi) = self.kernel.support();
        let center = t.floor().to_i64().unwrap_or(0);
        let kmin = (center - hi).max(self.q.offset());
        let kmax = (center - lo).min(self.q.last_index());
        let sum = (kmin..=kmax).fold(czero(), |acc, k| acc + self.q.at(k) * self.kernel.eval(t - T::from_i64_lossy(k)));
        sum * self.var0
    }
}

/// One-off evaluation of `r_s(t)`; build a [`StationaryAutocorr`] for repeated use.
pub fn continuous_autocorr<T: Scalar>(sys: &PoleZeroSystem<T>, var0: T, t: T) -> Result<Complex<T>> {
    Ok(StationaryAutocorr::new(sys, var0)?.eval(t))
}

/// Power spectra at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint<T> {
    /// `var0 B_L(e^{jw})`, spectrum of the generalized increments.
    pub increment: T,
    /// `var0 B_L(e^{jw}) / |D_alpha(e^{-jw})|^2`, spectrum of the sampled process
    /// (`None` for non-stationary systems).
    pub process: Option<T>,
}

/// Spectra of the increments and of the sampled process.
pub fn power_spectrum<T: Scalar>(sys: &PoleZeroSystem<T>, var0: T, omega: T) -> Result<SpectrumPoint<T>> {
    let bl = discrete_bspline_filter(sys)?;
    let d = localization_coeffs(sys.poles());
    Ok(spectrum_from_filters(&bl, &d, sys.is_stationary(), var0, omega))
}

pub(crate) fn spectrum_from_filters<T: Scalar>(
    bl: &FilterSpec<T>,
    d: &FilterSpec<T>,
    stationary: bool,
    var0: T,
    omega: T,
) -> SpectrumPoint<T> {
    let increment = var0 * bl.frequency_response(omega).re;
    let process = stationary.then(|| increment / d.frequency_response(-omega).norm_sqr());
    SpectrumPoint { increment, process }
}

/// Process spectrum, or `Unsupported` for non-stationary systems.
pub fn process_spectrum<T: Scalar>(sys: &PoleZeroSystem<T>, var0: T, omega: T) -> Result<T> {
    power_spectrum(sys, var0, omega)?
        .process
        .ok_or_else(|| Error::Unsupported("the sampled process of a non-stationary system has no spectrum".into()))
}
