//! Exponential B-splines as exact piecewise exponential-polynomials.
//!
//! Every spline here has integer knots. Piece `i` covers `[lo + i, lo + i + 1)`
//! and is stored as a sum of `coeff * tau^degree * exp(pole * tau)` in the
//! local time `tau = t - (lo + i)`, so that no term ever sees a large time
//! argument. Evaluation is right-continuous and zero outside the support.

use num_complex::Complex;

use crate::scalar::{binomial, cone, czero, factorial, powu, Scalar};
use crate::system::PoleZeroSystem;

/// Poles closer than this are merged into an exact repeated pole.
pub const CONFLUENT_TOLERANCE: f64 = 1e-9;

/// One `coeff * tau^degree * exp(pole * tau)` term of a spline piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm<T> {
    pub pole: Complex<T>,
    pub degree: u32,
    pub coeff: Complex<T>,
}

impl<T: Scalar> ExpTerm<T> {
    #[inline]
    fn eval(&self, tau: T) -> Complex<T> {
        self.coeff * (self.pole * tau).exp() * powu(tau, self.degree)
    }
}

/// Exponential spline with integer knots and compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExpPoly<T> {
    lo: i64,
    pieces: Vec<Vec<ExpTerm<T>>>,
}

impl<T: Scalar> PiecewiseExpPoly<T> {
    /// Builds a spline from explicit pieces starting at knot `lo`.
    pub fn from_pieces(lo: i64, pieces: Vec<Vec<ExpTerm<T>>>) -> Self {
        let mut s = Self { lo, pieces };
        for piece in &mut s.pieces {
            merge_terms(piece);
        }
        s
    }

    /// First-order exponential B-spline `exp(a t)` on `[0, 1)`.
    pub fn first_order(pole: Complex<T>) -> Self {
        Self { lo: 0, pieces: vec![vec![ExpTerm { pole, degree: 0, coeff: cone() }]] }
    }

    /// Support `[lo, hi]` as integer knots.
    pub fn support(&self) -> (i64, i64) {
        (self.lo, self.lo + self.pieces.len() as i64)
    }

    pub fn pieces(&self) -> &[Vec<ExpTerm<T>>] {
        &self.pieces
    }

    /// Right-continuous value at `t`.
    pub fn eval(&self, t: T) -> Complex<T> {
        let fl = t.floor();
        let knot = match fl.to_i64() {
            Some(k) => k,
            None => return czero(),
        };
        let idx = knot - self.lo;
        if idx < 0 || idx >= self.pieces.len() as i64 {
            return czero();
        }
        let tau = t - fl;
        self.pieces[idx as usize].iter().map(|term| term.eval(tau)).fold(czero(), |a, b| a + b)
    }

    /// Left limit at `t`.
    pub fn eval_left(&self, t: T) -> Complex<T> {
        let ce = t.ceil();
        let knot = match ce.to_i64() {
            Some(k) => k,
            None => return czero(),
        };
        // The piece that ends at or contains `t` from the left.
        let idx = knot - 1 - self.lo;
        if idx < 0 || idx >= self.pieces.len() as i64 {
            return czero();
        }
        let tau = t - (ce - T::one());
        self.pieces[idx as usize].iter().map(|term| term.eval(tau)).fold(czero(), |a, b| a + b)
    }

    /// Integer samples `f(k)` for `k` in `lo..=hi`.
    pub fn integer_samples(&self) -> Vec<(i64, Complex<T>)> {
        let (lo, hi) = self.support();
        (lo..=hi).map(|k| (k, self.eval(T::from_i64_lossy(k)))).collect()
    }

    /// Piecewise derivative. Valid as a distributional derivative whenever the
    /// spline is continuous, i.e. every time it is applied to build `beta_L`
    /// with `M < N`.
    pub fn derivative(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let mut out = Vec::with_capacity(2 * piece.len());
                for term in piece {
                    if term.degree > 0 {
                        out.push(ExpTerm {
                            pole: term.pole,
                            degree: term.degree - 1,
                            coeff: term.coeff * T::from_u32(term.degree).unwrap(),
                        });
                    }
                    out.push(ExpTerm { pole: term.pole, degree: term.degree, coeff: term.coeff * term.pole });
                }
                merge_terms(&mut out);
                out
            })
            .collect();
        Self { lo: self.lo, pieces }
    }

    /// `self' - gamma * self`, i.e. the operator `(D - gamma Id)` applied piecewise.
    pub fn apply_zero(&self, gamma: Complex<T>) -> Self {
        let mut d = self.derivative();
        for (dp, p) in d.pieces.iter_mut().zip(&self.pieces) {
            dp.extend(p.iter().map(|t| ExpTerm { coeff: -t.coeff * gamma, ..*t }));
            merge_terms(dp);
        }
        d
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.iter().map(|t| ExpTerm { coeff: t.coeff * c, ..*t }).collect())
            .collect();
        Self { lo: self.lo, pieces }
    }

    /// `f(t - k)`: moves the support right by `k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { lo: self.lo + k, pieces: self.pieces.clone() }
    }

    pub fn conj(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.iter().map(|t| ExpTerm { pole: t.pole.conj(), degree: t.degree, coeff: t.coeff.conj() }).collect())
            .collect();
        Self { lo: self.lo, pieces }
    }

    /// `f(-t)`. The result is left-continuous at knots where `f` jumps.
    pub fn mirror(&self) -> Self {
        let (_, hi) = self.support();
        let n = self.pieces.len();
        let mut pieces = Vec::with_capacity(n);
        // New piece i sits on [-hi + i, -hi + i + 1) and mirrors old piece n-1-i.
        for old in self.pieces.iter().rev() {
            let mut out = Vec::new();
            for term in old {
                // c (1 - s)^j e^{p (1 - s)} = c e^p sum_l C(j,l) (-s)^l e^{-p s}
                let base = term.coeff * term.pole.exp();
                for l in 0..=term.degree {
                    let sign = if l % 2 == 0 { T::one() } else { -T::one() };
                    out.push(ExpTerm { pole: -term.pole, degree: l, coeff: base * (binomial::<T>(term.degree, l) * sign) });
                }
            }
            merge_terms(&mut out);
            pieces.push(out);
        }
        Self { lo: -hi, pieces }
    }

    /// `exp(j omega0 t) f(t)`.
    pub fn modulate(&self, omega0: T) -> Self {
        let shift = Complex::new(T::zero(), omega0);
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let knot = T::from_i64_lossy(self.lo + i as i64);
                let phase = (shift * knot).exp();
                p.iter().map(|t| ExpTerm { pole: t.pole + shift, degree: t.degree, coeff: t.coeff * phase }).collect()
            })
            .collect();
        Self { lo: self.lo, pieces }
    }

    /// Exact convolution with the first-order exponential B-spline of pole `a`.
    ///
    /// On output piece `i` with local time `tau`:
    /// `g_i(tau) = int_0^tau f_i(s) e^{a(tau-s)} ds + int_tau^1 f_{i-1}(s) e^{a(1+tau-s)} ds`.
    pub fn convolve_first_order(&self, a: Complex<T>) -> Self {
        let n = self.pieces.len();
        let ea = a.exp();
        let mut pieces = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut out = Vec::new();
            if i < n {
                for term in &self.pieces[i] {
                    let prim = Primitive::new(term, a);
                    // c e^{a tau} (A(tau) - A(0)) with A(0) = 0 by construction.
                    prim.push_terms(&mut out, term.coeff);
                }
            }
            if i >= 1 {
                for term in &self.pieces[i - 1] {
                    let prim = Primitive::new(term, a);
                    let c = term.coeff * ea;
                    // c e^a e^{a tau} (A(1) - A(tau))
                    out.push(ExpTerm { pole: a, degree: 0, coeff: c * prim.at_one() });
                    prim.push_terms(&mut out, -c);
                }
            }
            merge_terms(&mut out);
            pieces.push(out);
        }
        Self { lo: self.lo, pieces }
    }
}

/// `e^{a tau} A(tau)` with `A(tau) = int_0^tau s^j e^{(p - a) s} ds`, as terms.
struct Primitive<T> {
    a: Complex<T>,
    /// (pole, degree, coefficient) with the overall `coeff` factor left out.
    terms: Vec<(Complex<T>, u32, Complex<T>)>,
}

impl<T: Scalar> Primitive<T> {
    fn new(term: &ExpTerm<T>, a: Complex<T>) -> Self {
        let b = term.pole - a;
        let j = term.degree;
        if b.norm() < T::lit(CONFLUENT_TOLERANCE) {
            let inv = T::one() / T::from_u32(j + 1).unwrap();
            return Self { a, terms: vec![(a, j + 1, Complex::new(inv, T::zero()))] };
        }
        // A(tau) = e^{b tau} sum_k (-1)^k j!/(j-k)! tau^{j-k} / b^{k+1} - (-1)^j j! / b^{j+1}
        let jf = factorial::<T>(j);
        let mut terms = Vec::with_capacity(j as usize + 2);
        let mut inv_b_pow = b.inv();
        for k in 0..=j {
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            let c = inv_b_pow * (sign * jf / factorial::<T>(j - k));
            terms.push((term.pole, j - k, c));
            if k < j {
                inv_b_pow = inv_b_pow / b;
            }
        }
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        terms.push((a, 0, -(inv_b_pow * (sign * jf))));
        Self { a, terms }
    }

    fn push_terms(&self, out: &mut Vec<ExpTerm<T>>, scale: Complex<T>) {
        out.extend(self.terms.iter().map(|&(pole, degree, c)| ExpTerm { pole, degree, coeff: c * scale }));
    }

    /// `A(1) = e^{-a} * (e^{a tau} A(tau))|_{tau=1}`.
    fn at_one(&self) -> Complex<T> {
        let at_one: Complex<T> = self.terms.iter().map(|&(p, _, c)| c * p.exp()).fold(czero(), |x, y| x + y);
        at_one * (-self.a).exp()
    }
}

fn merge_terms<T: Scalar>(terms: &mut Vec<ExpTerm<T>>) {
    let mut merged: Vec<ExpTerm<T>> = Vec::with_capacity(terms.len());
    for t in terms.drain(..) {
        match merged.iter_mut().find(|m| m.pole == t.pole && m.degree == t.degree) {
            Some(m) => m.coeff = m.coeff + t.coeff,
            None => merged.push(t),
        }
    }
    merged.retain(|t| t.coeff.re != T::zero() || t.coeff.im != T::zero());
    *terms = merged;
}

/// `beta_alpha`: convolution of first-order exponential B-splines, support `[0, N]`.
pub fn bspline_alpha<T: Scalar>(poles: &[Complex<T>]) -> PiecewiseExpPoly<T> {
    assert!(!poles.is_empty(), "bspline_alpha needs at least one pole");
    let mut spline = PiecewiseExpPoly::first_order(poles[0]);
    for &p in &poles[1..] {
        spline = spline.convolve_first_order(p);
    }
    spline
}

/// `beta_(alpha; gamma) = prod_m (D - gamma_m) beta_alpha`, without the gain.
pub fn bspline_alpha_gamma<T: Scalar>(poles: &[Complex<T>], zeros: &[Complex<T>]) -> PiecewiseExpPoly<T> {
    zeros.iter().fold(bspline_alpha(poles), |s, &g| s.apply_zero(g))
}

/// Generalized B-spline `beta_L = b_M beta_(alpha; gamma)`, support `[0, N]`.
pub fn bspline_l<T: Scalar>(sys: &PoleZeroSystem<T>) -> PiecewiseExpPoly<T> {
    bspline_alpha_gamma(sys.poles(), sys.zeros()).scale(sys.gain())
}

/// Autocorrelation B-spline `conj(beta_L) * beta_L(-.)`, support `[-N, N]`.
///
/// Built from the mirroring and concatenation rules:
/// `|b_M|^2 (-1)^M (prod e^{alpha_n}) beta_(conj alpha, -alpha; conj gamma, -gamma)(t + N)`.
pub fn bspline_autocorr<T: Scalar>(sys: &PoleZeroSystem<T>) -> PiecewiseExpPoly<T> {
    let poles: Vec<_> = sys.poles().iter().map(|p| p.conj()).chain(sys.poles().iter().map(|p| -p)).collect();
    let zeros: Vec<_> = sys.zeros().iter().map(|g| g.conj()).chain(sys.zeros().iter().map(|g| -g)).collect();
    let sign = if sys.num_zeros() % 2 == 0 { T::one() } else { -T::one() };
    let pole_sum = sys.poles().iter().fold(czero::<T>(), |a, &p| a + p);
    let factor = pole_sum.exp() * (sign * sys.gain().norm_sqr());
    bspline_alpha_gamma(&poles, &zeros).scale(factor).shift(-(sys.order() as i64))
}

/// Sampled kernel `beta_L(k/m)` for `k = 0..=m N`, the taps of the
/// piecewise-constant approximation `beta_{L,m}`.
pub fn oversampled_taps<T: Scalar>(beta: &PiecewiseExpPoly<T>, m: usize) -> Vec<Complex<T>> {
    let (lo, hi) = beta.support();
    let count = (hi - lo) as usize * m;
    let mf = T::from_usize_lossy(m);
    (0..=count).map(|k| beta.eval(T::from_i64_lossy(lo) + T::from_usize_lossy(k) / mf)).collect()
}

/// Sup-norm distance between `beta` and its left-sampled piecewise-constant
/// approximation with `m` cells per unit, estimated on `probes` points per cell.
pub fn piecewise_constant_error<T: Scalar>(beta: &PiecewiseExpPoly<T>, m: usize, probes: usize) -> T {
    let (lo, hi) = beta.support();
    let cells = (hi - lo) as usize * m;
    let mf = T::from_usize_lossy(m);
    let pf = T::from_usize_lossy(probes);
    let mut worst = T::zero();
    for k in 0..cells {
        let left = T::from_i64_lossy(lo) + T::from_usize_lossy(k) / mf;
        let held = beta.eval(left);
        for p in 1..=probes {
            let t = left + T::from_usize_lossy(p) / (pf * mf);
            // The last probe is the left limit at the cell's right edge.
            let v = if p == probes { beta.eval_left(t) } else { beta.eval(t) };
            worst = worst.max((v - held).norm());
        }
    }
    worst
}

/// One term of a Green function: `coeff t^degree e^{pole t}` on `t >= 0`
/// (causal) or `-coeff t^degree e^{pole t}` on `t < 0` (anti-causal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTerm<T> {
    pub pole: Complex<T>,
    pub degree: u32,
    pub coeff: Complex<T>,
    pub causal: bool,
}

/// Green function `rho_L` of the system, from its partial-fraction expansion.
///
/// Causal branches use `1_+(0) = 1`; anti-causal ones vanish at `t = 0`, so the
/// function is right-continuous like the B-splines it generates.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenFunction<T> {
    terms: Vec<GreenTerm<T>>,
}

impl<T: Scalar> GreenFunction<T> {
    pub fn new(sys: &PoleZeroSystem<T>) -> Self {
        let groups = group_poles(sys.poles());
        let mut terms = Vec::new();
        for (gi, &(alpha, mult)) in groups.iter().enumerate() {
            // Taylor coefficients of R(z) = b_M Q(z) / prod_{h != g} (z - alpha_h)^{m_h} at alpha.
            let mut series = vec![czero::<T>(); mult];
            series[0] = sys.gain();
            for &gamma in sys.zeros() {
                series = series_mul(&series, &[alpha - gamma, cone()]);
            }
            for (hi, &(beta, mh)) in groups.iter().enumerate() {
                if hi == gi {
                    continue;
                }
                // 1/(d + e) = sum_i (-1)^i e^i / d^{i+1}
                let d = alpha - beta;
                let inv: Vec<_> = (0..mult)
                    .map(|i| {
                        let sign = if i % 2 == 0 { T::one() } else { -T::one() };
                        d.powi(-(i as i32) - 1) * sign
                    })
                    .collect();
                for _ in 0..mh {
                    series = series_mul(&series, &inv);
                }
            }
            // Coefficient of 1/(z - alpha)^k is series[mult - k]; its inverse
            // transform is t^{k-1}/(k-1)! times the first-order Green function.
            let causal = alpha.re <= T::zero();
            for k in 1..=mult {
                let coeff = series[mult - k] / factorial::<T>(k as u32 - 1);
                terms.push(GreenTerm { pole: alpha, degree: k as u32 - 1, coeff, causal });
            }
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[GreenTerm<T>] {
        &self.terms
    }

    pub fn eval(&self, t: T) -> Complex<T> {
        let mut acc = czero();
        for term in &self.terms {
            if term.causal && t >= T::zero() {
                acc = acc + term.coeff * powu(t, term.degree) * (term.pole * t).exp();
            } else if !term.causal && t < T::zero() {
                acc = acc - term.coeff * powu(t, term.degree) * (term.pole * t).exp();
            }
        }
        acc
    }
}

/// `rho_L(t)` for the system.
pub fn green_function_eval<T: Scalar>(sys: &PoleZeroSystem<T>, t: T) -> Complex<T> {
    GreenFunction::new(sys).eval(t)
}

/// Groups confluent poles, returning (representative, multiplicity).
fn group_poles<T: Scalar>(poles: &[Complex<T>]) -> Vec<(Complex<T>, usize)> {
    let tol = T::lit(CONFLUENT_TOLERANCE);
    let mut groups: Vec<(Complex<T>, usize)> = Vec::new();
    for &p in poles {
        match groups.iter_mut().find(|(q, _)| (*q - p).norm() < tol) {
            Some(g) => g.1 += 1,
            None => groups.push((p, 1)),
        }
    }
    groups
}

fn series_mul<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = a.len();
    (0..n)
        .map(|k| (0..=k).filter(|&i| k - i < b.len()).map(|i| a[i] * b[k - i]).fold(czero(), |x, y| x + y))
        .collect()
}
