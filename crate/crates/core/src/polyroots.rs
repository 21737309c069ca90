//! Roots of complex polynomials as eigenvalues of the companion matrix.
//!
//! The companion matrix is already upper Hessenberg, so the eigenvalues come
//! from a single-shift complex QR iteration (Wilkinson shift, Givens
//! rotations, exceptional shifts on stagnation). Each root is then polished
//! with a few Newton steps on the original polynomial.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, Scalar};

const MAX_SWEEPS_PER_ROOT: usize = 60;

/// Evaluates `sum c[k] z^k` (ascending coefficients) and its derivative.
pub fn poly_eval<T: Scalar>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = czero();
    let mut dp = czero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of `sum c[k] z^k`; trailing (highest-degree) zero coefficients are dropped.
pub fn poly_roots<T: Scalar>(coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1].norm() == T::zero() {
        deg -= 1;
    }
    if deg == 0 {
        return Err(Error::InvalidParameter("zero polynomial has no well-defined roots".into()));
    }
    let coeffs = &coeffs[..deg];
    let n = deg - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    let mut h = vec![vec![czero::<T>(); n]; n];
    for j in 0..n {
        h[0][j] = -coeffs[n - 1 - j] / lead;
    }
    for i in 1..n {
        h[i][i - 1] = Complex::new(T::one(), T::zero());
    }
    let mut roots = hessenberg_eigenvalues(h)?;
    for r in roots.iter_mut() {
        *r = polish(coeffs, *r);
    }
    Ok(roots)
}

fn polish<T: Scalar>(coeffs: &[Complex<T>], mut z: Complex<T>) -> Complex<T> {
    let (mut p, _) = poly_eval(coeffs, z);
    for _ in 0..4 {
        let (_, dp) = poly_eval(coeffs, z);
        if dp.norm() == T::zero() {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = poly_eval(coeffs, cand);
        if pc.norm() < p.norm() {
            z = cand;
            p = pc;
        } else {
            break;
        }
    }
    z
}

/// Eigenvalues of a complex upper Hessenberg matrix.
pub fn hessenberg_eigenvalues<T: Scalar>(mut h: Vec<Vec<Complex<T>>>) -> Result<Vec<Complex<T>>> {
    let n = h.len();
    let eps = T::epsilon();
    let mut eig = vec![czero::<T>(); n];
    let mut hi = n as isize - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi >= 0 {
        let hiu = hi as usize;
        // Look for a negligible subdiagonal entry.
        let mut l = hiu;
        while l > 0 {
            let s = h[l - 1][l - 1].norm() + h[l][l].norm();
            let s = if s == T::zero() { T::one() } else { s };
            if h[l][l - 1].norm() <= eps * s {
                h[l][l - 1] = czero();
                break;
            }
            l -= 1;
        }
        if l == hiu {
            eig[hiu] = h[hiu][hiu];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > MAX_SWEEPS_PER_ROOT * n {
            return Err(Error::FactorizationFailure("QR iteration did not converge".into()));
        }

        let shift = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            h[hiu][hiu] + Complex::new(h[hiu][hiu - 1].norm() * T::lit(0.75), T::zero())
        } else {
            wilkinson_shift(h[hiu - 1][hiu - 1], h[hiu - 1][hiu], h[hiu][hiu - 1], h[hiu][hiu])
        };

        for i in l..=hiu {
            h[i][i] = h[i][i] - shift;
        }
        let mut rots = Vec::with_capacity(hiu - l);
        for k in l..hiu {
            let x = h[k][k];
            let y = h[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == T::zero() {
                (Complex::new(T::one(), T::zero()), czero())
            } else {
                (x / r, y / r)
            };
            for j in k..=hiu {
                let a = h[k][j];
                let b = h[k + 1][j];
                h[k][j] = c.conj() * a + s.conj() * b;
                h[k + 1][j] = -s * a + c * b;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hiu);
            for i in l..=top {
                let a = h[i][k];
                let b = h[i][k + 1];
                h[i][k] = a * c + b * s;
                h[i][k + 1] = -a * s.conj() + b * c.conj();
            }
        }
        for i in l..=hiu {
            h[i][i] = h[i][i] + shift;
        }
    }
    Ok(eig)
}

fn wilkinson_shift<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let tr = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}
