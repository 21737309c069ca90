use num_complex::Complex;

use crate::scalar::{czero, Scalar};

/// Finite complex sequence `x[k]` for `k` in `start..start + len`.
///
/// Samples outside the stored range are treated as zero by the filters.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    pub start: i64,
    pub samples: Vec<Complex<T>>,
}

impl<T: Scalar> Signal<T> {
    pub fn new(start: i64, samples: Vec<Complex<T>>) -> Self {
        Self { start, samples }
    }

    /// Real-valued samples starting at index 0.
    pub fn from_real(values: &[T]) -> Self {
        Self { start: 0, samples: values.iter().map(|&v| Complex::new(v, T::zero())).collect() }
    }

    /// Unit impulse at index 0 on `lo..=hi`.
    pub fn impulse(lo: i64, hi: i64) -> Self {
        assert!(lo <= 0 && hi >= 0);
        let mut samples = vec![czero(); (hi - lo + 1) as usize];
        samples[(-lo) as usize] = Complex::new(T::one(), T::zero());
        Self { start: lo, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// One past the last index.
    pub fn end(&self) -> i64 {
        self.start + self.samples.len() as i64
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.start && k < self.end()
    }

    /// `x[k]`, zero outside the stored range.
    pub fn at(&self, k: i64) -> Complex<T> {
        if self.contains(k) {
            self.samples[(k - self.start) as usize]
        } else {
            czero()
        }
    }

    /// Samples on `lo..hi` (zero-filled where not stored).
    pub fn window(&self, lo: i64, hi: i64) -> Signal<T> {
        Signal { start: lo, samples: (lo..hi).map(|k| self.at(k)).collect() }
    }

    /// `y[k] = x[-k]`.
    pub fn reversed(&self) -> Signal<T> {
        let mut samples = self.samples.clone();
        samples.reverse();
        Signal { start: -(self.end() - 1), samples }
    }

    /// Largest modulus, zero for an empty signal.
    pub fn max_abs(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }
}
