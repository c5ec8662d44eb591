//! Fast orthonormal transforms: DCT-II via a length-N FFT and the
//! Walsh-Hadamard transform.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{OampError, Result};

/// Orthonormal DCT-II of fixed length.
///
/// `forward` computes `C x` with `C[k][n] = a_k cos(pi (2n + 1) k / (2N))`,
/// `a_0 = sqrt(1/N)`, `a_k = sqrt(2/N)`; `inverse` computes `C^T x`.
#[derive(Clone)]
pub struct Dct {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    twiddle: Vec<Complex64>,
}

impl fmt::Debug for Dct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dct").field("n", &self.n).finish()
    }
}

impl Dct {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(OampError::InvalidParameter("transform length must be >= 1".into()));
        }
        let mut planner = FftPlanner::new();
        let twiddle = (0..n).map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2.0 * n as f64))).collect();
        Ok(Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n), twiddle })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn scale(&self, k: usize) -> f64 {
        if k == 0 {
            (1.0 / self.n as f64).sqrt()
        } else {
            (2.0 / self.n as f64).sqrt()
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(x.len(), n);
        // Even samples ascending, odd samples descending.
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, &xi) in x.iter().enumerate() {
            let pos = if i % 2 == 0 { i / 2 } else { n - 1 - i / 2 };
            buf[pos] = Complex64::new(xi, 0.0);
        }
        self.fwd.process(&mut buf);
        (0..n).map(|k| (buf[k] * self.twiddle[k]).re * self.scale(k)).collect()
    }

    pub fn inverse(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(c.len(), n);
        let raw = |k: usize| if k >= n { 0.0 } else { c[k] / self.scale(k) };
        let mut buf: Vec<Complex64> =
            (0..n).map(|k| self.twiddle[k].conj() * Complex64::new(raw(k), -raw(n - k))).collect();
        // raw(n - 0) is index n, defined as zero above.
        self.inv.process(&mut buf);
        let inv_n = 1.0 / n as f64;
        let mut x = vec![0.0; n];
        for (i, xi) in x.iter_mut().enumerate() {
            let pos = if i % 2 == 0 { i / 2 } else { n - 1 - i / 2 };
            *xi = buf[pos].re * inv_n;
        }
        x
    }
}

/// In-place orthonormal Walsh-Hadamard transform (Sylvester ordering).
/// The transform is symmetric and its own inverse.
pub fn fwht(x: &mut [f64]) -> Result<()> {
    let n = x.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(OampError::InvalidParameter(format!("Hadamard length must be a power of two, got {n}")));
    }
    let mut h = 1;
    while h < n {
        for block in x.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
    let s = (n as f64).sqrt().recip();
    x.iter_mut().for_each(|v| *v *= s);
    Ok(())
}

/// Structured orthogonal `U^T` used by partial orthogonal ensembles.
#[derive(Debug, Clone)]
pub enum FastTransform {
    Dct(Dct),
    Hadamard(usize),
}

impl FastTransform {
    pub fn len(&self) -> usize {
        match self {
            FastTransform::Dct(d) => d.len(),
            FastTransform::Hadamard(n) => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `U^T x`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FastTransform::Dct(d) => d.forward(x),
            FastTransform::Hadamard(_) => {
                let mut v = x.to_vec();
                fwht(&mut v).expect("length checked at construction");
                v
            }
        }
    }

    /// `U x`.
    pub fn inverse(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FastTransform::Dct(d) => d.inverse(x),
            FastTransform::Hadamard(_) => self.forward(x),
        }
    }
}
