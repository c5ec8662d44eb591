//! Linear observation model `y = A x + n`, signal priors and SNR conventions.

use nalgebra::{DMatrix, DVectorView};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ensembles::MatrixModel;
use crate::error::{OampError, Result};

/// IID signal law with zero mean and unit power.
///
/// `BernoulliGaussian { rho }` is `rho * N(0, 1/rho) + (1 - rho) * delta_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prior {
    Bpsk,
    BernoulliGaussian { rho: f64 },
}

impl Prior {
    pub fn bernoulli_gaussian(rho: f64) -> Result<Self> {
        let p = Prior::BernoulliGaussian { rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Prior::Bpsk => Ok(()),
            Prior::BernoulliGaussian { rho } => {
                if rho > 0.0 && rho <= 1.0 {
                    Ok(())
                } else {
                    Err(OampError::InvalidParameter(format!("sparsity rho must lie in (0, 1], got {rho}")))
                }
            }
        }
    }

    /// E{X^2}; both priors are unit power.
    pub fn second_moment(&self) -> f64 {
        1.0
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Prior::Bpsk => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Prior::BernoulliGaussian { rho } => {
                let g: f64 = StandardNormal.sample(rng);
                if rng.random::<f64>() < rho {
                    g / rho.sqrt()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Draw `n` IID samples from `prior`.
///
/// Bernoulli-Gaussian draws the support mask first and then the Gaussian
/// values of the active entries, so the number of zeros is exactly binomial.
pub fn sample_signal<R: Rng + ?Sized>(prior: &Prior, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    prior.validate()?;
    if n == 0 {
        return Err(OampError::InvalidParameter("signal length must be >= 1".into()));
    }
    let x = match *prior {
        Prior::Bpsk => (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
        Prior::BernoulliGaussian { rho } => {
            let mask: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < rho).collect();
            let sd = rho.sqrt().recip();
            mask.into_iter()
                .map(|on| {
                    if on {
                        let g: f64 = StandardNormal.sample(rng);
                        g * sd
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    Ok(x)
}

/// A real linear map with its transpose.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64>;
    /// ||A||_F^2 = tr(A^T A).
    fn frobenius_sq(&self) -> f64;
}

impl LinearOperator for DMatrix<f64> {
    fn rows(&self) -> usize {
        self.nrows()
    }
    fn cols(&self) -> usize {
        self.ncols()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = DVectorView::from_slice(x, x.len());
        (self * v).data.into()
    }
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let v = DVectorView::from_slice(y, y.len());
        self.tr_mul(&v).data.into()
    }
    fn frobenius_sq(&self) -> f64 {
        self.norm_squared()
    }
}

/// `y = A x + n` with `n ~ N(0, sigma2 I)`. `sigma2 = 0` gives exactly `A x`.
pub fn make_observation<A, R>(a: &A, x: &[f64], sigma2: f64, rng: &mut R) -> Result<Vec<f64>>
where
    A: LinearOperator + ?Sized,
    R: Rng + ?Sized,
{
    if x.len() != a.cols() {
        return Err(OampError::DimensionMismatch { expected: a.cols(), got: x.len() });
    }
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err(OampError::InvalidParameter(format!("noise variance {sigma2}")));
    }
    let mut y = a.apply(x);
    if sigma2 > 0.0 {
        let sd = sigma2.sqrt();
        for yi in y.iter_mut() {
            let g: f64 = StandardNormal.sample(rng);
            *yi += sd * g;
        }
    }
    Ok(y)
}

/// Noise variance giving `E||Ax||^2 / E||n||^2 = 10^(snr_db/10)`.
///
/// Uses the realized `tr(A^T A)`: for IID `x` with power `E{X^2}`,
/// `E||Ax||^2 = tr(A^T A) E{X^2}`.
pub fn noise_variance_from_snr<A: LinearOperator + ?Sized>(a: &A, prior: &Prior, snr_db: f64) -> f64 {
    noise_variance_from_trace(a.frobenius_sq(), a.rows(), prior, snr_db)
}

pub fn noise_variance_from_trace(trace_ata: f64, m: usize, prior: &Prior, snr_db: f64) -> f64 {
    trace_ata * prior.second_moment() / (m as f64 * 10f64.powf(snr_db / 10.0))
}

/// One instance of the recovery problem.
#[derive(Debug, Clone)]
pub struct LinearSystem<'a> {
    pub a: &'a MatrixModel,
    pub y: Vec<f64>,
    pub sigma2: f64,
    /// Ground truth, only used for diagnostics.
    pub x_true: Option<Vec<f64>>,
}

impl<'a> LinearSystem<'a> {
    pub fn new(a: &'a MatrixModel, y: Vec<f64>, sigma2: f64, x_true: Option<Vec<f64>>) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(OampError::DimensionMismatch { expected: a.rows(), got: y.len() });
        }
        if let Some(x) = &x_true {
            if x.len() != a.cols() {
                return Err(OampError::DimensionMismatch { expected: a.cols(), got: x.len() });
            }
        }
        if !(sigma2 >= 0.0) {
            return Err(OampError::InvalidParameter(format!("noise variance {sigma2}")));
        }
        Ok(Self { a, y, sigma2, x_true })
    }

    /// Sample `x` from `prior` and observe it through `a` at noise `sigma2`.
    pub fn sample<R: Rng + ?Sized>(
        a: &'a MatrixModel,
        prior: &Prior,
        sigma2: f64,
        signal_rng: &mut R,
        noise_rng: &mut R,
    ) -> Result<Self> {
        let x = sample_signal(prior, a.cols(), signal_rng)?;
        let y = make_observation(a, &x, sigma2, noise_rng)?;
        Self::new(a, y, sigma2, Some(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stage};

    #[test]
    fn bpsk_support() {
        let mut rng = stream(1, 0, Stage::Signal);
        let x = sample_signal(&Prior::Bpsk, 4, &mut rng).unwrap();
        assert!(x.iter().all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn invalid_rho_rejected() {
        let mut rng = stream(1, 0, Stage::Signal);
        for rho in [0.0, -0.1, 1.5, f64::NAN] {
            let p = Prior::BernoulliGaussian { rho };
            assert!(sample_signal(&p, 10, &mut rng).is_err());
        }
        assert!(sample_signal(&Prior::Bpsk, 0, &mut rng).is_err());
    }

    #[test]
    fn bg_rho_one_is_unit_gaussian() {
        let mut rng = stream(2, 0, Stage::Signal);
        let x = sample_signal(&Prior::BernoulliGaussian { rho: 1.0 }, 200_000, &mut rng).unwrap();
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.01, "{var}");
        assert!(x.iter().all(|&v| v != 0.0));
    }

    #[test]
    fn bg_zero_fraction_is_binomial() {
        // n = 1e6, rho = 0.2: zeros ~ Bin(n, 0.8), sd = sqrt(n 0.8 0.2)/n = 4e-4.
        // 0.005 is > 12 sd.
        let mut rng = stream(3, 0, Stage::Signal);
        let n = 1_000_000;
        let x = sample_signal(&Prior::BernoulliGaussian { rho: 0.2 }, n, &mut rng).unwrap();
        let zeros = x.iter().filter(|&&v| v == 0.0).count() as f64 / n as f64;
        assert!((zeros - 0.8).abs() < 0.005, "{zeros}");
    }

    #[test]
    fn unit_power_for_all_priors() {
        // Tolerance is 6 sd of the sample power: var(X^2) = E{X^4} - 1,
        // which is 0 for BPSK and 3/rho - 1 for Bernoulli-Gaussian.
        let n = 1_000_000;
        for (k, prior) in [Prior::Bpsk, Prior::BernoulliGaussian { rho: 0.1 }, Prior::BernoulliGaussian { rho: 0.5 }]
            .iter()
            .enumerate()
        {
            let mut rng = stream(11, k as u64, Stage::Signal);
            let x = sample_signal(prior, n, &mut rng).unwrap();
            let mean = x.iter().sum::<f64>() / n as f64;
            let power = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
            let var_x2 = match *prior {
                Prior::Bpsk => 0.0,
                Prior::BernoulliGaussian { rho } => 3.0 / rho - 1.0,
            };
            assert!(mean.abs() < 6.0 / (n as f64).sqrt(), "{prior:?} mean {mean}");
            assert!((power - 1.0).abs() <= 6.0 * (var_x2 / n as f64).sqrt() + 1e-12, "{prior:?} power {power}");
        }
    }

    #[test]
    fn noiseless_identity_observation() {
        let a = DMatrix::<f64>::identity(2, 2);
        let mut rng = stream(0, 0, Stage::Noise);
        let y = make_observation(&a, &[1.0, -1.0], 0.0, &mut rng).unwrap();
        assert_eq!(y, vec![1.0, -1.0]);
    }

    #[test]
    fn zero_matrix_gives_pure_noise() {
        let a = DMatrix::<f64>::zeros(4000, 3);
        let mut rng = stream(5, 0, Stage::Noise);
        let y = make_observation(&a, &[3.0, 1.0, 2.0], 1.0, &mut rng).unwrap();
        let m = y.iter().sum::<f64>() / 4000.0;
        let v = y.iter().map(|t| t * t).sum::<f64>() / 4000.0;
        assert!(m.abs() < 0.06 && (v - 1.0).abs() < 0.07);
    }

    #[test]
    fn observation_noise_level() {
        // mean over 1e4 reps of ||y - Ax||^2 / M with M = 8: each term is
        // sigma2 * chi2_8 / 8, sd of the mean = 0.01 * sqrt(2/8) / 100 = 2.5e-5.
        let a = DMatrix::<f64>::from_fn(8, 5, |i, j| ((i + 2 * j) as f64).sin());
        let x = vec![1.0, -1.0, 0.5, 0.0, 2.0];
        let ax = a.apply(&x);
        let mut rng = stream(9, 0, Stage::Noise);
        let reps = 10_000;
        let mut acc = 0.0;
        for _ in 0..reps {
            let y = make_observation(&a, &x, 0.01, &mut rng).unwrap();
            acc += y.iter().zip(&ax).map(|(u, v)| (u - v).powi(2)).sum::<f64>() / 8.0;
        }
        let mean = acc / reps as f64;
        assert!((mean - 0.01).abs() < 3e-4, "{mean}");
    }

    #[test]
    fn observation_is_deterministic_given_seed() {
        let a = DMatrix::<f64>::from_fn(6, 4, |i, j| (i * 4 + j) as f64 * 0.1);
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y1 = make_observation(&a, &x, 0.3, &mut stream(4, 1, Stage::Noise)).unwrap();
        let y2 = make_observation(&a, &x, 0.3, &mut stream(4, 1, Stage::Noise)).unwrap();
        assert_eq!(y1, y2);
    }

    #[test]
    fn observation_dimension_mismatch() {
        let a = DMatrix::<f64>::zeros(3, 2);
        let mut rng = stream(0, 0, Stage::Noise);
        assert!(matches!(
            make_observation(&a, &[1.0, 2.0, 3.0], 0.0, &mut rng),
            Err(OampError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn snr_to_noise_variance() {
        // tr = N = 100, M = 50, 0 dB -> 2
        assert!((noise_variance_from_trace(100.0, 50, &Prior::Bpsk, 0.0) - 2.0).abs() < 1e-15);
        // partial orthogonal: tr = N, M = 0.35 N, 50 dB -> (N/M) 1e-5
        let n = 1000.0;
        let m = 350;
        let s = noise_variance_from_trace(n, m, &Prior::Bpsk, 50.0);
        assert!((s - n / m as f64 * 1e-5).abs() < 1e-18);
        assert!(noise_variance_from_trace(n, m, &Prior::Bpsk, 400.0) < 1e-30);
    }
}
