//! Scalar denoisers, the divergence-free construction and the nonlinear
//! stages used by AMP and OAMP.

use serde::{Deserialize, Serialize};

use crate::error::{OampError, Result};
use crate::model::Prior;
use crate::quadrature::{self, prior_components, QuadratureScheme};

/// Soft-threshold level as a function of the input noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GammaRule {
    /// Constant threshold.
    Fixed(f64),
    /// `gamma = alpha * tau`.
    TauScaled(f64),
}

impl GammaRule {
    pub fn gamma(&self, tau2: f64) -> f64 {
        match *self {
            GammaRule::Fixed(g) => g,
            GammaRule::TauScaled(a) => a * tau2.sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        let v = match *self {
            GammaRule::Fixed(g) | GammaRule::TauScaled(g) => g,
        };
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(OampError::InvalidParameter(format!("threshold parameter {v}")))
        }
    }
}

/// Componentwise estimator `eta_hat(r)` of `x` from `r = x + tau z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Denoiser {
    /// Posterior mean under the given prior.
    Mmse {
        prior: Prior,
    },
    SoftThreshold {
        gamma: GammaRule,
    },
}

impl Denoiser {
    pub fn mmse(prior: Prior) -> Self {
        Denoiser::Mmse { prior }
    }

    pub fn soft(gamma: GammaRule) -> Self {
        Denoiser::SoftThreshold { gamma }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Denoiser::Mmse { prior } => prior.validate(),
            Denoiser::SoftThreshold { gamma } => gamma.validate(),
        }
    }

    /// `(eta_hat(r), eta_hat'(r))`. `tau2` must be positive.
    pub fn eval_with_deriv(&self, r: f64, tau2: f64) -> (f64, f64) {
        match self {
            Denoiser::Mmse { prior } => {
                let (m, v) = posterior_moments(prior, r, tau2);
                (m, v / tau2)
            }
            Denoiser::SoftThreshold { gamma } => {
                let g = gamma.gamma(tau2);
                (soft_threshold(r, g), if r.abs() > g { 1.0 } else { 0.0 })
            }
        }
    }

    pub fn eval(&self, r: f64, tau2: f64) -> f64 {
        self.eval_with_deriv(r, tau2).0
    }

    /// Points where the denoiser is not differentiable.
    pub fn kinks(&self, tau2: f64) -> Vec<f64> {
        match self {
            Denoiser::Mmse { .. } => Vec::new(),
            Denoiser::SoftThreshold { gamma } => {
                let g = gamma.gamma(tau2);
                vec![-g, g]
            }
        }
    }
}

pub fn soft_threshold(r: f64, gamma: f64) -> f64 {
    r.signum() * (r.abs() - gamma).max(0.0)
}

fn sigmoid(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// Posterior mean and variance of `X` given `X + tau Z = r`, unchecked.
pub fn posterior_moments(prior: &Prior, r: f64, tau2: f64) -> (f64, f64) {
    match *prior {
        Prior::Bpsk => {
            let m = (r / tau2).tanh();
            (m, 1.0 - m * m)
        }
        Prior::BernoulliGaussian { rho } => {
            let s2 = 1.0 / rho;
            let tot = s2 + tau2;
            let m1 = s2 / tot * r;
            let v1 = s2 * tau2 / tot;
            let (pi, one_minus_pi) = if rho >= 1.0 {
                (1.0, 0.0)
            } else {
                let l = (rho / (1.0 - rho)).ln() + 0.5 * (tau2 / tot).ln() + 0.5 * r * r * (1.0 / tau2 - 1.0 / tot);
                (sigmoid(l), sigmoid(-l))
            };
            (pi * m1, pi * v1 + pi * one_minus_pi * m1 * m1)
        }
    }
}

fn check_tau2(tau2: f64) -> Result<()> {
    if tau2 > 0.0 && tau2.is_finite() {
        Ok(())
    } else {
        Err(OampError::NonPositiveVariance(tau2))
    }
}

/// `E{X | X + tau Z = r}`.
pub fn posterior_mean(prior: &Prior, r: f64, tau2: f64) -> Result<f64> {
    prior.validate()?;
    check_tau2(tau2)?;
    Ok(posterior_moments(prior, r, tau2).0)
}

/// `var{X | X + tau Z = r}`.
pub fn posterior_var(prior: &Prior, r: f64, tau2: f64) -> Result<f64> {
    prior.validate()?;
    check_tau2(tau2)?;
    Ok(posterior_moments(prior, r, tau2).1)
}

/// Scalar MMSE `E{var(X | R)}` at noise variance `tau2`.
pub fn mmse_b(prior: &Prior, tau2: f64, scheme: &QuadratureScheme) -> Result<f64> {
    prior.validate()?;
    check_tau2(tau2)?;
    let comps = prior_components(prior, tau2);
    quadrature::mean_of(&comps, scheme, &[], |r| posterior_moments(prior, r, tau2).1)
}

/// `C* = tau2 / (tau2 - mmse)`, the scale that makes the divergence-free
/// MMSE denoiser optimal.
pub fn optimal_c(tau2: f64, mmse: f64) -> Result<f64> {
    check_tau2(tau2)?;
    if !(mmse >= 0.0) || mmse >= tau2 {
        return Err(OampError::MmseDomain { mmse, variance: tau2 });
    }
    Ok(tau2 / (tau2 - mmse))
}

/// Scale of a divergence-free denoiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Scale {
    Fixed(f64),
    /// `C*` of an MMSE base denoiser.
    Optimal,
}

/// `eta(r) = C (eta_hat(r) - E{eta_hat'} r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DfDenoiser {
    pub base: Denoiser,
    pub scale: Scale,
}

/// A (possibly non-separable) componentwise nonlinear stage
/// `eta(r) = C (eta_hat(r) - kappa * dbar * r)`, `dbar` the average derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearStage {
    /// `eta_hat` itself.
    Plain {
        base: Denoiser,
    },
    /// `eta_hat(r) - (1 - beta) dbar r`: beta = 1 is plain, beta = 0 is
    /// divergence-free with `C = 1`.
    Beta {
        beta: f64,
        base: Denoiser,
    },
    DivergenceFree(DfDenoiser),
}

/// Result of applying a stage to a vector.
#[derive(Debug, Clone)]
pub struct StageOutput {
    pub out: Vec<f64>,
    /// Average derivative of the base denoiser.
    pub dbar: f64,
    /// Average derivative of the whole stage with `dbar` held fixed.
    pub divergence: f64,
    pub c: f64,
}

impl NonlinearStage {
    pub fn base(&self) -> &Denoiser {
        match self {
            NonlinearStage::Plain { base } | NonlinearStage::Beta { base, .. } => base,
            NonlinearStage::DivergenceFree(df) => &df.base,
        }
    }

    fn kappa(&self) -> f64 {
        match *self {
            NonlinearStage::Plain { .. } => 0.0,
            NonlinearStage::Beta { beta, .. } => 1.0 - beta,
            NonlinearStage::DivergenceFree(_) => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base().validate()?;
        match *self {
            NonlinearStage::Beta { beta, .. } if !beta.is_finite() => {
                Err(OampError::InvalidParameter(format!("beta {beta}")))
            }
            NonlinearStage::DivergenceFree(DfDenoiser { scale: Scale::Fixed(c), .. }) if !c.is_finite() => {
                Err(OampError::InvalidParameter(format!("scale {c}")))
            }
            NonlinearStage::DivergenceFree(DfDenoiser { base, scale: Scale::Optimal })
                if !matches!(base, Denoiser::Mmse { .. }) =>
            {
                Err(OampError::InvalidParameter("optimal scale needs an MMSE base denoiser".into()))
            }
            _ => Ok(()),
        }
    }

    /// `C` given the average base derivative at noise variance `tau2`.
    fn scale(&self, tau2: f64, dbar: f64) -> Result<f64> {
        match *self {
            NonlinearStage::DivergenceFree(DfDenoiser { scale: Scale::Optimal, .. }) => {
                // For the MMSE denoiser E{eta_hat'} tau2 = mmse_B.
                optimal_c(tau2, dbar * tau2)
            }
            NonlinearStage::DivergenceFree(DfDenoiser { scale: Scale::Fixed(c), .. }) => Ok(c),
            _ => Ok(1.0),
        }
    }

    /// Apply to a vector, using the empirical average derivative.
    pub fn apply(&self, r: &[f64], tau2: f64) -> Result<StageOutput> {
        self.validate()?;
        check_tau2(tau2)?;
        if r.is_empty() {
            return Err(OampError::InvalidParameter("empty input".into()));
        }
        let base = self.base();
        let (vals, derivs): (Vec<f64>, Vec<f64>) = r.iter().map(|&ri| base.eval_with_deriv(ri, tau2)).unzip();
        let dbar = derivs.iter().sum::<f64>() / r.len() as f64;
        let kappa = self.kappa();
        let c = self.scale(tau2, dbar)?;
        let k = kappa * dbar;
        let out = vals.iter().zip(r).map(|(v, ri)| c * (v - k * ri)).collect();
        Ok(StageOutput { out, dbar, divergence: c * (1.0 - kappa) * dbar, c })
    }

    /// `(C, E{eta_hat'(R)})` under `R = X + tau Z`, `X ~ prior`.
    pub fn scalar_params(&self, prior: &Prior, tau2: f64, scheme: &QuadratureScheme) -> Result<(f64, f64)> {
        self.validate()?;
        check_tau2(tau2)?;
        let comps = prior_components(prior, tau2);
        let base = self.base();
        let e = quadrature::mean_of(&comps, scheme, &base.kinks(tau2), |r| base.eval_with_deriv(r, tau2).1)?;
        Ok((self.scale(tau2, e)?, e))
    }

    /// `E{(eta(R) - X)^2}` with the model average derivative.
    pub fn mse(&self, prior: &Prior, tau2: f64, scheme: &QuadratureScheme) -> Result<f64> {
        let (c, e) = self.scalar_params(prior, tau2, scheme)?;
        let comps = prior_components(prior, tau2);
        let base = self.base();
        let k = self.kappa() * e;
        quadrature::mse_of(&comps, scheme, &base.kinks(tau2), |r| c * (base.eval(r, tau2) - k * r))
    }
}

/// MSE of a plain denoiser, `E{(eta_hat(R) - X)^2}`.
pub fn denoiser_mse(prior: &Prior, d: &Denoiser, tau2: f64, scheme: &QuadratureScheme) -> Result<f64> {
    NonlinearStage::Plain { base: *d }.mse(prior, tau2, scheme)
}
