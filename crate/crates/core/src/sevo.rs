//! State evolution for AMP and OAMP, the optimal SE maps, the OAMP fixed
//! point and its R-transform characterization.

use serde::{Deserialize, Serialize};

use crate::denoisers::{denoiser_mse, mmse_b, Denoiser, DfDenoiser, NonlinearStage, Scale};
use crate::error::{OampError, Result};
use crate::linest::LeKind;
use crate::model::Prior;
use crate::quadrature::QuadratureScheme;

/// Spectrum of `A^T A` entering the SE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralModel {
    /// Eigenvalues of `A^T A`, length `N`, zeros included.
    Empirical { lambda2: Vec<f64> },
    /// Large-system IID Gaussian (Marchenko-Pastur) with `delta = N/M`.
    IidGaussianAsym { delta: f64 },
    /// `A A^T = (N/M) I` with `delta = N/M`.
    PartialOrthogonalAsym { delta: f64 },
}

impl SpectralModel {
    pub fn empirical(lambda2: Vec<f64>) -> Result<Self> {
        let s = SpectralModel::Empirical { lambda2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralModel::Empirical { lambda2 } => {
                if lambda2.is_empty() || lambda2.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    Err(OampError::InvalidParameter("spectrum must be non-empty and non-negative".into()))
                } else {
                    Ok(())
                }
            }
            SpectralModel::IidGaussianAsym { delta } | SpectralModel::PartialOrthogonalAsym { delta } => {
                if *delta > 0.0 && delta.is_finite() {
                    Ok(())
                } else {
                    Err(OampError::InvalidParameter(format!("delta {delta}")))
                }
            }
        }
    }
}

/// Closed-form linear-stage maps for large systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiKind {
    Mf,
    Pinv,
    Lmmse,
    PartialOrtho,
}

/// Output of an SE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeState {
    /// `v_0^2 .. v_T^2`.
    pub v2: Vec<f64>,
    /// `tau_0^2 .. tau_{T-1}^2`.
    pub tau2: Vec<f64>,
    /// Predicted output MSE per iteration.
    pub mse_out: Vec<f64>,
    pub converged: bool,
}

/// `|sim - se| / sim`.
pub fn se_accuracy(mse_sim: f64, mse_se: f64) -> f64 {
    (mse_sim - mse_se).abs() / mse_sim
}

/// Input-variance rule of the AMP SE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmpSeRule {
    /// `tau^2 = delta v^2 + sigma^2`.
    Iid,
    /// `tau^2 = (delta - 1) v^2 + sigma^2`, the partial orthogonal form.
    PartialOrthogonal,
}

/// AMP state evolution with `v_0^2 = E{X^2}`.
pub fn se_amp(
    prior: &Prior,
    stage: &NonlinearStage,
    rule: AmpSeRule,
    delta: f64,
    sigma2: f64,
    iterations: usize,
    scheme: &QuadratureScheme,
) -> Result<SeState> {
    prior.validate()?;
    if !(delta > 0.0) || !(sigma2 >= 0.0) {
        return Err(OampError::InvalidParameter(format!("delta {delta}, sigma2 {sigma2}")));
    }
    let mut st = SeState { v2: vec![prior.second_moment()], tau2: Vec::new(), mse_out: Vec::new(), converged: false };
    for _ in 0..iterations {
        let v = *st.v2.last().unwrap();
        let tau2 = match rule {
            AmpSeRule::Iid => delta * v + sigma2,
            AmpSeRule::PartialOrthogonal => (delta - 1.0) * v + sigma2,
        };
        let next = if tau2 == 0.0 { 0.0 } else { stage.mse(prior, tau2, scheme)? };
        st.tau2.push(tau2);
        st.mse_out.push(next);
        st.v2.push(next);
    }
    st.converged = converged(&st.v2);
    Ok(st)
}

fn converged(v2: &[f64]) -> bool {
    match v2 {
        [.., a, b] => (a - b).abs() <= 1e-12 * a.abs().max(1e-300) || *b == 0.0,
        _ => false,
    }
}

/// `((m22 / m11^2) - 1) v^2 + (m20 / m11^2) sigma^2` with the means taken
/// over all `N` eigenvalues; `ghat[i]` is the gain on `sqrt(lambda2[i])`.
pub fn phi_empirical(lambda2: &[f64], ghat: &[f64], v2: f64, sigma2: f64) -> Result<f64> {
    if lambda2.len() != ghat.len() {
        return Err(OampError::DimensionMismatch { expected: lambda2.len(), got: ghat.len() });
    }
    let n = lambda2.len() as f64;
    let (mut m22, mut m11, mut m20) = (0.0, 0.0, 0.0);
    for (l2, g) in lambda2.iter().zip(ghat) {
        m22 += g * g * l2;
        m11 += g * l2.sqrt();
        m20 += g * g;
    }
    let (m22, m11, m20) = (m22 / n, m11 / n, m20 / n);
    if m11 == 0.0 {
        return Err(OampError::Singular("mean of g * lambda is zero".into()));
    }
    let m11sq = m11 * m11;
    Ok((m22 / m11sq - 1.0).max(0.0) * v2 + m20 / m11sq * sigma2)
}

/// Gains of a base linear estimator on the spectrum `lambda2`.
pub fn gains(kind: LeKind, lambda2: &[f64], v2: f64, sigma2: f64) -> Vec<f64> {
    lambda2.iter().map(|l2| kind.gain(l2.sqrt(), v2, sigma2)).collect()
}

/// Large-system linear-stage maps.
pub fn phi_closed_form(kind: PhiKind, delta: f64, v2: f64, sigma2: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(OampError::InvalidParameter(format!("delta {delta}")));
    }
    let c = delta - 1.0;
    match kind {
        PhiKind::Mf => Ok(delta * v2 + sigma2),
        PhiKind::Pinv => {
            if c == 0.0 {
                return Err(OampError::InvalidParameter("pseudo-inverse map needs M != N".into()));
            }
            if delta > 1.0 {
                Ok(c * v2 + delta / c * sigma2)
            } else {
                // M > N: W A = I and tau^2 = sigma^2 tr((A^T A)^-1) / N -> sigma^2 M / (M - N).
                Ok(sigma2 / (1.0 - delta))
            }
        }
        PhiKind::Lmmse => {
            let b = sigma2 + c * v2;
            let root = (b * b + 4.0 * sigma2 * v2).sqrt();
            // For b < 0 the root of the quadratic cancels; use the conjugate form.
            Ok(if b >= 0.0 { (b + root) / 2.0 } else { 2.0 * sigma2 * v2 / (root - b) })
        }
        PhiKind::PartialOrtho => Ok(c * v2 + sigma2),
    }
}

/// `(1/N) sum_i sigma^2 v^2 / (v^2 lambda_i^2 + sigma^2)`.
pub fn mmse_a(spec: &SpectralModel, v2: f64, sigma2: f64) -> Result<f64> {
    spec.validate()?;
    if !(v2 > 0.0) || !(sigma2 >= 0.0) {
        return Err(OampError::InvalidParameter(format!("v2 {v2}, sigma2 {sigma2}")));
    }
    match spec {
        SpectralModel::Empirical { lambda2 } => {
            let s: f64 = lambda2.iter().map(|l2| if *l2 == 0.0 { v2 } else { sigma2 * v2 / (v2 * l2 + sigma2) }).sum();
            Ok(s / lambda2.len() as f64)
        }
        SpectralModel::IidGaussianAsym { delta } => {
            // Phi* is the LMMSE map; invert Phi* = (1/mmse_A - 1/v^2)^-1.
            let phi = phi_closed_form(PhiKind::Lmmse, *delta, v2, sigma2)?;
            Ok(if phi == 0.0 { 0.0 } else { 1.0 / (1.0 / phi + 1.0 / v2) })
        }
        SpectralModel::PartialOrthogonalAsym { delta } => {
            let frac = 1.0 / delta;
            Ok(frac * sigma2 * v2 / (delta * v2 + sigma2) + (1.0 - frac).max(0.0) * v2)
        }
    }
}

/// `(1/mmse - 1/variance)^-1`, zero when the MMSE vanishes.
fn harmonic_extrinsic(mmse: f64, variance: f64) -> Result<f64> {
    if mmse == 0.0 {
        return Ok(0.0);
    }
    if !(mmse > 0.0) || mmse >= variance {
        return Err(OampError::MmseDomain { mmse, variance });
    }
    Ok(1.0 / (1.0 / mmse - 1.0 / variance))
}

/// `v^2 - mmse_A(v^2)`, summed directly: it is ~`v^4 lambda^2 / sigma^2`
/// for small `v^2` and cancels badly as a difference.
fn mmse_a_gap(spec: &SpectralModel, v2: f64, sigma2: f64) -> Result<f64> {
    Ok(match spec {
        SpectralModel::Empirical { lambda2 } => {
            let s: f64 = lambda2.iter().filter(|l2| **l2 > 0.0).map(|l2| v2 * v2 * l2 / (v2 * l2 + sigma2)).sum();
            s / lambda2.len() as f64
        }
        SpectralModel::IidGaussianAsym { delta } => {
            let phi = phi_closed_form(PhiKind::Lmmse, *delta, v2, sigma2)?;
            v2 * v2 / (phi + v2)
        }
        SpectralModel::PartialOrthogonalAsym { delta } => v2 * v2 / (delta * v2 + sigma2),
    })
}

/// Optimal linear-stage map `Phi*(v^2)`.
pub fn phi_star(spec: &SpectralModel, v2: f64, sigma2: f64) -> Result<f64> {
    if v2 == 0.0 {
        return Ok(0.0);
    }
    if let SpectralModel::IidGaussianAsym { delta } = spec {
        // Phi* is the LMMSE map on this spectrum.
        return phi_closed_form(PhiKind::Lmmse, *delta, v2, sigma2);
    }
    let mmse = mmse_a(spec, v2, sigma2)?;
    if mmse == 0.0 {
        return Ok(0.0);
    }
    let gap = mmse_a_gap(spec, v2, sigma2)?;
    if !(gap > 0.0) {
        return Err(OampError::MmseDomain { mmse, variance: v2 });
    }
    // (1/mmse - 1/v^2)^-1
    Ok(mmse * v2 / gap)
}

/// Optimal nonlinear-stage map `Psi*(tau^2)`.
pub fn psi_star(prior: &Prior, tau2: f64, scheme: &QuadratureScheme) -> Result<f64> {
    if tau2 == 0.0 {
        return Ok(0.0);
    }
    harmonic_extrinsic(mmse_b(prior, tau2, scheme)?, tau2)
}

/// Optimal output MSE `mmse_B(tau^2)`.
pub fn psi_out_star(prior: &Prior, tau2: f64, scheme: &QuadratureScheme) -> Result<f64> {
    if tau2 == 0.0 {
        return Ok(0.0);
    }
    mmse_b(prior, tau2, scheme)
}

/// Linear-stage map of an OAMP SE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LinearMap {
    Optimal,
    /// Decorrelated estimator of this kind; closed forms on asymptotic
    /// spectra, the empirical formula otherwise.
    Estimator(LeKind),
}

/// Nonlinear-stage and output maps of an OAMP SE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearMap {
    /// `Psi*` and `Psi_out* = mmse_B`.
    Optimal,
    DivergenceFree {
        df: DfDenoiser,
        out: Denoiser,
    },
}

impl NonlinearMap {
    /// Divergence-free posterior mean with optimal scale and MMSE output.
    pub fn df_mmse(prior: Prior) -> Self {
        NonlinearMap::DivergenceFree {
            df: DfDenoiser { base: Denoiser::mmse(prior), scale: Scale::Optimal },
            out: Denoiser::mmse(prior),
        }
    }
}

/// Linear-stage map `Phi(v^2)` for `map` on `spec`.
pub fn phi(spec: &SpectralModel, map: &LinearMap, v2: f64, sigma2: f64) -> Result<f64> {
    match (map, spec) {
        (LinearMap::Optimal, _) => phi_star(spec, v2, sigma2),
        (LinearMap::Estimator(kind), SpectralModel::Empirical { lambda2 }) => {
            phi_empirical(lambda2, &gains(*kind, lambda2, v2, sigma2), v2, sigma2)
        }
        (LinearMap::Estimator(kind), SpectralModel::IidGaussianAsym { delta }) => {
            let k = match kind {
                LeKind::Mf => PhiKind::Mf,
                LeKind::Pinv => PhiKind::Pinv,
                LeKind::Lmmse => PhiKind::Lmmse,
            };
            phi_closed_form(k, *delta, v2, sigma2)
        }
        (LinearMap::Estimator(_), SpectralModel::PartialOrthogonalAsym { delta }) => {
            phi_closed_form(PhiKind::PartialOrtho, *delta, v2, sigma2)
        }
    }
}

/// `(Psi(tau^2), Psi_out(tau^2))` for `map`.
pub fn psi(prior: &Prior, map: &NonlinearMap, tau2: f64, scheme: &QuadratureScheme) -> Result<(f64, f64)> {
    match map {
        NonlinearMap::Optimal => Ok((psi_star(prior, tau2, scheme)?, psi_out_star(prior, tau2, scheme)?)),
        NonlinearMap::DivergenceFree { df, out } => {
            if tau2 == 0.0 {
                return Ok((0.0, 0.0));
            }
            let stage = NonlinearStage::DivergenceFree(*df);
            Ok((stage.mse(prior, tau2, scheme)?, denoiser_mse(prior, out, tau2, scheme)?))
        }
    }
}

/// OAMP state evolution with `v_0^2 = E{X^2}`.
pub fn run_se_oamp(
    spec: &SpectralModel,
    prior: &Prior,
    sigma2: f64,
    linear: &LinearMap,
    nonlinear: &NonlinearMap,
    iterations: usize,
    scheme: &QuadratureScheme,
) -> Result<SeState> {
    spec.validate()?;
    prior.validate()?;
    let mut st = SeState { v2: vec![prior.second_moment()], tau2: Vec::new(), mse_out: Vec::new(), converged: false };
    for _ in 0..iterations {
        let v = *st.v2.last().unwrap();
        let tau2 = if v == 0.0 { sigma2_floor(spec, linear, sigma2)? } else { phi(spec, linear, v, sigma2)? };
        let (next, out) = psi(prior, nonlinear, tau2, scheme)?;
        st.tau2.push(tau2);
        st.mse_out.push(out);
        st.v2.push(next);
    }
    st.converged = converged(&st.v2);
    Ok(st)
}

// Phi at v^2 = 0, where only the noise term remains. Evaluated as the limit
// v^2 -> 0 since the LMMSE gains vanish at exactly zero.
fn sigma2_floor(spec: &SpectralModel, linear: &LinearMap, sigma2: f64) -> Result<f64> {
    if sigma2 == 0.0 {
        return Ok(0.0);
    }
    phi(spec, linear, 1e-20 * sigma2, sigma2)
}

/// Limit of the optimal SE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub v2: f64,
    pub tau2: f64,
    pub iterations: usize,
}

/// Iterate `v^2 <- Psi*(Phi*(v^2))` from `v^2 = E{X^2}` until the relative
/// change in `v^2` drops below `tol`.
pub fn fixed_point(
    spec: &SpectralModel,
    prior: &Prior,
    sigma2: f64,
    tol: f64,
    maxiter: usize,
    scheme: &QuadratureScheme,
) -> Result<FixedPoint> {
    let mut v = prior.second_moment();
    for it in 1..=maxiter {
        let tau2 = phi_star(spec, v, sigma2)?;
        let next = psi_star(prior, tau2, scheme)?;
        if next == 0.0 || (next - v).abs() <= tol * v {
            let tau2 = phi_star(spec, next, sigma2)?;
            return Ok(FixedPoint { v2: next, tau2, iterations: it });
        }
        v = next;
    }
    Err(OampError::NoConvergence(maxiter))
}

/// `gamma * eta(gamma)` for the eta-transform of `A^T A`.
pub fn gamma_eta(spec: &SpectralModel, gamma: f64) -> Result<f64> {
    mmse_a(spec, gamma, 1.0)
}

/// R-transform of the `A^T A` spectrum at `z < 0`, through the relation
/// `eta(gamma) = 1 / (1 + gamma R(-gamma eta(gamma)))`.
pub fn r_transform(spec: &SpectralModel, z: f64) -> Result<f64> {
    if !(z < 0.0) {
        return Err(OampError::Bracket(format!("R-transform evaluated only for z < 0, got {z}")));
    }
    let target = -z;
    let f = |g: f64| gamma_eta(spec, g).map(|v| v - target);
    let (mut lo, mut hi) = (1e-150f64.ln(), 1e150f64.ln());
    if f(lo.exp())? > 0.0 || f(hi.exp())? < 0.0 {
        return Err(OampError::Bracket(format!("z = {z} outside the transform range")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid.exp())? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let gamma = (0.5 * (lo + hi)).exp();
    let ge = gamma_eta(spec, gamma)?;
    // 1/(gamma eta) - 1/gamma without cancellation.
    Ok(mmse_a_gap(spec, gamma, 1.0)? / (ge * gamma))
}

/// `|1/tau^2 - R(z)/sigma^2| tau^2` at `z = -mmse_B(tau^2)/sigma^2`; zero at
/// the fixed point of the optimal SE.
pub fn r_transform_residual(
    spec: &SpectralModel,
    fp: &FixedPoint,
    prior: &Prior,
    sigma2: f64,
    scheme: &QuadratureScheme,
) -> Result<f64> {
    if !(sigma2 > 0.0) || !(fp.tau2 > 0.0) {
        return Err(OampError::InvalidParameter(format!("sigma2 {sigma2}, tau2 {}", fp.tau2)));
    }
    let z = -mmse_b(prior, fp.tau2, scheme)? / sigma2;
    let r = r_transform(spec, z)?;
    Ok((1.0 / fp.tau2 - r / sigma2).abs() * fp.tau2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_metric() {
        assert_eq!(se_accuracy(0.3, 0.3), 0.0);
        assert!((se_accuracy(0.02, 0.01) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_forms() {
        assert!((phi_closed_form(PhiKind::Mf, 2.0, 1.0, 0.01).unwrap() - 2.01).abs() < 1e-15);
        assert!((phi_closed_form(PhiKind::Pinv, 2.0, 0.3, 0.01).unwrap() - (0.3 + 0.02)).abs() < 1e-15);
        assert!((phi_closed_form(PhiKind::Lmmse, 2.0, 1e-14, 0.01).unwrap() - 0.01).abs() < 1e-12);
        assert!(phi_closed_form(PhiKind::Pinv, 1.0, 0.3, 0.01).is_err());
        assert!((phi_closed_form(PhiKind::PartialOrtho, 3.0, 0.5, 0.1).unwrap() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn empirical_partial_orthogonal() {
        let (n, m) = (10, 4);
        let mut l2 = vec![n as f64 / m as f64; m];
        l2.resize(n, 0.0);
        let g: Vec<f64> = l2.iter().map(|v| v.sqrt()).collect();
        let t = phi_empirical(&l2, &g, 0.2, 0.01).unwrap();
        assert!((t - (1.5 * 0.2 + 0.01)).abs() < 1e-14);
        assert!(phi_empirical(&l2, &vec![0.0; n], 0.2, 0.01).is_err());
    }

    #[test]
    fn empirical_square_pinv() {
        let l2 = vec![4.0, 1.0, 0.25];
        let g: Vec<f64> = l2.iter().map(|v: &f64| 1.0 / v.sqrt()).collect();
        let t = phi_empirical(&l2, &g, 0.7, 0.1).unwrap();
        assert!((t - 0.1 * (0.25 + 1.0 + 4.0) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lmmse_gains_reach_phi_star() {
        let l2: Vec<f64> = (0..50).map(|i| if i < 30 { 0.1 + i as f64 * 0.2 } else { 0.0 }).collect();
        let spec = SpectralModel::Empirical { lambda2: l2.clone() };
        for (v2, s2) in [(1.0, 0.01), (0.01, 1e-4), (1e-4, 1e-5)] {
            let e = phi_empirical(&l2, &gains(LeKind::Lmmse, &l2, v2, s2), v2, s2).unwrap();
            let o = phi_star(&spec, v2, s2).unwrap();
            assert!((e - o).abs() < 1e-12 * o, "{e} {o}");
        }
    }

    #[test]
    fn mmse_a_cases() {
        let one = SpectralModel::Empirical { lambda2: vec![1.0; 5] };
        assert!((mmse_a(&one, 0.5, 0.1).unwrap() - 0.05 / 0.6).abs() < 1e-15);
        let (n, m) = (10, 4);
        let mut l2 = vec![2.5; m];
        l2.resize(n, 0.0);
        let emp = SpectralModel::Empirical { lambda2: l2 };
        let asym = SpectralModel::PartialOrthogonalAsym { delta: 2.5 };
        let a = mmse_a(&emp, 0.3, 0.02).unwrap();
        assert!((a - mmse_a(&asym, 0.3, 0.02).unwrap()).abs() < 1e-15);
        assert!((a - (0.4 * 0.02 * 0.3 / (0.75 + 0.02) + 0.6 * 0.3)).abs() < 1e-15);
    }

    #[test]
    fn harmonic_arithmetic() {
        assert!((harmonic_extrinsic(0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(harmonic_extrinsic(1.0, 1.0).is_err());
        assert_eq!(harmonic_extrinsic(0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn identity_noiseless_se() {
        let spec = SpectralModel::Empirical { lambda2: vec![1.0; 8] };
        let st = run_se_oamp(
            &spec,
            &Prior::Bpsk,
            0.0,
            &LinearMap::Optimal,
            &NonlinearMap::Optimal,
            3,
            &QuadratureScheme::default(),
        )
        .unwrap();
        assert_eq!(st.tau2[0], 0.0);
        assert_eq!(st.v2[1], 0.0);
    }

    #[test]
    fn amp_se_first_step() {
        let st = se_amp(
            &Prior::Bpsk,
            &NonlinearStage::Plain { base: Denoiser::mmse(Prior::Bpsk) },
            AmpSeRule::Iid,
            1.0,
            0.01,
            1,
            &QuadratureScheme::default(),
        )
        .unwrap();
        assert!((st.tau2[0] - 1.01).abs() < 1e-15);
    }

    #[test]
    fn point_mass_r_transform_is_constant() {
        // lambda^2 == a: eta(g) = 1/(1 + g a), so R(z) = a for all z.
        for a in [1.0, 3.0] {
            let spec = SpectralModel::Empirical { lambda2: vec![a; 4] };
            for z in [-0.01, -0.2, -0.3] {
                let r = r_transform(&spec, z).unwrap();
                assert!((r - a).abs() < 1e-9, "{r}");
            }
        }
        let spec = SpectralModel::Empirical { lambda2: vec![1.0; 4] };
        // gamma eta(gamma) < 1 for a unit point mass.
        assert!(matches!(r_transform(&spec, -2.0), Err(OampError::Bracket(_))));
    }

    #[test]
    fn marchenko_pastur_r_transform() {
        // R(z) = 1 / (1 - delta z) for IID N(0, 1/M) entries.
        let spec = SpectralModel::IidGaussianAsym { delta: 2.0 };
        for z in [-0.05, -0.5, -3.0] {
            let r = r_transform(&spec, z).unwrap();
            assert!((r - 1.0 / (1.0 - 2.0 * z)).abs() < 1e-9, "{z}: {r}");
        }
    }
}
