//! AMP and OAMP iterations with per-iteration diagnostics.

use serde::{Deserialize, Serialize};

use crate::denoisers::{Denoiser, DfDenoiser, NonlinearStage};
use crate::ensembles::MatrixModel;
use crate::error::{OampError, Result};
use crate::linest::{LeKind, LinearEstimator};
use crate::model::{LinearOperator, LinearSystem};

/// Diagnostics of one iteration. Fields that need the true signal are NaN
/// when it is not available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    /// `||eta_out(r) - x||^2 / N`; for AMP the output is `s^{t+1}`.
    pub mse_out: f64,
    /// `||s - x||^2 / N`.
    pub v2_true: f64,
    /// `||r - x||^2 / N`.
    pub tau2_true: f64,
    pub v2_hat: f64,
    pub tau2_hat: f64,
    /// Average derivative of the base denoiser.
    pub dbar: f64,
    /// `h^T q / N` with `h = r - x`, `q = s - x`.
    pub orth_hq: f64,
    /// `h^T x / N`.
    pub orth_hx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    /// All requested iterations ran.
    Completed,
    /// Stopped early because `v2_hat` stopped changing.
    Converged { iteration: usize },
    /// A non-finite iterate appeared at this iteration; its record is dropped.
    Diverged { iteration: usize },
    /// A stage could not be built, e.g. the optimal scale was undefined.
    Failed { iteration: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<IterRecord>,
    pub status: RunStatus,
    /// Output estimate of the last recorded iteration.
    pub estimate: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn mse_out(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mse_out).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub iterations: usize,
    /// Stop once `|v2_hat_t - v2_hat_{t-1}| < 1e-12`.
    pub early_exit: bool,
    /// Floor `epsilon` on the variance estimates.
    pub v2_floor: f64,
    /// Initial `v2_hat` of OAMP, `E{X^2}`.
    pub v2_init: f64,
    /// Include the Onsager correction in AMP.
    pub onsager: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { iterations: 50, early_exit: true, v2_floor: 1e-9, v2_init: 1.0, onsager: true }
    }
}

const EARLY_EXIT_TOL: f64 = 1e-12;

/// `(||y - A s||^2 - M sigma^2) / tr(A^T A)`, floored at `floor`.
pub fn estimate_v2<A: LinearOperator + ?Sized>(y: &[f64], a: &A, s: &[f64], sigma2: f64, floor: f64) -> f64 {
    let resid: Vec<f64> = a.apply(s).iter().zip(y).map(|(u, v)| v - u).collect();
    v2_from_residual(&resid, sigma2, a.frobenius_sq(), floor)
}

fn v2_from_residual(resid: &[f64], sigma2: f64, tr_aa: f64, floor: f64) -> f64 {
    let m = resid.len() as f64;
    ((norm2(resid) - m * sigma2) / tr_aa).max(floor)
}

/// `(tr(B B^T)/N) v2_hat + (tr(W W^T)/N) sigma2` for a decorrelated estimator.
pub fn estimate_tau2(le: &LinearEstimator, model: &MatrixModel, v2_hat: f64, sigma2: f64) -> f64 {
    let (bb, ww) = le.traces(model);
    bb * v2_hat + ww * sigma2
}

/// Normalized norms and inner products of `h = r - x` and `q = s - x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orthogonality {
    pub h_norm2: f64,
    pub q_norm2: f64,
    pub hq: f64,
    pub hx: f64,
}

pub fn error_diagnostics(r: &[f64], s: &[f64], x: &[f64]) -> Orthogonality {
    let n = x.len() as f64;
    let mut o = Orthogonality { h_norm2: 0.0, q_norm2: 0.0, hq: 0.0, hx: 0.0 };
    for ((ri, si), xi) in r.iter().zip(s).zip(x) {
        let h = ri - xi;
        let q = si - xi;
        o.h_norm2 += h * h;
        o.q_norm2 += q * q;
        o.hq += h * q;
        o.hx += h * xi;
    }
    o.h_norm2 /= n;
    o.q_norm2 /= n;
    o.hq /= n;
    o.hx /= n;
    o
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum()
}

fn mse(a: &[f64], x: Option<&Vec<f64>>) -> f64 {
    match x {
        Some(x) => a.iter().zip(x).map(|(u, v)| (u - v).powi(2)).sum::<f64>() / x.len() as f64,
        None => f64::NAN,
    }
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|t| t.is_finite())
}

fn record(
    sys: &LinearSystem<'_>,
    r: &[f64],
    s: &[f64],
    out: &[f64],
    v2_hat: f64,
    tau2_hat: f64,
    dbar: f64,
) -> IterRecord {
    let x = sys.x_true.as_ref();
    let (hq, hx) = match x {
        Some(x) => {
            let o = error_diagnostics(r, s, x);
            (o.hq, o.hx)
        }
        None => (f64::NAN, f64::NAN),
    };
    IterRecord {
        mse_out: mse(out, x),
        v2_true: mse(s, x),
        tau2_true: mse(r, x),
        v2_hat,
        tau2_hat,
        dbar,
        orth_hq: hq,
        orth_hx: hx,
    }
}

fn validate_opts(opts: &SolverOptions) -> Result<()> {
    if opts.iterations == 0 || !(opts.v2_floor > 0.0) || !(opts.v2_init > 0.0) {
        return Err(OampError::InvalidParameter(format!("solver options {opts:?}")));
    }
    Ok(())
}

/// AMP with `s^0 = 0`:
/// `z^t = y - A s^t + (N/M) div_{t-1} z^{t-1}`, `r^t = s^t + A^T z^t`,
/// `s^{t+1} = eta_t(r^t)`, with `tau_t^2 = ||z^t||^2 / M`.
///
/// `A^T z^{t-1} = r^{t-1} - s^{t-1}`, so this is the usual Onsager-corrected
/// recursion written with one transpose product per iteration.
pub fn run_amp(sys: &LinearSystem<'_>, stage: &NonlinearStage, opts: &SolverOptions) -> Result<Trajectory> {
    validate_opts(opts)?;
    stage.validate()?;
    let a = sys.a;
    let (m, n) = (a.rows(), a.cols());
    let delta = n as f64 / m as f64;
    let tr_aa = a.frobenius_sq();
    let mut s = vec![0.0; n];
    let mut z_prev = vec![0.0; m];
    let mut div_prev = 0.0;
    let mut records = Vec::with_capacity(opts.iterations);
    let mut status = RunStatus::Completed;
    let mut estimate = s.clone();
    let mut last_v2: Option<f64> = None;
    for t in 0..opts.iterations {
        let resid: Vec<f64> = a.apply(&s).iter().zip(&sys.y).map(|(u, v)| v - u).collect();
        let v2_hat = v2_from_residual(&resid, sys.sigma2, tr_aa, opts.v2_floor);
        let onsager = if opts.onsager { delta * div_prev } else { 0.0 };
        let z: Vec<f64> = resid.iter().zip(&z_prev).map(|(u, p)| u + onsager * p).collect();
        let r: Vec<f64> = a.apply_transpose(&z).iter().zip(&s).map(|(u, v)| u + v).collect();
        let tau2_hat = (norm2(&z) / m as f64).max(opts.v2_floor);
        if !all_finite(&r) || !tau2_hat.is_finite() {
            status = RunStatus::Diverged { iteration: t };
            break;
        }
        let o = match stage.apply(&r, tau2_hat) {
            Ok(o) => o,
            Err(e) => {
                status = RunStatus::Failed { iteration: t, reason: e.to_string() };
                break;
            }
        };
        if !all_finite(&o.out) {
            status = RunStatus::Diverged { iteration: t };
            break;
        }
        records.push(record(sys, &r, &s, &o.out, v2_hat, tau2_hat, o.dbar));
        s = o.out;
        estimate.clone_from(&s);
        div_prev = o.divergence;
        z_prev = z;
        if opts.early_exit && last_v2.is_some_and(|p| (p - v2_hat).abs() < EARLY_EXIT_TOL) {
            status = RunStatus::Converged { iteration: t };
            break;
        }
        last_v2 = Some(v2_hat);
    }
    Ok(Trajectory { records, status, estimate })
}

/// OAMP with `s^0 = 0`: `r^t = s^t + W_t (y - A s^t)` with the decorrelated
/// estimator `W_t` built at `v2_hat_t`, `s^{t+1} = eta_t(r^t)` for the
/// divergence-free `df`, and the output `out(r^t)` recorded every iteration.
pub fn run_oamp(
    sys: &LinearSystem<'_>,
    le_kind: LeKind,
    df: &DfDenoiser,
    out: &Denoiser,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    validate_opts(opts)?;
    let stage = NonlinearStage::DivergenceFree(*df);
    stage.validate()?;
    out.validate()?;
    let a = sys.a;
    let n = a.cols();
    let tr_aa = a.frobenius_sq();
    let mut s = vec![0.0; n];
    let mut records = Vec::with_capacity(opts.iterations);
    let mut status = RunStatus::Completed;
    let mut estimate = vec![0.0; n];
    let mut last_v2: Option<f64> = None;
    for t in 0..opts.iterations {
        let resid: Vec<f64> = a.apply(&s).iter().zip(&sys.y).map(|(u, v)| v - u).collect();
        let v2_hat = if t == 0 { opts.v2_init } else { v2_from_residual(&resid, sys.sigma2, tr_aa, opts.v2_floor) };
        let le = match LinearEstimator::base(le_kind, a, v2_hat, sys.sigma2).and_then(|b| b.decorrelate(a)) {
            Ok(le) => le,
            Err(e) => {
                status = RunStatus::Failed { iteration: t, reason: e.to_string() };
                break;
            }
        };
        let r: Vec<f64> = le.apply(a, &resid).iter().zip(&s).map(|(u, v)| u + v).collect();
        let tau2_hat = estimate_tau2(&le, a, v2_hat, sys.sigma2).max(opts.v2_floor);
        if !all_finite(&r) || !tau2_hat.is_finite() {
            status = RunStatus::Diverged { iteration: t };
            break;
        }
        let output: Vec<f64> = r.iter().map(|&ri| out.eval(ri, tau2_hat)).collect();
        let next = stage.apply(&r, tau2_hat);
        let dbar = next.as_ref().map(|o| o.dbar).unwrap_or(f64::NAN);
        records.push(record(sys, &r, &s, &output, v2_hat, tau2_hat, dbar));
        estimate = output;
        match next {
            Ok(o) if all_finite(&o.out) => s = o.out,
            Ok(_) => {
                status = RunStatus::Diverged { iteration: t };
                break;
            }
            Err(e) => {
                status = RunStatus::Failed { iteration: t, reason: e.to_string() };
                break;
            }
        }
        if opts.early_exit && last_v2.is_some_and(|p| (p - v2_hat).abs() < EARLY_EXIT_TOL) {
            status = RunStatus::Converged { iteration: t };
            break;
        }
        last_v2 = Some(v2_hat);
    }
    Ok(Trajectory { records, status, estimate })
}
