//! Linear estimators `W` applied to the residual `y - A s`.
//!
//! All three base estimators share the singular vectors of `A`: with
//! `A = V diag(lambda) U^T`, each is `W = U diag(g) V^T` for per-singular
//! value gains `g`. They are applied as `A^T V diag(g / lambda) V^T`, which
//! costs one pass over `A` plus two `M x M` products once `V` is known.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ensembles::MatrixModel;
use crate::error::{OampError, Result};
use crate::model::LinearOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeKind {
    /// Matched filter `A^T`.
    Mf,
    /// Pseudo-inverse.
    Pinv,
    /// `v2 A^T (v2 A A^T + sigma2 I)^-1`.
    Lmmse,
}

impl LeKind {
    pub fn name(self) -> &'static str {
        match self {
            LeKind::Mf => "MF",
            LeKind::Pinv => "PINV",
            LeKind::Lmmse => "LMMSE",
        }
    }

    /// Gain on a singular value `lambda`; `lambda = 0` gets gain 0.
    pub fn gain(self, lambda: f64, v2: f64, sigma2: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        match self {
            LeKind::Mf => lambda,
            LeKind::Pinv => 1.0 / lambda,
            LeKind::Lmmse => v2 * lambda / (v2 * lambda * lambda + sigma2),
        }
    }
}

/// `W = U diag(gains) V^T`, gains aligned with the model's singular values.
#[derive(Debug, Clone)]
pub struct LinearEstimator {
    pub kind: LeKind,
    pub gains: Vec<f64>,
    /// Scale applied by [`LinearEstimator::decorrelate`]; 1 for a base estimator.
    pub c: f64,
}

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOL: f64 = 1e-10;

fn effective_singulars(model: &MatrixModel) -> Vec<f64> {
    let s = &model.factors().singulars;
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().map(|&v| if v > RANK_TOL * top { v } else { 0.0 }).collect()
}

impl LinearEstimator {
    /// Base estimator `W_hat` for a signal-error variance `v2`.
    pub fn base(kind: LeKind, model: &MatrixModel, v2: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) {
            return Err(OampError::InvalidParameter(format!("noise variance {sigma2}")));
        }
        if kind == LeKind::Lmmse && !(v2 > 0.0 && v2.is_finite()) {
            return Err(OampError::NonPositiveVariance(v2));
        }
        let s = effective_singulars(model);
        let rank = model.rows().min(model.cols());
        if kind == LeKind::Pinv && s[..rank].contains(&0.0) {
            return Err(OampError::Singular("pseudo-inverse of a rank-deficient matrix".into()));
        }
        if kind == LeKind::Lmmse && sigma2 == 0.0 && s[..rank].contains(&0.0) {
            return Err(OampError::Singular("noiseless LMMSE of a rank-deficient matrix".into()));
        }
        let gains = s.iter().map(|&l| kind.gain(l, v2, sigma2)).collect();
        Ok(Self { kind, gains, c: 1.0 })
    }

    /// Rescale so that `tr(W A) = N`.
    pub fn decorrelate(mut self, model: &MatrixModel) -> Result<Self> {
        let s = effective_singulars(model);
        let t: f64 = self.gains.iter().zip(&s).map(|(g, l)| g * l).sum();
        if !(t > 0.0) || !t.is_finite() {
            return Err(OampError::Singular(format!("tr(W_hat A) = {t}")));
        }
        let c = model.cols() as f64 / t;
        self.gains.iter_mut().for_each(|g| *g *= c);
        self.c *= c;
        Ok(self)
    }

    /// `W r` for a length-`M` vector `r`.
    pub fn apply(&self, model: &MatrixModel, r: &[f64]) -> Vec<f64> {
        let f = model.factors();
        let mut p = f.left.project(r);
        for ((pi, g), l) in p.iter_mut().zip(&self.gains).zip(&f.singulars) {
            *pi = if *l > 0.0 { *pi * g / l } else { 0.0 };
        }
        let q = f.left.expand(&p);
        model.apply_transpose(&q)
    }

    /// `(tr(B B^T) / N, tr(W W^T) / N)` with `B = I - W A`.
    pub fn traces(&self, model: &MatrixModel) -> (f64, f64) {
        let s = effective_singulars(model);
        let n = model.cols() as f64;
        let mut bb = 0.0;
        let mut active = 0usize;
        for (g, l) in self.gains.iter().zip(&s) {
            if *l > 0.0 {
                bb += (1.0 - g * l).powi(2);
                active += 1;
            }
        }
        bb += model.cols() as f64 - active as f64;
        let ww: f64 = self.gains.iter().map(|g| g * g).sum();
        (bb / n, ww / n)
    }

    /// `W` as an explicit `N x M` matrix.
    pub fn to_dense(&self, model: &MatrixModel) -> DMatrix<f64> {
        let m = model.rows();
        let mut w = DMatrix::zeros(model.cols(), m);
        let mut e = vec![0.0; m];
        for j in 0..m {
            e[j] = 1.0;
            w.set_column(j, &DVector::from_vec(self.apply(model, &e)));
            e[j] = 0.0;
        }
        w
    }
}

/// Base estimator as an explicit `N x M` matrix, computed with Cholesky
/// solves on `A A^T` (or `A^T A` when `M > N` for the pseudo-inverse).
pub fn dense_base_matrix(kind: LeKind, a: &DMatrix<f64>, v2: f64, sigma2: f64) -> Result<DMatrix<f64>> {
    let (m, n) = a.shape();
    let singular = || OampError::Singular(format!("{} Gram matrix is not positive definite", kind.name()));
    match kind {
        LeKind::Mf => Ok(a.transpose()),
        LeKind::Pinv if m <= n => {
            let ch = Cholesky::new(a * a.transpose()).ok_or_else(singular)?;
            // A^T (A A^T)^-1 = ((A A^T)^-1 A)^T
            Ok(ch.solve(a).transpose())
        }
        LeKind::Pinv => {
            let ch = Cholesky::new(a.tr_mul(a)).ok_or_else(singular)?;
            Ok(ch.solve(&a.transpose()))
        }
        LeKind::Lmmse => {
            if !(v2 > 0.0) {
                return Err(OampError::NonPositiveVariance(v2));
            }
            let mut g = a * a.transpose() * v2;
            for i in 0..m {
                g[(i, i)] += sigma2;
            }
            let ch = Cholesky::new(g).ok_or_else(singular)?;
            Ok(ch.solve(a).transpose() * v2)
        }
    }
}

/// `(W, tr(B B^T)/N, tr(W W^T)/N)` for `W = N / tr(W_hat A) * W_hat`.
pub fn dense_decorrelate(w_hat: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64, f64)> {
    let n = a.ncols();
    let wa = w_hat * a;
    let t = wa.trace();
    if !(t > 0.0) {
        return Err(OampError::Singular(format!("tr(W_hat A) = {t}")));
    }
    let c = n as f64 / t;
    let w = w_hat * c;
    let b = DMatrix::<f64>::identity(n, n) - wa * c;
    let nf = n as f64;
    Ok((w.clone(), b.norm_squared() / nf, w.norm_squared() / nf))
}
