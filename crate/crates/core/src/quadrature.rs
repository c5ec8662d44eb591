//! Scalar expectations over `R = X + tau Z` for the supported priors.
//!
//! Every prior is written as a mixture of components under which `R` is
//! Gaussian and `X | R` is Gaussian with mean `slope * R + offset` and
//! variance `cond_var`. Expectations are then one-dimensional Gaussian
//! integrals per component.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{OampError, Result};
use crate::model::Prior;

/// Numerical rule for Gaussian expectations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// `order`-point Gauss-Hermite rule per component.
    GaussHermite { order: usize },
    /// Gauss-Legendre panels of width `panel` (in component standard
    /// deviations) over `mean +- half_width` sd of every component, with the
    /// breakpoints of all components merged and denoiser kinks inserted.
    Composite { order: usize, half_width: f64, panel: f64 },
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        QuadratureScheme::Composite { order: 10, half_width: 14.0, panel: 0.5 }
    }
}

impl QuadratureScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            QuadratureScheme::GaussHermite { order } if order < 3 => {
                Err(OampError::Quadrature(format!("Gauss-Hermite order must be >= 3, got {order}")))
            }
            QuadratureScheme::Composite { order, half_width, panel }
                if order < 2 || !(half_width > 0.0) || !(panel > 0.0) =>
            {
                Err(OampError::Quadrature(format!(
                    "bad composite rule: order {order}, half width {half_width}, panel {panel}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// One mixture component of the joint law of `(X, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub weight: f64,
    /// Mean of `R`.
    pub mean: f64,
    /// Variance of `R`.
    pub var: f64,
    pub slope: f64,
    pub offset: f64,
    pub cond_var: f64,
}

impl Component {
    /// E{X | R = r} under this component.
    pub fn x_mean(&self, r: f64) -> f64 {
        self.slope * r + self.offset
    }
}

/// Mixture representation of `(X, X + tau Z)` for `prior`.
pub fn prior_components(prior: &Prior, tau2: f64) -> Vec<Component> {
    match *prior {
        Prior::Bpsk => [-1.0, 1.0]
            .iter()
            .map(|&x| Component { weight: 0.5, mean: x, var: tau2, slope: 0.0, offset: x, cond_var: 0.0 })
            .collect(),
        Prior::BernoulliGaussian { rho } => {
            let s2 = 1.0 / rho;
            let mut out = Vec::with_capacity(2);
            if rho < 1.0 {
                out.push(Component { weight: 1.0 - rho, mean: 0.0, var: tau2, slope: 0.0, offset: 0.0, cond_var: 0.0 });
            }
            let tot = s2 + tau2;
            out.push(Component {
                weight: rho,
                mean: 0.0,
                var: tot,
                slope: s2 / tot,
                offset: 0.0,
                cond_var: s2 * tau2 / tot,
            });
            out
        }
    }
}

/// Physicists' Gauss-Hermite nodes and weights (weights sum to sqrt(pi)).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `sum_k weight_k E{ f(R, k) }` with `R ~ N(mean_k, var_k)` under component `k`.
///
/// `kinks` are points where `f` is not smooth; the composite rule places
/// panel boundaries on them.
pub fn integrate<F>(comps: &[Component], scheme: &QuadratureScheme, kinks: &[f64], mut f: F) -> Result<f64>
where
    F: FnMut(f64, &Component) -> f64,
{
    scheme.validate()?;
    if comps.iter().any(|c| !(c.var > 0.0) || !c.var.is_finite()) {
        return Err(OampError::Quadrature("component variance must be positive".into()));
    }
    match *scheme {
        QuadratureScheme::GaussHermite { order } => {
            let (x, w) = gauss_hermite(order);
            let norm = PI.sqrt().recip();
            let mut total = 0.0;
            for c in comps {
                let s = (2.0 * c.var).sqrt();
                let acc: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * f(c.mean + s * xi, c)).sum();
                total += c.weight * norm * acc;
            }
            Ok(total)
        }
        QuadratureScheme::Composite { order, half_width, panel } => {
            let (x, w) = gauss_legendre(order);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut cuts = Vec::new();
            for c in comps {
                let s = c.var.sqrt();
                let steps = (half_width / panel).ceil() as i64;
                for k in -steps..=steps {
                    cuts.push(c.mean + s * panel * k as f64);
                }
                lo = lo.min(c.mean - s * panel * steps as f64);
                hi = hi.max(c.mean + s * panel * steps as f64);
            }
            cuts.extend(kinks.iter().copied().filter(|k| *k > lo && *k < hi));
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
            let dens: Vec<(f64, f64)> =
                comps.iter().map(|c| (c.weight / (2.0 * PI * c.var).sqrt(), -0.5 / c.var)).collect();
            let mut total = 0.0;
            for pair in cuts.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                for (xi, wi) in x.iter().zip(&w) {
                    let r = mid + half * xi;
                    for (c, (scale, expo)) in comps.iter().zip(&dens) {
                        let d = r - c.mean;
                        let p = scale * (expo * d * d).exp();
                        if p > 0.0 {
                            total += half * wi * p * f(r, c);
                        }
                    }
                }
            }
            Ok(total)
        }
    }
}

/// `E{(g(R) - X)^2}` for the joint law given by `comps`.
pub fn mse_of<G: FnMut(f64) -> f64>(
    comps: &[Component],
    scheme: &QuadratureScheme,
    kinks: &[f64],
    mut g: G,
) -> Result<f64> {
    integrate(comps, scheme, kinks, |r, c| {
        let e = g(r) - c.x_mean(r);
        e * e + c.cond_var
    })
}

/// `E{g(R)}`.
pub fn mean_of<G: FnMut(f64) -> f64>(
    comps: &[Component],
    scheme: &QuadratureScheme,
    kinks: &[f64],
    mut g: G,
) -> Result<f64> {
    integrate(comps, scheme, kinks, |r, _| g(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_rule_moments() {
        for n in [3, 10, 61, 100] {
            let (x, w) = gauss_hermite(n);
            let norm = PI.sqrt().recip();
            let m = |k: i32| x.iter().zip(&w).map(|(xi, wi)| wi * norm * (2f64.sqrt() * xi).powi(k)).sum::<f64>();
            assert!((m(0) - 1.0).abs() < 1e-13, "n={n}");
            assert!((m(2) - 1.0).abs() < 1e-12, "n={n}");
            assert!((m(4) - 3.0).abs() < 1e-11, "n={n}");
            assert!(x.windows(2).all(|p| p[0] > p[1]));
        }
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(6);
        // exact for degree <= 11
        let int = |k: i32| x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum::<f64>();
        assert!((int(0) - 2.0).abs() < 1e-14);
        assert!((int(10) - 2.0 / 11.0).abs() < 1e-14);
        assert!(int(7).abs() < 1e-14);
    }

    #[test]
    fn components_carry_unit_power() {
        for prior in [Prior::Bpsk, Prior::BernoulliGaussian { rho: 0.3 }, Prior::BernoulliGaussian { rho: 1.0 }] {
            let comps = prior_components(&prior, 0.25);
            let wsum: f64 = comps.iter().map(|c| c.weight).sum();
            assert!((wsum - 1.0).abs() < 1e-15);
            // E{X^2} = E{E[X|R]^2 + var(X|R)}
            for scheme in [QuadratureScheme::default(), QuadratureScheme::GaussHermite { order: 61 }] {
                let p = integrate(&comps, &scheme, &[], |r, c| c.x_mean(r).powi(2) + c.cond_var).unwrap();
                assert!((p - 1.0).abs() < 1e-12, "{prior:?} {scheme:?} {p}");
                // E{R^2} = 1 + tau2
                let r2 = mean_of(&comps, &scheme, &[], |r| r * r).unwrap();
                assert!((r2 - 1.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_estimator_mse_is_tau2() {
        let comps = prior_components(&Prior::BernoulliGaussian { rho: 0.1 }, 1e-6);
        let e = mse_of(&comps, &QuadratureScheme::default(), &[], |r| r).unwrap();
        assert!((e - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_schemes() {
        let comps = prior_components(&Prior::Bpsk, 1.0);
        assert!(integrate(&comps, &QuadratureScheme::GaussHermite { order: 2 }, &[], |_, _| 1.0).is_err());
        let bad = QuadratureScheme::Composite { order: 8, half_width: 0.0, panel: 0.5 };
        assert!(integrate(&comps, &bad, &[], |_, _| 1.0).is_err());
        let zero = prior_components(&Prior::Bpsk, 0.0);
        assert!(integrate(&zero, &QuadratureScheme::default(), &[], |_, _| 1.0).is_err());
    }

    #[test]
    fn kinks_improve_indicator_integrals() {
        // P(|R| > 1) for R ~ N(0, 1) is erfc(1/sqrt 2) = 0.31731050786291415.
        let c = [Component { weight: 1.0, mean: 0.0, var: 1.0, slope: 0.0, offset: 0.0, cond_var: 0.0 }];
        let s = QuadratureScheme::Composite { order: 10, half_width: 14.0, panel: 0.3 };
        let p = mean_of(&c, &s, &[-1.0, 1.0], |r| if r.abs() > 1.0 { 1.0 } else { 0.0 }).unwrap();
        assert!((p - 0.317_310_507_862_914_15).abs() < 1e-13, "{p}");
    }
}
