//! Empirical phase transition: success rates over a sparsity-undersampling grid.

use oamp_core::denoisers::{Denoiser, DfDenoiser, NonlinearStage, Scale};
use oamp_core::ensembles::{sample_matrix, EnsembleSpec};
use oamp_core::exec;
use oamp_core::model::{LinearSystem, Prior};
use oamp_core::rng::{stream, stream_seed, Stage};
use oamp_core::solvers::{run_amp, run_oamp, SolverOptions, Trajectory};
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, PtcConfig};
use crate::emit::fmt_f64;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtcPoint {
    pub m_ratio: f64,
    pub k_ratio: f64,
    pub m: usize,
    pub rho: f64,
    /// Success fraction per algorithm, in configuration order.
    pub success: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtcResult {
    pub name: String,
    pub algorithms: Vec<Algorithm>,
    pub points: Vec<PtcPoint>,
}

impl PtcResult {
    pub fn success(&self, point: usize, alg: Algorithm) -> Option<f64> {
        let k = self.algorithms.iter().position(|a| *a == alg)?;
        Some(self.points[point].success[k])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("experiment,m_ratio,k_ratio,m,rho,algorithm,success_fraction\n");
        for p in &self.points {
            for (a, f) in self.algorithms.iter().zip(&p.success) {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    self.name,
                    fmt_f64(p.m_ratio),
                    fmt_f64(p.k_ratio),
                    p.m,
                    fmt_f64(p.rho),
                    a.name(),
                    fmt_f64(*f)
                ));
            }
        }
        s
    }
}

fn nmse(t: &Trajectory, x: &[f64]) -> f64 {
    let p: f64 = x.iter().map(|v| v * v).sum();
    let e: f64 = t.estimate.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
    if p == 0.0 {
        if e == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        e / p
    }
}

/// Success fractions over the `(M/N, K/M)` grid with noiseless observations
/// through a partial orthogonal matrix. Every algorithm sees the same
/// matrices and signals. Posterior-mean denoisers use the true sparsity.
pub fn phase_transition(cfg: &PtcConfig) -> Result<PtcResult, HarnessError> {
    cfg.validate()?;
    let grid: Vec<(f64, f64)> =
        cfg.m_ratios.iter().flat_map(|&mr| cfg.k_ratios.iter().map(move |&kr| (mr, kr))).collect();
    let opts = SolverOptions { iterations: cfg.iterations, early_exit: true, ..SolverOptions::default() };
    let ensemble = EnsembleSpec::PartialOrthogonal { ortho: cfg.ortho };
    let mut points = Vec::with_capacity(grid.len());
    for (idx, &(mr, kr)) in grid.iter().enumerate() {
        let m = ((mr * cfg.n as f64).round() as usize).clamp(1, cfg.n);
        let rho = (kr * m as f64 / cfg.n as f64).min(1.0);
        let prior = Prior::bernoulli_gaussian(rho)?;
        let seed = stream_seed(cfg.seed, idx as u64, Stage::Aux);
        let outcomes = exec::map_indexed(cfg.trials, |t| -> Result<Vec<bool>, HarnessError> {
            let t = t as u64;
            let a = sample_matrix(&ensemble, m, cfg.n, &mut stream(seed, t, Stage::Matrix))?;
            let sys = LinearSystem::sample(
                &a,
                &prior,
                0.0,
                &mut stream(seed, t, Stage::Signal),
                &mut stream(seed, t, Stage::Noise),
            )?;
            let x = sys.x_true.as_deref().unwrap_or_default();
            cfg.algorithms
                .iter()
                .map(|alg| {
                    let tr = match alg {
                        Algorithm::Amp => run_amp(&sys, &NonlinearStage::Plain { base: Denoiser::mmse(prior) }, &opts)?,
                        Algorithm::Oamp(le) => run_oamp(
                            &sys,
                            *le,
                            &DfDenoiser { base: Denoiser::mmse(prior), scale: Scale::Optimal },
                            &Denoiser::mmse(prior),
                            &opts,
                        )?,
                    };
                    Ok(nmse(&tr, x) < cfg.threshold)
                })
                .collect()
        });
        let outcomes: Vec<Vec<bool>> = outcomes.into_iter().collect::<Result<_, _>>()?;
        let success = (0..cfg.algorithms.len())
            .map(|k| outcomes.iter().filter(|o| o[k]).count() as f64 / cfg.trials as f64)
            .collect();
        points.push(PtcPoint { m_ratio: mr, k_ratio: kr, m, rho, success });
    }
    Ok(PtcResult { name: cfg.name.clone(), algorithms: cfg.algorithms.clone(), points })
}
