//! Seeded Monte-Carlo execution of an experiment and its SE predictions.

use oamp_core::denoisers::{Denoiser, DfDenoiser, NonlinearStage, Scale};
use oamp_core::ensembles::{geometric_singulars, sample_matrix, EnsembleSpec, MatrixModel};
use oamp_core::exec;
use oamp_core::linest::LeKind;
use oamp_core::model::{noise_variance_from_snr, noise_variance_from_trace, LinearOperator, LinearSystem};
use oamp_core::rng::{stream, Stage};
use oamp_core::sevo::{self, LinearMap, NonlinearMap, SpectralModel};
use oamp_core::solvers::{run_amp, run_oamp, RunStatus, SolverOptions, Trajectory};

use crate::config::{Algorithm, DenoiserSpec, ExperimentConfig, SeSpectrum};
use crate::emit::ResultRow;
use crate::HarnessError;

/// One simulated curve: an algorithm with a concrete nonlinear stage.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    Amp(NonlinearStage),
    Oamp { le: LeKind, df: DfDenoiser, out: Denoiser },
}

/// The curves an experiment simulates, with their labels.
pub fn curves(cfg: &ExperimentConfig) -> Vec<(String, Algorithm, CurveSpec)> {
    let mut out = Vec::new();
    for &alg in &cfg.algorithms {
        let name = alg.name();
        match (&cfg.denoiser, alg) {
            (DenoiserSpec::MmseOptimal, Algorithm::Amp) => {
                out.push((name, alg, CurveSpec::Amp(NonlinearStage::Plain { base: Denoiser::mmse(cfg.prior) })))
            }
            (DenoiserSpec::MmseOptimal, Algorithm::Oamp(le)) => out.push((
                name,
                alg,
                CurveSpec::Oamp {
                    le,
                    df: DfDenoiser { base: Denoiser::mmse(cfg.prior), scale: Scale::Optimal },
                    out: Denoiser::mmse(cfg.prior),
                },
            )),
            (DenoiserSpec::SoftThreshold { gamma, .. }, Algorithm::Amp) => {
                out.push((name, alg, CurveSpec::Amp(NonlinearStage::Plain { base: Denoiser::soft(*gamma) })))
            }
            (DenoiserSpec::SoftThreshold { c_list, gamma }, Algorithm::Oamp(le)) => {
                for c in c_list {
                    let base = Denoiser::soft(*gamma);
                    out.push((
                        format!("{name}-C{c}"),
                        alg,
                        CurveSpec::Oamp { le, df: DfDenoiser { base, scale: Scale::Fixed(*c) }, out: base },
                    ));
                }
            }
            (DenoiserSpec::BetaFamily { betas, gamma }, _) => {
                for &beta in betas {
                    let stage = NonlinearStage::Beta { beta, base: Denoiser::soft(*gamma) };
                    out.push((format!("{name}-beta{beta:.2}"), alg, CurveSpec::Amp(stage)));
                }
            }
        }
    }
    out
}

/// Averages over trials and the SE prediction of one curve.
#[derive(Debug, Clone)]
pub struct CurveResult {
    pub label: String,
    pub algorithm: Algorithm,
    /// Per-trial trajectories, in trial order.
    pub trials: Vec<Trajectory>,
    /// Mean of `mse_out` over the trials that reached each iteration.
    pub mean_mse: Vec<f64>,
    pub mean_v2_hat: Vec<f64>,
    pub mean_tau2_hat: Vec<f64>,
    pub se: Option<Vec<f64>>,
    pub se_error: Option<String>,
}

impl CurveResult {
    /// Trials that stopped before the last iteration, with their status.
    pub fn failures(&self) -> Vec<(usize, &RunStatus)> {
        self.trials
            .iter()
            .enumerate()
            .filter(|(_, t)| !matches!(t.status, RunStatus::Completed | RunStatus::Converged { .. }))
            .map(|(i, t)| (i, &t.status))
            .collect()
    }

    /// Per-iteration `|sim - se| / sim` of the trial mean.
    pub fn e_metric(&self) -> Option<Vec<f64>> {
        let se = self.se.as_ref()?;
        Some(self.mean_mse.iter().zip(se).map(|(s, p)| sevo::se_accuracy(*s, *p)).collect())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub curves: Vec<CurveResult>,
}

impl ExperimentResult {
    pub fn curve(&self, label: &str) -> Option<&CurveResult> {
        self.curves.iter().find(|c| c.label == label)
    }

    /// Result table: per-trial rows (when `per_trial`) followed by mean rows.
    pub fn rows(&self, per_trial: bool) -> Vec<ResultRow> {
        let cfg = &self.config;
        let mut rows = Vec::new();
        let se_at = |c: &CurveResult, t: usize| c.se.as_ref().and_then(|s| s.get(t).copied());
        for c in &self.curves {
            if per_trial {
                for (k, tr) in c.trials.iter().enumerate() {
                    for (t, r) in tr.records.iter().enumerate() {
                        let se = se_at(c, t);
                        rows.push(ResultRow {
                            experiment: cfg.name.clone(),
                            trial: k.to_string(),
                            iteration: t,
                            algorithm: c.label.clone(),
                            mse_sim: r.mse_out,
                            mse_se: se,
                            e_metric: se.map(|p| sevo::se_accuracy(r.mse_out, p)),
                            v2_hat: r.v2_hat,
                            tau2_hat: r.tau2_hat,
                            seed: cfg.seed,
                        });
                    }
                }
            }
            for t in 0..c.mean_mse.len() {
                let se = se_at(c, t);
                rows.push(ResultRow {
                    experiment: cfg.name.clone(),
                    trial: "mean".into(),
                    iteration: t,
                    algorithm: c.label.clone(),
                    mse_sim: c.mean_mse[t],
                    mse_se: se,
                    e_metric: se.map(|p| sevo::se_accuracy(c.mean_mse[t], p)),
                    v2_hat: c.mean_v2_hat[t],
                    tau2_hat: c.mean_tau2_hat[t],
                    seed: cfg.seed,
                });
            }
        }
        rows
    }
}

fn sample_trial_matrix(cfg: &ExperimentConfig, m: usize, trial: usize) -> Result<MatrixModel, HarnessError> {
    let mut rng = stream(cfg.seed, trial as u64, Stage::Matrix);
    Ok(sample_matrix(&cfg.ensemble, m, cfg.n, &mut rng)?)
}

fn noise_variance(cfg: &ExperimentConfig, a: &MatrixModel) -> f64 {
    cfg.snr_db.map_or(0.0, |snr| noise_variance_from_snr(a, &cfg.prior, snr))
}

fn run_trial(
    cfg: &ExperimentConfig,
    m: usize,
    specs: &[(String, Algorithm, CurveSpec)],
    trial: usize,
) -> Result<Vec<Trajectory>, HarnessError> {
    let a = sample_trial_matrix(cfg, m, trial)?;
    let sigma2 = noise_variance(cfg, &a);
    let t = trial as u64;
    let sys = LinearSystem::sample(
        &a,
        &cfg.prior,
        sigma2,
        &mut stream(cfg.seed, t, Stage::Signal),
        &mut stream(cfg.seed, t, Stage::Noise),
    )?;
    let opts = SolverOptions {
        iterations: cfg.iterations,
        early_exit: false,
        v2_init: cfg.prior.second_moment(),
        ..SolverOptions::default()
    };
    specs
        .iter()
        .map(|(_, _, spec)| {
            let mut tr = match spec {
                CurveSpec::Amp(stage) => run_amp(&sys, stage, &opts)?,
                CurveSpec::Oamp { le, df, out } => run_oamp(&sys, *le, df, out, &opts)?,
            };
            tr.estimate = Vec::new();
            Ok(tr)
        })
        .collect()
}

/// SE spectrum and noise variance for `cfg`.
fn se_inputs(cfg: &ExperimentConfig, m: usize) -> Result<(SpectralModel, f64), HarnessError> {
    let n = cfg.n;
    let delta = n as f64 / m as f64;
    let sigma2_of = |trace: f64| cfg.snr_db.map_or(0.0, |snr| noise_variance_from_trace(trace, m, &cfg.prior, snr));
    match cfg.se_spectrum {
        SeSpectrum::Sampled => {
            let a = sample_trial_matrix(cfg, m, 0)?;
            let spec = SpectralModel::empirical(a.spectrum().to_vec())?;
            Ok((spec, sigma2_of(a.frobenius_sq())))
        }
        SeSpectrum::Nominal => match cfg.ensemble {
            // E tr(A^T A) = N for N(0, 1/M) entries.
            EnsembleSpec::IidGaussian => Ok((SpectralModel::IidGaussianAsym { delta }, sigma2_of(n as f64))),
            EnsembleSpec::Geometric { kappa, normalization } => {
                let s = geometric_singulars(kappa, m, n, normalization)?;
                let mut l2: Vec<f64> = s.iter().map(|v| v * v).collect();
                let trace = l2.iter().sum();
                l2.resize(n, 0.0);
                Ok((SpectralModel::empirical(l2)?, sigma2_of(trace)))
            }
            EnsembleSpec::PartialOrthogonal { .. } => {
                Ok((SpectralModel::PartialOrthogonalAsym { delta }, sigma2_of(n as f64)))
            }
        },
    }
}

/// SE prediction of the output MSE per iteration for every curve of `cfg`.
/// Labelled SE curves; a curve whose recursion failed carries its error.
pub type SeCurves = Vec<(String, Result<Vec<f64>, HarnessError>)>;

pub fn state_evolution(cfg: &ExperimentConfig) -> Result<SeCurves, HarnessError> {
    cfg.validate()?;
    let m = cfg.rows()?;
    let (spec, sigma2) = se_inputs(cfg, m)?;
    let delta = cfg.n as f64 / m as f64;
    let mut out = Vec::new();
    for (label, _, c) in curves(cfg) {
        let res = match &c {
            CurveSpec::Amp(stage) => {
                sevo::se_amp(&cfg.prior, stage, cfg.amp_se_rule, delta, sigma2, cfg.iterations, &cfg.quadrature)
            }
            CurveSpec::Oamp { le, df, out } => sevo::run_se_oamp(
                &spec,
                &cfg.prior,
                sigma2,
                &LinearMap::Estimator(*le),
                &NonlinearMap::DivergenceFree { df: *df, out: *out },
                cfg.iterations,
                &cfg.quadrature,
            ),
        };
        out.push((label, res.map(|s| s.mse_out).map_err(HarnessError::from)));
    }
    Ok(out)
}

fn mean_by_iteration(trials: &[Trajectory], f: impl Fn(&oamp_core::solvers::IterRecord) -> f64) -> Vec<f64> {
    let len = trials.iter().map(|t| t.records.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let vals: Vec<f64> = trials.iter().filter_map(|t| t.records.get(i)).map(&f).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect()
}

/// Run every trial of `cfg` and attach SE predictions.
///
/// Each trial draws its matrix, signal and noise from independent streams
/// keyed by `(seed, trial, stage)`, so results do not depend on whether
/// trials run in parallel.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let m = cfg.rows()?;
    let specs = curves(cfg);
    let per_trial = exec::map_indexed(cfg.trials, |t| run_trial(cfg, m, &specs, t));
    let per_trial: Vec<Vec<Trajectory>> = per_trial.into_iter().collect::<Result<_, _>>()?;
    let se = if cfg.state_evolution { Some(state_evolution(cfg)?) } else { None };
    let mut results = Vec::with_capacity(specs.len());
    for (k, (label, alg, _)) in specs.into_iter().enumerate() {
        let trials: Vec<Trajectory> = per_trial.iter().map(|v| v[k].clone()).collect();
        let (se_curve, se_error) = match se.as_ref().map(|s| &s[k].1) {
            Some(Ok(v)) => (Some(v.clone()), None),
            Some(Err(e)) => (None, Some(e.to_string())),
            None => (None, None),
        };
        results.push(CurveResult {
            label,
            algorithm: alg,
            mean_mse: mean_by_iteration(&trials, |r| r.mse_out),
            mean_v2_hat: mean_by_iteration(&trials, |r| r.v2_hat),
            mean_tau2_hat: mean_by_iteration(&trials, |r| r.tau2_hat),
            trials,
            se: se_curve,
            se_error,
        });
    }
    Ok(ExperimentResult { config: cfg.clone(), curves: results })
}
