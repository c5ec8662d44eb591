//! Named experiment presets, one per figure, at desk scale.

use oamp_core::denoisers::GammaRule;
use oamp_core::ensembles::{EnsembleSpec, OrthoKind, SingularNormalization};
use oamp_core::linest::LeKind;
use oamp_core::model::Prior;
use oamp_core::quadrature::QuadratureScheme;
use oamp_core::sevo::AmpSeRule;

use crate::config::{Algorithm, ConfigFile, DenoiserSpec, ExperimentConfig, PtcConfig, SeSpectrum};

pub const NAMES: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1" => "AMP SE error for the beta family, IID Gaussian vs partial DCT (rho 0.4, M = 0.7N, 50 dB)",
        "fig2" => "AMP and OAMP-{MF,PINV,LMMSE} on IID Gaussian, BPSK, M = 0.65N, 14 dB",
        "fig3" => "OAMP on geometric singular values, kappa = 5, N = 1000, M = 500, rho 0.2, 60 dB",
        "fig4" => "AMP vs OAMP over condition numbers, N = 500, M = 250, rho 0.2, 60 dB",
        "fig5" => "noiseless phase transition on partial DCT, N = 512, 10 x 10 grid",
        "fig6" => "OAMP-LMMSE on partial Haar/DCT/Hadamard, rho 0.1, M = round(0.35N), 50 dB",
        "fig7" => "OAMP with divergence-free soft thresholding, C in {1, 2, 3}, partial DCT",
        _ => return None,
    })
}

const ALL_OAMP: [Algorithm; 3] =
    [Algorithm::Oamp(LeKind::Mf), Algorithm::Oamp(LeKind::Pinv), Algorithm::Oamp(LeKind::Lmmse)];

fn base(name: String, ensemble: EnsembleSpec, n: usize, prior: Prior) -> ExperimentConfig {
    ExperimentConfig {
        name,
        ensemble,
        n,
        m: None,
        m_ratio: None,
        prior,
        snr_db: None,
        algorithms: vec![],
        denoiser: DenoiserSpec::MmseOptimal,
        iterations: 50,
        trials: 50,
        seed: 1,
        amp_se_rule: AmpSeRule::Iid,
        se_spectrum: SeSpectrum::Nominal,
        state_evolution: true,
        quadrature: QuadratureScheme::default(),
    }
}

fn bg(rho: f64) -> Prior {
    Prior::BernoulliGaussian { rho }
}

fn partial(ortho: OrthoKind) -> EnsembleSpec {
    EnsembleSpec::PartialOrthogonal { ortho }
}

/// AMP with the beta family of soft thresholds at a fixed threshold of 1.
pub fn fig1() -> Vec<ExperimentConfig> {
    let betas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mk = |name: &str, ensemble, rule| ExperimentConfig {
        m_ratio: Some(0.7),
        snr_db: Some(50.0),
        algorithms: vec![Algorithm::Amp],
        denoiser: DenoiserSpec::BetaFamily { betas: betas.clone(), gamma: GammaRule::Fixed(1.0) },
        amp_se_rule: rule,
        seed: 101,
        ..base(name.into(), ensemble, 2048, bg(0.4))
    };
    vec![
        mk("fig1-iid", EnsembleSpec::IidGaussian, AmpSeRule::Iid),
        mk("fig1-dct", partial(OrthoKind::Dct), AmpSeRule::Iid),
        mk("fig1-dct-po", partial(OrthoKind::Dct), AmpSeRule::PartialOrthogonal),
    ]
}

pub fn fig2() -> Vec<ExperimentConfig> {
    let mut algorithms = vec![Algorithm::Amp];
    algorithms.extend(ALL_OAMP);
    vec![ExperimentConfig {
        m_ratio: Some(0.65),
        snr_db: Some(14.0),
        algorithms,
        iterations: 20,
        trials: 100,
        seed: 202,
        ..base("fig2".into(), EnsembleSpec::IidGaussian, 2048, Prior::Bpsk)
    }]
}

fn geometric(kappa: f64) -> EnsembleSpec {
    EnsembleSpec::Geometric { kappa, normalization: SingularNormalization::SumSingular }
}

pub fn fig3() -> Vec<ExperimentConfig> {
    vec![ExperimentConfig {
        m: Some(500),
        snr_db: Some(60.0),
        algorithms: ALL_OAMP.to_vec(),
        iterations: 50,
        trials: 100,
        seed: 303,
        ..base("fig3".into(), geometric(5.0), 1000, bg(0.2))
    }]
}

pub const FIG4_KAPPAS: [f64; 7] = [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6];

/// AMP needs unit-norm columns, so the singular values are normalized by
/// their squares here. OAMP results do not depend on the scale of `A`.
pub fn fig4() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for kappa in FIG4_KAPPAS {
        let ensemble = EnsembleSpec::Geometric { kappa, normalization: SingularNormalization::SumSquared };
        let common = ExperimentConfig {
            m: Some(250),
            snr_db: Some(60.0),
            trials: 20,
            seed: 404,
            state_evolution: false,
            ..base(String::new(), ensemble, 500, bg(0.2))
        };
        out.push(ExperimentConfig {
            name: format!("fig4-oamp-k{kappa:e}"),
            algorithms: vec![Algorithm::Oamp(LeKind::Pinv), Algorithm::Oamp(LeKind::Lmmse)],
            iterations: 50,
            ..common.clone()
        });
        out.push(ExperimentConfig {
            name: format!("fig4-amp-k{kappa:e}"),
            algorithms: vec![Algorithm::Amp],
            iterations: 1000,
            ..common
        });
    }
    out
}

pub fn fig5() -> PtcConfig {
    let grid: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    PtcConfig {
        name: "fig5".into(),
        n: 512,
        ortho: OrthoKind::Dct,
        m_ratios: grid.clone(),
        k_ratios: grid,
        trials: 20,
        iterations: 50,
        threshold: 1e-4,
        seed: 505,
        algorithms: vec![Algorithm::Amp, Algorithm::Oamp(LeKind::Lmmse)],
    }
}

pub fn fig6_config(ortho: OrthoKind, n: usize) -> ExperimentConfig {
    let tag = match ortho {
        OrthoKind::Haar => "haar",
        OrthoKind::Dct => "dct",
        OrthoKind::Hadamard => "hadamard",
    };
    ExperimentConfig {
        m: Some((0.35 * n as f64).round() as usize),
        snr_db: Some(50.0),
        algorithms: vec![Algorithm::Oamp(LeKind::Lmmse)],
        iterations: 30,
        trials: 50,
        seed: 606,
        ..base(format!("fig6-{tag}-n{n}"), partial(ortho), n, bg(0.1))
    }
}

pub fn fig6() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for n in [256, 1024, 4096] {
        for ortho in [OrthoKind::Haar, OrthoKind::Dct, OrthoKind::Hadamard] {
            out.push(fig6_config(ortho, n));
        }
    }
    out
}

pub fn fig7() -> Vec<ExperimentConfig> {
    vec![ExperimentConfig {
        m_ratio: Some(0.35),
        snr_db: Some(50.0),
        algorithms: vec![Algorithm::Oamp(LeKind::Lmmse)],
        denoiser: DenoiserSpec::SoftThreshold { c_list: vec![1.0, 2.0, 3.0], gamma: GammaRule::TauScaled(1.0) },
        iterations: 30,
        trials: 50,
        seed: 707,
        ..base("fig7".into(), partial(OrthoKind::Dct), 2048, bg(0.1))
    }]
}

/// Preset by name.
pub fn preset(name: &str) -> Option<ConfigFile> {
    let experiment = match name {
        "fig1" => fig1(),
        "fig2" => fig2(),
        "fig3" => fig3(),
        "fig4" => fig4(),
        "fig5" => return Some(ConfigFile { experiment: vec![], ptc: vec![fig5()] }),
        "fig6" => fig6(),
        "fig7" => fig7(),
        _ => return None,
    };
    Some(ConfigFile { experiment, ptc: vec![] })
}
