//! Declarative experiment descriptions (TOML).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use oamp_core::denoisers::GammaRule;
use oamp_core::ensembles::{EnsembleSpec, OrthoKind};
use oamp_core::linest::LeKind;
use oamp_core::model::Prior;
use oamp_core::quadrature::QuadratureScheme;
use oamp_core::sevo::AmpSeRule;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// An iterative algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    Amp,
    Oamp(LeKind),
}

impl Algorithm {
    pub fn name(self) -> String {
        match self {
            Algorithm::Amp => "AMP".into(),
            Algorithm::Oamp(k) => format!("OAMP-{}", k.name()),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "amp" => Ok(Algorithm::Amp),
            "oamp-mf" => Ok(Algorithm::Oamp(LeKind::Mf)),
            "oamp-pinv" => Ok(Algorithm::Oamp(LeKind::Pinv)),
            "oamp-lmmse" => Ok(Algorithm::Oamp(LeKind::Lmmse)),
            _ => Err(HarnessError::Config(format!("unknown algorithm `{s}`"))),
        }
    }
}

impl TryFrom<String> for Algorithm {
    type Error = HarnessError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.name().to_ascii_lowercase()
    }
}

/// Nonlinear stage family of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DenoiserSpec {
    /// Posterior mean for AMP; divergence-free posterior mean with the
    /// optimal scale and a posterior-mean output for OAMP.
    MmseOptimal,
    /// Soft threshold; OAMP runs its divergence-free form once per scale.
    SoftThreshold { c_list: Vec<f64>, gamma: GammaRule },
    /// AMP only: `eta_hat - (1 - beta) dbar r` with a soft-threshold `eta_hat`.
    BetaFamily { betas: Vec<f64>, gamma: GammaRule },
}

/// Spectrum used for the OAMP state evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeSpectrum {
    /// Prescribed spectrum of the ensemble: exact for geometric and partial
    /// orthogonal matrices, the large-system limit for IID Gaussian ones.
    #[default]
    Nominal,
    /// Eigenvalues of the matrix drawn for trial 0.
    Sampled,
}

fn default_rule() -> AmpSeRule {
    AmpSeRule::Iid
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub ensemble: EnsembleSpec,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_ratio: Option<f64>,
    pub prior: Prior,
    /// Omitted means noiseless.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub algorithms: Vec<Algorithm>,
    pub denoiser: DenoiserSpec,
    pub iterations: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_rule")]
    pub amp_se_rule: AmpSeRule,
    #[serde(default)]
    pub se_spectrum: SeSpectrum,
    #[serde(default = "default_true")]
    pub state_evolution: bool,
    #[serde(default)]
    pub quadrature: QuadratureScheme,
}

impl ExperimentConfig {
    /// Number of measurements.
    pub fn rows(&self) -> Result<usize, HarnessError> {
        match (self.m, self.m_ratio) {
            (Some(m), None) => Ok(m),
            (None, Some(r)) => Ok((r * self.n as f64).round() as usize),
            _ => Err(HarnessError::Config(format!("{}: give exactly one of `m` and `m_ratio`", self.name))),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(format!("{}: {msg}", self.name)));
        let m = self.rows()?;
        if self.n == 0 || m == 0 {
            return bad(format!("dimensions must be positive, got {m}x{}", self.n));
        }
        if self.trials == 0 || self.iterations == 0 {
            return bad("trials and iterations must be >= 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms".into());
        }
        self.prior.validate().map_err(|e| HarnessError::Config(format!("{}: {e}", self.name)))?;
        self.quadrature.validate().map_err(|e| HarnessError::Config(format!("{}: {e}", self.name)))?;
        match &self.denoiser {
            DenoiserSpec::BetaFamily { betas, .. } => {
                if betas.is_empty() {
                    return bad("empty beta grid".into());
                }
                if self.algorithms.iter().any(|a| *a != Algorithm::Amp) {
                    return bad("the beta family is only defined for AMP".into());
                }
            }
            DenoiserSpec::SoftThreshold { c_list, .. } => {
                if c_list.is_empty() && self.algorithms.iter().any(|a| *a != Algorithm::Amp) {
                    return bad("OAMP soft thresholding needs at least one scale".into());
                }
            }
            DenoiserSpec::MmseOptimal => {}
        }
        Ok(())
    }
}

/// Sparsity-undersampling sweep with noiseless Bernoulli-Gaussian signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtcConfig {
    pub name: String,
    pub n: usize,
    #[serde(default = "default_ortho")]
    pub ortho: OrthoKind,
    /// `M / N` grid.
    pub m_ratios: Vec<f64>,
    /// `K / M` grid, `K = rho N` the expected number of non-zeros.
    pub k_ratios: Vec<f64>,
    pub trials: usize,
    pub iterations: usize,
    /// Success when `||x_hat - x||^2 / ||x||^2` is below this.
    pub threshold: f64,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
}

fn default_ortho() -> OrthoKind {
    OrthoKind::Dct
}

impl PtcConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::Config(format!("{}: {msg}", self.name)));
        if !(self.threshold > 0.0) {
            return bad("threshold must be positive");
        }
        if self.trials == 0 || self.iterations == 0 || self.n == 0 {
            return bad("n, trials and iterations must be >= 1");
        }
        if self.m_ratios.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return bad("M/N ratios must lie in (0, 1]");
        }
        if self.k_ratios.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return bad("K/M ratios must lie in (0, 1]");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms");
        }
        Ok(())
    }
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub experiment: Vec<ExperimentConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ptc: Vec<PtcConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let f: ConfigFile = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        for e in &f.experiment {
            e.validate()?;
        }
        for p in &f.ptc {
            p.validate()?;
        }
        Ok(f)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[[experiment]]
name = "demo"
n = 64
m_ratio = 0.5
snr_db = 30.0
iterations = 5
trials = 2
seed = 7
algorithms = ["amp", "oamp-lmmse"]
ensemble = { kind = "partial_orthogonal", ortho = "dct" }
prior = { kind = "bernoulli_gaussian", rho = 0.1 }
denoiser = { kind = "soft_threshold", c_list = [1.0, 2.0], gamma = { kind = "tau_scaled", value = 1.0 } }
"#;

    #[test]
    fn parses_and_round_trips() {
        let f = ConfigFile::parse(SAMPLE).unwrap();
        let e = &f.experiment[0];
        assert_eq!(e.rows().unwrap(), 32);
        assert_eq!(e.algorithms, vec![Algorithm::Amp, Algorithm::Oamp(LeKind::Lmmse)]);
        assert_eq!(e.amp_se_rule, AmpSeRule::Iid);
        let back = ConfigFile::parse(&f.to_toml().unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ConfigFile::parse(&SAMPLE.replace("trials = 2", "trials = 0")).is_err());
        assert!(ConfigFile::parse(&SAMPLE.replace("\"amp\"", "\"gamp\"")).is_err());
        assert!(ConfigFile::parse(&SAMPLE.replace("m_ratio = 0.5", "m_ratio = 0.5\nm = 3")).is_err());
        assert!(ConfigFile::parse(&SAMPLE.replace("seed = 7", "seed = 7\nbogus = 1")).is_err());
    }
}
