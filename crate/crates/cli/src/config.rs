//! Declarative experiment description: a TOML file overlaid with flags.

use std::path::PathBuf;

use qdirac::oscillator::ModelParams;
use qdirac::qalgebra::{DeformationParam, Truncation};
use qdirac::states::CoherentParam;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    Mandel,
    ZitterNumber,
    ZitterCoherent,
    Fig2,
    NrLimit,
    GridVerify,
    Equivalence,
    Verify,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Mandel => "mandel",
            Self::ZitterNumber => "zitter-number",
            Self::ZitterCoherent => "zitter-coherent",
            Self::Fig2 => "fig2",
            Self::NrLimit => "nr-limit",
            Self::GridVerify => "grid-verify",
            Self::Equivalence => "equivalence",
            Self::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    /// `k` in `h = α / k`.
    #[serde(default = "default_cells")]
    pub cells_per_shift: usize,
    #[serde(default = "default_points")]
    pub points: Vec<usize>,
}

fn default_cells() -> usize {
    8
}

fn default_points() -> Vec<usize> {
    vec![256, 512, 1024]
}

impl Default for GridParams {
    fn default() -> Self {
        Self { cells_per_shift: default_cells(), points: default_points() }
    }
}

/// Every field is optional in the file; unset values take per-experiment
/// defaults at dispatch.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub q: Option<f64>,
    pub xi: Option<f64>,
    pub n: Option<u32>,
    pub alpha: Option<f64>,
    pub trunc: Option<usize>,
    pub tau_max: Option<f64>,
    pub tau_steps: Option<usize>,
    pub mandel_points: Option<usize>,
    #[serde(default)]
    pub grid: GridParams,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol_scale: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(experiment, q, xi, n, alpha, trunc, tau_max, tau_steps, mandel_points, out, seed, tol_scale);
        if other.grid != GridParams::default() {
            self.grid = other.grid;
        }
        self
    }

    pub fn experiment(&self) -> Result<Experiment, CliError> {
        self.experiment.ok_or_else(|| CliError::Config("no experiment selected".into()))
    }

    pub fn deformation(&self) -> Result<DeformationParam, CliError> {
        Ok(DeformationParam::new(self.q.unwrap_or(0.75))?)
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(self.xi.unwrap_or(0.25))?)
    }

    pub fn level(&self) -> Result<u32, CliError> {
        match self.n.unwrap_or(2) {
            0 => Err(CliError::Config("n must be >= 1".into())),
            n => Ok(n),
        }
    }

    pub fn coherent(&self) -> Result<CoherentParam, CliError> {
        let alpha = self.alpha.unwrap_or(1.0);
        if !alpha.is_finite() {
            return Err(CliError::Config(format!("alpha = {alpha} is not finite")));
        }
        Ok(CoherentParam::real(alpha, self.deformation()?)?)
    }

    pub fn truncation(&self, default: usize) -> Result<Truncation, CliError> {
        Ok(Truncation::new(self.trunc.unwrap_or(default))?)
    }

    pub fn time(&self, default_max: f64, default_steps: usize) -> Result<(f64, usize), CliError> {
        let tau_max = self.tau_max.unwrap_or(default_max);
        let steps = self.tau_steps.unwrap_or(default_steps);
        if !(tau_max > 0.0 && tau_max.is_finite()) || steps < 2 {
            return Err(CliError::Config(format!("need tau_max > 0 and tau_steps >= 2, got {tau_max}, {steps}")));
        }
        Ok((tau_max, steps))
    }

    pub fn tol_scale(&self) -> Result<f64, CliError> {
        match self.tol_scale.unwrap_or(1.0) {
            s if s > 0.0 && s.is_finite() => Ok(s),
            s => Err(CliError::Config(format!("tol_scale = {s} must be positive"))),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}
