//! Experiment configuration: a JSON object with every numeric field defaulted.

use std::path::{Path, PathBuf};

use hilfer_core::inclusion::SelectionStrategy;
use hilfer_core::linctl::DEFAULT_EPS;
use hilfer_core::psicalc::{FracOrder, PsiFunction, PsiKind};
use hilfer_core::spectral::{EvolutionProblem, SpectralState};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    Verify,
    Sweep,
    Optimal,
    Inclusion,
    Problem1,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Verify => "verify",
            RunKind::Sweep => "sweep",
            RunKind::Optimal => "optimal",
            RunKind::Inclusion => "inclusion",
            RunKind::Problem1 => "problem1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PsiName {
    Linear,
    Power,
    Exponential,
    Logarithmic,
}

impl PsiName {
    pub fn kind(self) -> PsiKind {
        match self {
            PsiName::Linear => PsiKind::Linear,
            PsiName::Power => PsiKind::Power,
            PsiName::Exponential => PsiKind::Exponential,
            PsiName::Logarithmic => PsiKind::Logarithmic,
        }
    }
}

/// A state in sine coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Zero,
    /// ξ(π − ξ), expanded in the sine basis.
    Parabola,
    /// amplitude · e_index (1-based).
    Mode { index: usize, amplitude: f64 },
    Coeffs(Vec<f64>),
}

impl StateSpec {
    pub fn build(&self, n: usize, field: &'static str) -> Result<SpectralState, LabError> {
        let invalid = |reason: String| LabError::validation(field, reason);
        match self {
            StateSpec::Zero => Ok(SpectralState::zeros(n)),
            StateSpec::Parabola => {
                let w = (2.0 / std::f64::consts::PI).sqrt();
                Ok(SpectralState::new(
                    (1..=n).map(|k| w * 2.0 * (1.0 - (-1f64).powi(k as i32)) / (k as f64).powi(3)).collect(),
                )?)
            }
            StateSpec::Mode { index, amplitude } => {
                if *index == 0 || *index > n {
                    return Err(invalid(format!("mode index must lie in 1..={n}")));
                }
                Ok(SpectralState::basis(n, *index).scaled(*amplitude))
            }
            StateSpec::Coeffs(c) => {
                if c.len() != n {
                    return Err(invalid(format!("expected {n} coefficients, got {}", c.len())));
                }
                SpectralState::new(c.clone()).map_err(|e| invalid(e.to_string()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Lower,
    Upper,
    Midpoint,
    Switch,
}

impl Strategy {
    pub fn selection(self) -> SelectionStrategy {
        match self {
            Strategy::Lower => SelectionStrategy::Lower,
            Strategy::Upper => SelectionStrategy::Upper,
            Strategy::Midpoint => SelectionStrategy::Midpoint,
            Strategy::Switch => SelectionStrategy::Switch,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run: RunKind,
    pub alpha: f64,
    pub beta: f64,
    pub psi: PsiName,
    /// Clock parameter; the kind's default when absent.
    pub psi_params: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub n_modes: usize,
    pub x0: StateSpec,
    /// Target state x₁ (sweeps) or x_b (optimal control).
    pub x1: StateSpec,
    /// Diagonal of B; all ones when empty.
    pub control_gain: Vec<f64>,
    pub grid_size: usize,
    pub eps_list: Vec<f64>,
    pub lambda: f64,
    pub lambda_list: Vec<f64>,
    pub quad_tol: f64,
    pub fixed_point_tol: f64,
    pub max_iter: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub n_candidates: usize,
    pub search_grid: usize,
    pub kappa: f64,
    pub rho0: f64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            run: RunKind::Sweep,
            alpha: 0.75,
            beta: 0.5,
            psi: PsiName::Linear,
            psi_params: Vec::new(),
            a: 0.0,
            b: 1.0,
            n_modes: 32,
            x0: StateSpec::Parabola,
            x1: StateSpec::Mode { index: 1, amplitude: 0.5 },
            control_gain: Vec::new(),
            grid_size: 201,
            eps_list: DEFAULT_EPS.to_vec(),
            lambda: 1e-2,
            lambda_list: vec![1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0],
            quad_tol: 1e-12,
            fixed_point_tol: 1e-8,
            max_iter: 60,
            strategy: Strategy::Midpoint,
            seed: 0,
            n_candidates: 16,
            search_grid: 101,
            kappa: 0.5,
            rho0: 0.5,
            out: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

fn strictly_decreasing_positive(v: &[f64]) -> bool {
    !v.is_empty() && v.iter().all(|x| *x > 0.0 && x.is_finite()) && v.windows(2).all(|w| w[1] < w[0])
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| LabError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        self.problem()?;
        let v = LabError::validation;
        if self.grid_size < 3 || self.search_grid < 3 {
            return Err(v("grid_size", "grids need at least 3 nodes".into()));
        }
        if !strictly_decreasing_positive(&self.eps_list) {
            return Err(v("eps_list", "must be positive and strictly decreasing".into()));
        }
        if !(self.lambda > 0.0) || !self.lambda_list.iter().all(|l| *l > 0.0) {
            return Err(v("lambda", "must be positive".into()));
        }
        if !self.lambda_list.windows(2).all(|w| w[1] > w[0]) {
            return Err(v("lambda_list", "must be strictly increasing".into()));
        }
        if !(self.quad_tol > 0.0 && self.fixed_point_tol > 0.0) || self.max_iter == 0 {
            return Err(v("tolerances", "tolerances must be positive and max_iter at least 1".into()));
        }
        if self.n_candidates == 0 {
            return Err(v("n_candidates", "must be at least 1".into()));
        }
        if !(self.kappa >= 0.0 && self.rho0 >= 0.0) {
            return Err(v("kappa/rho0", "constraint gains must be nonnegative".into()));
        }
        if self.formats.is_empty() {
            return Err(v("formats", "at least one output format is required".into()));
        }
        Ok(())
    }

    pub fn order(&self) -> Result<FracOrder, LabError> {
        FracOrder::new(self.alpha, self.beta).map_err(|e| LabError::validation("alpha/beta", e.to_string()))
    }

    pub fn clock(&self) -> Result<PsiFunction, LabError> {
        PsiFunction::new(self.psi.kind(), &self.psi_params, self.a, self.b)
            .map_err(|e| LabError::validation("psi", e.to_string()))
    }

    pub fn problem(&self) -> Result<EvolutionProblem, LabError> {
        let order = self.order()?;
        let psi = self.clock()?;
        if self.n_modes == 0 {
            return Err(LabError::validation("n_modes", "must be at least 1".into()));
        }
        let x0 = self.x0.build(self.n_modes, "x0")?;
        self.x1.build(self.n_modes, "x1")?;
        let gain = if self.control_gain.is_empty() {
            vec![1.0; self.n_modes]
        } else if self.control_gain.len() != self.n_modes {
            return Err(LabError::validation("control_gain", format!("expected {} entries", self.n_modes)));
        } else {
            self.control_gain.clone()
        };
        EvolutionProblem::with_gain(psi, order, x0, gain).map_err(|e| LabError::validation("problem", e.to_string()))
    }

    pub fn target(&self) -> Result<SpectralState, LabError> {
        self.x1.build(self.n_modes, "x1")
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    ExperimentConfig::from_json(&text)
}
