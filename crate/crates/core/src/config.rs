//! Experiment files: one TOML document per experiment.
//!
//! ```toml
//! task = "sweep"
//! seed = 7
//! codes = [{ family = "toric3d_z", size = 3 }]
//!
//! [sweep]
//! noise = { kind = "iid_local", pauli = "x" }
//! flips = { kind = "iid" }
//! lambda = [0.01, 0.02]
//! eta = [0.01]
//! rounds = [10, 100]
//! trials = 2000
//!
//! [output]
//! csv = "results.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundsMode, FamilyConstants, ParameterFunctions};
use crate::code::CodeId;
use crate::error::{Error, Result};
use crate::memory::MemoryRunConfig;
use crate::noise::{FlipModelSpec, NoiseModelSpec, PathFamily, PauliSector, PerUse};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    CodeBuild,
    Verify,
    Sweep,
}

/// A noise model with its rate left open; the `lambda` axis fills it in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseTemplate {
    None,
    IidLocal {
        #[serde(default)]
        pauli: PauliSector,
    },
    /// `lambda` is the fault probability per qubit.
    Fabrication {
        per_use: PerUse,
    },
    /// `lambda` is the spawn probability.
    MarkovWalker {
        #[serde(default)]
        path_family: PathFamily,
        #[serde(default)]
        max_active: Option<usize>,
    },
}

impl NoiseTemplate {
    pub fn instantiate(&self, rate: f64) -> NoiseModelSpec {
        match self {
            NoiseTemplate::None => NoiseModelSpec::None,
            NoiseTemplate::IidLocal { pauli } => NoiseModelSpec::IidLocal { lambda: rate, pauli: *pauli },
            NoiseTemplate::Fabrication { per_use } => NoiseModelSpec::Fabrication { q_fault: rate, per_use: *per_use },
            NoiseTemplate::MarkovWalker { path_family, max_active } => {
                NoiseModelSpec::MarkovWalker { rho_spawn: rate, path_family: *path_family, max_active: *max_active }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlipTemplate {
    None,
    Iid,
    HideWalkers,
}

impl FlipTemplate {
    pub fn instantiate(&self, eta: f64) -> FlipModelSpec {
        match self {
            FlipTemplate::None => FlipModelSpec::None,
            FlipTemplate::Iid => FlipModelSpec::Iid { eta },
            FlipTemplate::HideWalkers => FlipModelSpec::HideWalkers { eta },
        }
    }
}

fn default_zero() -> Vec<f64> {
    vec![0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub noise: NoiseTemplate,
    #[serde(default = "default_flips")]
    pub flips: FlipTemplate,
    #[serde(default = "default_zero")]
    pub lambda: Vec<f64>,
    #[serde(default = "default_zero")]
    pub eta: Vec<f64>,
    pub rounds: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub initial_error: Option<String>,
}

fn default_flips() -> FlipTemplate {
    FlipTemplate::None
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    #[serde(default)]
    pub mode: BoundsMode,
    #[serde(default)]
    pub constants: FamilyConstants,
    /// Use `f3(τ) = min(1, nτ)` instead of the zero default.
    #[serde(default)]
    pub union_f3: bool,
}

impl BoundsSpec {
    pub fn functions(&self) -> Result<ParameterFunctions> {
        self.constants.validate()?;
        let pf = ParameterFunctions::new(self.mode, self.constants);
        Ok(if self.union_f3 { pf.with_union_f3() } else { pf })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub code_json: Option<PathBuf>,
    /// Opt-in JSON-lines trajectory dump, one file per grid point.
    pub trajectories: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub codes: Vec<CodeId>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub bounds: Option<BoundsSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self.task {
            Task::CodeBuild if self.codes.is_empty() => {
                return Err(Error::Config("task code_build needs at least one entry in codes".into()))
            }
            Task::Sweep => {
                if self.codes.is_empty() {
                    return Err(Error::Config("task sweep needs at least one entry in codes".into()));
                }
                let Some(s) = &self.sweep else {
                    return Err(Error::Config("task sweep needs a [sweep] table".into()));
                };
                if s.lambda.is_empty() || s.eta.is_empty() || s.rounds.is_empty() {
                    return Err(Error::Config("sweep axes lambda, eta and rounds must be nonempty".into()));
                }
            }
            _ => {}
        }
        if let Some(b) = &self.bounds {
            b.constants.validate()?;
        }
        for g in self.grid()? {
            g.validate()?;
        }
        Ok(())
    }

    /// Grid points in table order: code, then `lambda`, `eta`, `rounds`.
    pub fn grid(&self) -> Result<Vec<MemoryRunConfig>> {
        let Some(s) = &self.sweep else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        for code in &self.codes {
            for &lambda in &s.lambda {
                for &eta in &s.eta {
                    for &rounds in &s.rounds {
                        out.push(MemoryRunConfig {
                            code: *code,
                            noise: s.noise.instantiate(lambda),
                            flips: s.flips.instantiate(eta),
                            rounds,
                            trials: s.trials,
                            seed: self.seed,
                            initial_error: s.initial_error.clone(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}
