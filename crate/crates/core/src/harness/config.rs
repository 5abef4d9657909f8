use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basecode::{builtin_code, CodeIsometry};
use crate::error::{Error, Result};
use crate::io;
use crate::mhcode::MHCode;

pub const SCHEMA_VERSION: u32 = 1;

/// Code parameters; `base_file` takes precedence over the built-in `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeConfig {
    pub n: usize,
    pub l: usize,
    pub t: usize,
    pub base: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_file: Option<PathBuf>,
}

impl Default for CodeConfig {
    fn default() -> Self {
        CodeConfig { n: 5, l: 2, t: 2, base: "five-qudit".into(), base_file: None }
    }
}

impl CodeConfig {
    pub fn base_code(&self) -> Result<CodeIsometry> {
        match &self.base_file {
            Some(path) => io::read_code(path),
            None => builtin_code(&self.base, self.l),
        }
    }

    pub fn build(&self) -> Result<MHCode> {
        let base = self.base_code()?;
        if base.n0 != self.n || base.l != self.l {
            return Err(Error::Config(format!(
                "base code has n0={} l={}, config asks for n={} l={}",
                base.n0, base.l, self.n, self.l
            )));
        }
        MHCode::new(base, self.t)
    }
}

/// Which inserted states the sweep covers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaCatalogue {
    /// Every computational basis state of an embedded site.
    pub basis: bool,
    /// Number of seeded random pure states.
    pub random_pure: usize,
    pub maximally_mixed: bool,
}

impl Default for SigmaCatalogue {
    fn default() -> Self {
        SigmaCatalogue { basis: true, random_pure: 3, maximally_mixed: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeMode {
    /// Follow every measurement and syndrome outcome.
    Branches,
    /// Sample outcomes, `trials` times per run.
    Sampled,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub code: CodeConfig,
    /// Insertion indices `J2`; all of `1..=n+1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insertion_indices: Option<Vec<usize>>,
    /// Deletion indices `J1`; all of `1..=n+1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deletion_indices: Option<Vec<usize>>,
    pub sigma: SigmaCatalogue,
    /// Number of random messages.
    pub messages: usize,
    pub trials: usize,
    pub mode: DecodeMode,
    pub seed: u64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "is_default_output")]
    pub output: OutputConfig,
}

fn is_default_output(o: &OutputConfig) -> bool {
    *o == OutputConfig::default()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            code: CodeConfig::default(),
            insertion_indices: None,
            deletion_indices: None,
            sigma: SigmaCatalogue::default(),
            messages: 5,
            trials: 1,
            mode: DecodeMode::Branches,
            seed: 2024,
            threshold: 1.0 - 1e-9,
            output: OutputConfig::default(),
        }
    }
}

fn check_schema(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = io::read_json(path).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn insertion(&self) -> Vec<usize> {
        self.insertion_indices.clone().unwrap_or_else(|| (1..=self.code.n + 1).collect())
    }

    pub fn deletion(&self) -> Vec<usize> {
        self.deletion_indices.clone().unwrap_or_else(|| (1..=self.code.n + 1).collect())
    }

    /// Thresholds above one are accepted; every run then fails.
    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        let n = self.code.n;
        for (what, list) in [("insertion", self.insertion()), ("deletion", self.deletion())] {
            if list.is_empty() {
                return Err(Error::Config(format!("{what} index list is empty")));
            }
            if let Some(bad) = list.iter().find(|&&j| j == 0 || j > n + 1) {
                return Err(Error::Config(format!("{what} index {bad} outside 1..={}", n + 1)));
            }
        }
        if self.messages == 0 || self.trials == 0 {
            return Err(Error::Config("messages and trials must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::Config(format!("threshold {} must be positive", self.threshold)));
        }
        if !self.sigma.basis && self.sigma.random_pure == 0 && !self.sigma.maximally_mixed {
            return Err(Error::Config("sigma catalogue is empty".into()));
        }
        if self.code.t < 2 {
            return Err(Error::Config(format!("insertion-deletion decoding needs t >= 2, got {}", self.code.t)));
        }
        Ok(())
    }
}

/// Injected defects for checking that the classical verifier can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Each backtracking routine runs with the other's branch priority.
    SwapPriorities,
    /// Both routines use the bottom priority.
    BottomOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalConfig {
    pub schema_version: u32,
    /// Deletion budgets to sweep; each must be at least 2.
    pub t_values: Vec<usize>,
    /// Marker lengths `n_min..=n_max`, alphabet `t + 1`.
    pub marker_n_min: usize,
    pub marker_n_max: usize,
    /// Exhaustive detecting-word sweep over `n <= enumerate_n_max`,
    /// `q <= enumerate_q_max`.
    pub enumerate_n_max: usize,
    pub enumerate_q_max: u32,
    pub random_pairs: usize,
    pub random_len_max: usize,
    pub random_q_max: u32,
    pub seed: u64,
    /// Path enumeration runs only when both lengths are at most this.
    pub path_cap: usize,
    pub path_budget: usize,
    /// Largest `q^n` enumerated.
    pub budget: u128,
    /// Counterexamples kept per check.
    pub max_counterexamples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        ClassicalConfig {
            schema_version: SCHEMA_VERSION,
            t_values: vec![2, 3],
            marker_n_min: 5,
            marker_n_max: 10,
            enumerate_n_max: 8,
            enumerate_q_max: 3,
            random_pairs: 500,
            random_len_max: 7,
            random_q_max: 3,
            seed: 2024,
            path_cap: crate::editgraph::DEFAULT_PATH_CAP,
            path_budget: 200_000,
            budget: 1 << 24,
            max_counterexamples: 20,
            fault: None,
        }
    }
}

impl ClassicalConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = io::read_json(path).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        if let Some(t) = self.t_values.iter().find(|&&t| t < 2) {
            return Err(Error::Parameter(format!(
                "t = {t} refused: the candidate-union guarantee only holds for t >= 2"
            )));
        }
        if self.marker_n_min > self.marker_n_max {
            return Err(Error::Config("marker_n_min exceeds marker_n_max".into()));
        }
        if self.random_q_max < 2 || self.enumerate_q_max < 2 {
            return Err(Error::Config("alphabet bounds must be at least 2".into()));
        }
        Ok(())
    }
}
