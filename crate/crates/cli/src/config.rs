//! Flat TOML experiment configuration.
//!
//! ```toml
//! n_clients = 20
//! k_select = [5, 10]
//! rounds = 10
//! seeds = [0, 1, 2]
//! poisoners = 3
//! ```
//!
//! Every other key is optional; see [`ExperimentConfig`] for defaults.

use std::path::{Path, PathBuf};

use afl_core::auction::{ExperimentSpec, Mechanism, RoundSettings};
use afl_core::{
    AggregationConfig, Algorithm, LedgerMode, MarketParams, PoisonConfig, Regime, ReputationParams,
    TamperConfig,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<usize> {
        match self {
            OneOrMany::One(k) => vec![*k],
            OneOrMany::Many(ks) => ks.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_clients: usize,
    /// A single k or a list of k values.
    pub k_select: OneOrMany,
    #[serde(default = "default_rounds")]
    pub rounds: u64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_regimes")]
    pub regimes: Vec<Regime>,
    /// Also run the price-first and randomized auctions.
    #[serde(default = "default_true")]
    pub baselines: bool,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    pub local_epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub prox_mu: Option<f64>,
    #[serde(default = "default_weight")]
    pub w1: f64,
    #[serde(default = "default_weight")]
    pub w2: f64,
    #[serde(default)]
    pub poisoners: usize,
    #[serde(default = "default_flip_rate")]
    pub flip_rate: f64,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub betas: Vec<f64>,
    #[serde(default = "default_ledger_mode")]
    pub ledger_mode: LedgerMode,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_rounds() -> u64 {
    10
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_lambda() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    2.0
}
fn default_regimes() -> Vec<Regime> {
    vec![Regime::Complete, Regime::Incomplete]
}
fn default_true() -> bool {
    true
}
fn default_algorithm() -> Algorithm {
    Algorithm::FedAvg
}
fn default_weight() -> f64 {
    0.5
}
fn default_flip_rate() -> f64 {
    0.8
}
fn default_ledger_mode() -> LedgerMode {
    LedgerMode::Chained
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn invalid(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(invalid)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let ks = self.k_select.values();
        if ks.is_empty() {
            return Err(invalid("k_select must name at least one value"));
        }
        for &k in &ks {
            if k == 0 || k > self.n_clients {
                return Err(invalid(format!(
                    "k_select ≤ n_clients violated: k_select = {k}, n_clients = {}",
                    self.n_clients
                )));
            }
            MarketParams::new(self.lambda, self.delta, self.n_clients, k, Regime::Complete)
                .map_err(invalid)?;
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds must not be empty"));
        }
        if self.regimes.is_empty() && !self.baselines {
            return Err(invalid("nothing to run: no regimes and baselines = false"));
        }
        ReputationParams::new(self.w1, self.w2).map_err(invalid)?;
        PoisonConfig::new(self.flip_rate, []).map_err(invalid)?;
        if self.poisoners > self.n_clients {
            return Err(invalid(format!(
                "poisoners ≤ n_clients violated: poisoners = {}, n_clients = {}",
                self.poisoners, self.n_clients
            )));
        }
        if self.alphas.is_empty() != self.betas.is_empty() {
            return Err(invalid(
                "alphas and betas must both be set or both be empty",
            ));
        }
        for &alpha in &self.alphas {
            for &beta in &self.betas {
                TamperConfig::new(alpha, beta, 0).map_err(invalid)?;
            }
        }
        self.aggregation()?;
        Ok(())
    }

    pub fn aggregation(&self) -> Result<AggregationConfig, CliError> {
        let standard = AggregationConfig::standard(self.algorithm);
        AggregationConfig::new(
            self.algorithm,
            self.local_epochs.unwrap_or(standard.local_epochs),
            self.learning_rate.unwrap_or(standard.learning_rate),
            self.prox_mu.unwrap_or(standard.prox_mu),
        )
        .map_err(invalid)
    }

    pub fn mechanisms(&self) -> Vec<Mechanism> {
        Mechanism::ALL
            .into_iter()
            .filter(|m| match m.regime() {
                Some(r) => self.regimes.contains(&r),
                None => self.baselines,
            })
            .collect()
    }

    /// Contract mechanism whose ledger and reputations are exported.
    pub fn reputation_mechanism(&self) -> Option<Mechanism> {
        [Regime::Incomplete, Regime::Complete]
            .into_iter()
            .find(|r| self.regimes.contains(r))
            .map(Mechanism::ours)
    }

    pub fn spec(&self) -> Result<ExperimentSpec, CliError> {
        let mut spec = ExperimentSpec::new(
            self.n_clients,
            self.k_select.values(),
            self.rounds,
            self.seeds.clone(),
        );
        spec.lambda = self.lambda;
        spec.delta = self.delta;
        spec.mechanisms = self.mechanisms();
        spec.aggregation = self.aggregation()?;
        spec.settings = RoundSettings {
            reputation: ReputationParams::new(self.w1, self.w2).map_err(invalid)?,
            ..RoundSettings::default()
        };
        spec.poisoners = self.poisoners;
        spec.flip_rate = self.flip_rate;
        spec.ledger_mode = self.ledger_mode;
        spec.validate().map_err(invalid)?;
        Ok(spec)
    }

    /// SHA-256 of the fully resolved configuration, output directory excluded.
    pub fn hash(&self) -> String {
        let resolved = ExperimentConfig {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        let canonical = toml::to_string(&resolved).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
