//! Experiment runner behind the `afl` binary.

pub mod app;
pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use afl_core::auction::{build_population, run_experiment, run_mechanism, run_robustness};
use afl_core::mechanism::{client_utility, information_rent, server_utility_per_client, solve};
use afl_core::{ChainStatus, ChainedLedger, Efficiency, ExperimentSummary, MarketParams, Regime};

pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Runtime(_) => 2,
        }
    }
}

impl From<afl_core::Error> for CliError {
    fn from(e: afl_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub const ROUNDS_CSV: &str = "rounds.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const REPUTATION_CSV: &str = "reputation.csv";
pub const ROBUSTNESS_CSV: &str = "robustness.csv";
pub const LEDGER_BIN: &str = "ledger.bin";
pub const LEDGER_JSONL: &str = "ledger.jsonl";

/// Files written by [`cmd_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutputs {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Opens `path` and writes the provenance comment followed by the CSV header.
fn csv_writer(
    path: &Path,
    provenance: &str,
    header: &[&str],
) -> Result<csv::Writer<fs::File>, CliError> {
    let mut file = fs::File::create(path)?;
    writeln!(file, "{provenance}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    Ok(w)
}

fn provenance(config: &ExperimentConfig) -> String {
    let seeds: Vec<String> = config.seeds.iter().map(u64::to_string).collect();
    format!("# config_hash={} seeds={}", config.hash(), seeds.join(";"))
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn write_rounds(path: &Path, prov: &str, result: &ExperimentSummary) -> Result<(), CliError> {
    let mut w = csv_writer(
        path,
        prov,
        &[
            "mechanism",
            "k",
            "seed",
            "round",
            "accepted",
            "selected",
            "server_utility",
            "total_payment",
            "accuracy",
        ],
    )?;
    for r in &result.reports {
        w.write_record([
            r.mechanism.name().to_string(),
            r.k.to_string(),
            r.seed.to_string(),
            r.round.to_string(),
            r.accepted.len().to_string(),
            join_ids(&r.selected),
            r.server_utility.to_string(),
            r.total_payment().to_string(),
            r.accuracy_global.map(|a| a.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(path: &Path, prov: &str, result: &ExperimentSummary) -> Result<(), CliError> {
    let mut w = csv_writer(
        path,
        prov,
        &["mechanism", "k", "mean_utility", "std_utility"],
    )?;
    for row in &result.summary {
        w.write_record([
            row.mechanism.name().to_string(),
            row.k.to_string(),
            row.mean_utility.to_string(),
            row.std_utility.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_reputation(
    path: &Path,
    prov: &str,
    config: &ExperimentConfig,
    result: &ExperimentSummary,
) -> Result<(), CliError> {
    let spec = config.spec()?;
    let mut w = csv_writer(
        path,
        prov,
        &[
            "mechanism",
            "k",
            "seed",
            "round",
            "client",
            "epsilon",
            "behavior",
        ],
    )?;
    for &seed in &config.seeds {
        let (population, _) = build_population(
            spec.n_clients,
            spec.poisoners,
            spec.flip_rate,
            &spec.generator,
            seed,
        )?;
        for r in result
            .reports
            .iter()
            .filter(|r| r.seed == seed && r.regime.is_some())
        {
            for u in &r.reputations {
                w.write_record([
                    r.mechanism.name().to_string(),
                    r.k.to_string(),
                    r.seed.to_string(),
                    r.round.to_string(),
                    u.id.to_string(),
                    u.epsilon.to_string(),
                    population[u.id].behavior.label().to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_robustness(path: &Path, prov: &str, config: &ExperimentConfig) -> Result<(), CliError> {
    let mut w = csv_writer(
        path,
        prov,
        &["alpha", "beta", "ledger_mode", "mean_utility"],
    )?;
    if let (Some(mechanism), false) = (config.reputation_mechanism(), config.alphas.is_empty()) {
        let rows = run_robustness(&config.spec()?, mechanism, &config.alphas, &config.betas)?;
        for row in rows {
            w.write_record([
                row.alpha.to_string(),
                row.beta.to_string(),
                row.ledger_mode.to_string(),
                row.mean_utility.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Untampered ledger of the first seed and first k.
fn export_ledger(config: &ExperimentConfig) -> Result<Option<ChainedLedger>, CliError> {
    let Some(mechanism) = config.reputation_mechanism() else {
        return Ok(None);
    };
    if config.rounds == 0 {
        return Ok(Some(ChainedLedger::new()));
    }
    let spec = config.spec()?;
    let seed = config.seeds[0];
    let params = MarketParams::new(
        spec.lambda,
        spec.delta,
        spec.n_clients,
        spec.k_values[0],
        mechanism.regime().unwrap_or(Regime::Incomplete),
    )?;
    let (population, test) = build_population(
        spec.n_clients,
        spec.poisoners,
        spec.flip_rate,
        &spec.generator,
        seed,
    )?;
    let mut ledger = ChainedLedger::new();
    run_mechanism(
        &population,
        &test,
        &params,
        &spec.aggregation,
        &spec.settings,
        &mut ledger,
        spec.rounds,
        None,
        seed,
    )?;
    Ok(Some(ledger))
}

/// Runs the experiment grid and writes every output file into `out`
/// (or the configured output directory).
pub fn cmd_run(config: &ExperimentConfig, out: Option<&Path>) -> Result<RunOutputs, CliError> {
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.output_dir.clone());
    fs::create_dir_all(&dir)?;
    let spec = config.spec()?;
    let result = run_experiment(&spec)?;
    let prov = provenance(config);

    let mut files = Vec::new();
    let mut target = |name: &str| {
        let p = dir.join(name);
        files.push(p.clone());
        p
    };
    write_rounds(&target(ROUNDS_CSV), &prov, &result)?;
    write_summary(&target(SUMMARY_CSV), &prov, &result)?;
    write_reputation(&target(REPUTATION_CSV), &prov, config, &result)?;
    write_robustness(&target(ROBUSTNESS_CSV), &prov, config)?;
    if let Some(ledger) = export_ledger(config)? {
        ledger.write_to(target(LEDGER_BIN))?;
        fs::write(target(LEDGER_JSONL), ledger.to_json_lines())?;
    }
    Ok(RunOutputs { dir, files })
}

/// Verifies a ledger file. Returns the message to print on success.
pub fn cmd_verify_ledger(path: &Path) -> Result<String, CliError> {
    let ledger = ChainedLedger::read_from(path).map_err(|e| match e {
        afl_core::Error::Format(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => CliError::Runtime(format!("{}: {other}", path.display())),
    })?;
    match ledger.verify_chain() {
        ChainStatus::Ok => Ok(format!("Ok ({} records)", ledger.records().len())),
        ChainStatus::FirstTamperedIndex(i) => {
            Err(CliError::Verification(format!("tampered at record {i}")))
        }
    }
}

/// One contract, formatted for spot checks.
pub fn cmd_solve(theta: f64, lambda: f64, delta: f64, regime: Regime) -> Result<String, CliError> {
    let config = |e: afl_core::Error| CliError::Config(e.to_string());
    let theta = Efficiency::new(theta).map_err(config)?;
    let params = MarketParams::new(lambda, delta, 1, 1, regime).map_err(config)?;
    let c = solve(theta, &params);
    let utility = client_utility(c, theta, delta)?;
    let rent = information_rent(theta, c.q, delta)?;
    Ok(format!(
        "regime={regime} theta={} q={} r={} client_utility={} information_rent={} server_utility={}",
        theta.get(),
        c.q,
        c.r,
        utility,
        if regime == Regime::Complete { 0.0 } else { rent },
        server_utility_per_client(c, &params),
    ))
}
