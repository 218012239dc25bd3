//! Round orchestration and the baseline auctions it is compared with.
//!
//! A round of the contract mechanism offers every client the contract for its
//! type, keeps the clients whose utility is nonnegative, picks the `k` most
//! reputable among them, trains and aggregates their models, and finally
//! measures every participant's contribution to update reputations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flsim::{
    aggregate, local_train, poison, realized_contribution, AggregationConfig, GeneratorConfig,
    LocalUpdate, ModelParams, PoisonConfig, SyntheticDataset,
};
use crate::ledger::{
    tamper_attack, ChainedLedger, LedgerMode, PlainStore, ReputationStore, TamperConfig,
};
use crate::mechanism::{self, Contract, Efficiency, MarketParams, Regime};
use crate::reputation::{
    banzhaf_exact, banzhaf_mc, select_top_k, Additive, CoalitionUtility, ReputationParams,
    ReputationState, Retrain, UtilityMode, EXACT_LIMIT,
};
use crate::ClientId;

/// Largest participant set for which the retrain utility is used.
pub const RETRAIN_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Behavior {
    Honest,
    Poisoner(PoisonConfig),
}

impl Behavior {
    pub fn label(&self) -> &'static str {
        match self {
            Behavior::Honest => "honest",
            Behavior::Poisoner(_) => "poisoner",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientProfile {
    pub id: ClientId,
    pub theta: Efficiency,
    pub behavior: Behavior,
    pub data: SyntheticDataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    OursComplete,
    OursIncomplete,
    PriceFirst,
    Randomized,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [
        Mechanism::OursComplete,
        Mechanism::OursIncomplete,
        Mechanism::PriceFirst,
        Mechanism::Randomized,
    ];

    pub fn ours(regime: Regime) -> Self {
        match regime {
            Regime::Complete => Mechanism::OursComplete,
            Regime::Incomplete => Mechanism::OursIncomplete,
        }
    }

    pub fn regime(self) -> Option<Regime> {
        match self {
            Mechanism::OursComplete => Some(Regime::Complete),
            Mechanism::OursIncomplete => Some(Regime::Incomplete),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::OursComplete => "ours-complete",
            Mechanism::OursIncomplete => "ours-incomplete",
            Mechanism::PriceFirst => "price-first",
            Mechanism::Randomized => "randomized",
        }
    }
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What one selected client agreed to and received.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClientOutcome {
    pub id: ClientId,
    pub contract: Contract,
    /// Measured test-accuracy gain of the client's local model. For baselines
    /// this is the delivered output, i.e. the common target.
    pub realized_q: f64,
    pub payment: f64,
    pub cost: f64,
    pub client_utility: f64,
}

/// Contribution and updated reputation of a participating client.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReputationUpdate {
    pub id: ClientId,
    pub realized_q: f64,
    pub zeta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u64,
    pub mechanism: Mechanism,
    pub regime: Option<Regime>,
    pub k: usize,
    pub seed: u64,
    pub accepted: Vec<ClientId>,
    pub selected: Vec<ClientId>,
    pub outcomes: Vec<ClientOutcome>,
    pub reputations: Vec<ReputationUpdate>,
    pub server_utility: f64,
    pub accuracy_global: Option<f64>,
}

impl RoundReport {
    pub fn client_utilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.outcomes.iter().map(|o| o.client_utility)
    }

    pub fn total_payment(&self) -> f64 {
        self.outcomes.iter().map(|o| o.payment).sum()
    }
}

/// Round-invariant knobs of the contract mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSettings {
    pub reputation: ReputationParams,
    pub utility_mode: UtilityMode,
    /// Coalition samples per client once exact enumeration is out of reach.
    pub banzhaf_samples: usize,
}

impl Default for RoundSettings {
    fn default() -> Self {
        RoundSettings {
            reputation: ReputationParams::default(),
            utility_mode: UtilityMode::Additive,
            banzhaf_samples: 256,
        }
    }
}

/// Learning state carried from round to round.
#[derive(Debug, Clone)]
pub struct FlState {
    pub global: ModelParams,
    pub aggregation: AggregationConfig,
    pub test: SyntheticDataset,
}

impl FlState {
    pub fn new(
        test: SyntheticDataset,
        mut aggregation: AggregationConfig,
        n_clients: usize,
    ) -> Self {
        aggregation.control_variates.population = n_clients;
        FlState {
            global: ModelParams::zeros(test.dim()),
            aggregation,
            test,
        }
    }
}

/// SplitMix64 finaliser, used to derive independent sub-seeds.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9e37_79b9_7f4a_7c15u64, |acc, &p| {
        let mut z = acc ^ p.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}

/// Transfer a client's contract schedule pays for output `q`: its cost, plus
/// the information rent when the server cannot observe efficiency.
fn scheduled_transfer(q: f64, theta: Efficiency, params: &MarketParams) -> f64 {
    let q = q.max(0.0);
    let cost = q * q / (1.0 + params.delta * theta.get());
    match params.regime {
        Regime::Complete => cost,
        Regime::Incomplete => {
            cost + mechanism::information_rent(theta, q, params.delta).unwrap_or(0.0)
        }
    }
}

fn banzhaf_all(u: &impl CoalitionUtility, n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    (0..n)
        .map(|i| {
            if n <= EXACT_LIMIT {
                banzhaf_exact(u, n, i)
            } else {
                banzhaf_mc(u, n, i, samples, mix_seed(&[seed, i as u64]))
            }
        })
        .collect()
}

/// One round of the contract mechanism.
#[allow(clippy::too_many_arguments)]
pub fn run_round(
    population: &[ClientProfile],
    params: &MarketParams,
    rep: &mut ReputationState,
    ledger: &mut dyn ReputationStore,
    fl: &mut FlState,
    settings: &RoundSettings,
    round: u64,
    seed: u64,
) -> Result<RoundReport> {
    if population.is_empty() {
        return Err(Error::Empty("client population"));
    }

    // Offer contracts and keep the clients who would not lose by accepting.
    let mut accepted = Vec::new();
    for client in population {
        let contract = mechanism::solve(client.theta, params);
        let utility = mechanism::client_utility(contract, client.theta, params.delta)?;
        if utility >= 0.0 {
            accepted.push((client, contract));
        }
    }
    if accepted.is_empty() {
        return Err(Error::NoParticipants);
    }

    // Rank participants by the reputation the store is willing to vouch for.
    let snapshot = ReputationState::from_epsilons(accepted.iter().map(|(c, _)| {
        let eps = ledger.read_reputation(c.id).map_or(0.0, |(e, _)| e);
        (c.id, eps)
    }));
    let selected = select_top_k(&snapshot, params.k_select.min(accepted.len()))?;

    // Every participant trains so its contribution can be measured; only the
    // selected updates reach the global model.
    let global_before = fl.global.clone();
    let updates: Vec<LocalUpdate> = accepted
        .par_iter()
        .map(|(client, _)| {
            let data = match &client.behavior {
                Behavior::Honest => std::borrow::Cow::Borrowed(&client.data),
                Behavior::Poisoner(cfg) => std::borrow::Cow::Owned(poison(
                    &client.data,
                    cfg,
                    mix_seed(&[seed, round, client.id as u64]),
                )),
            };
            local_train(&global_before, &data, &fl.aggregation)
        })
        .collect::<Result<_>>()?;
    let chosen: Vec<LocalUpdate> = accepted
        .iter()
        .zip(&updates)
        .filter(|((c, _), _)| selected.contains(&c.id))
        .map(|(_, u)| u.clone())
        .collect();
    fl.global = aggregate(&chosen, &mut fl.aggregation)?;
    let accuracy_global = crate::flsim::evaluate_accuracy(&fl.global, &fl.test)?;

    let realized: Vec<f64> = updates
        .par_iter()
        .map(|u| realized_contribution(&global_before, &u.params, &fl.test))
        .collect::<Result<_>>()?;

    let n = accepted.len();
    let zetas = match settings.utility_mode {
        UtilityMode::Retrain if n <= RETRAIN_LIMIT => {
            let locals: Vec<ModelParams> = updates.iter().map(|u| u.params.clone()).collect();
            let counts: Vec<usize> = updates.iter().map(|u| u.samples).collect();
            let retrain = Retrain::new(&global_before, &locals, &counts, &fl.test)?;
            banzhaf_all(
                &retrain,
                n,
                settings.banzhaf_samples,
                mix_seed(&[seed, round]),
            )?
            .into_iter()
            .map(|g| g * params.lambda)
            .collect()
        }
        _ => {
            let values = accepted
                .iter()
                .zip(&realized)
                .map(|((c, _), &q)| {
                    mechanism::server_value(q, params.lambda)
                        - scheduled_transfer(q, c.theta, params)
                })
                .collect();
            let additive = Additive { values };
            banzhaf_all(
                &additive,
                n,
                settings.banzhaf_samples,
                mix_seed(&[seed, round]),
            )?
        }
    };

    let mut reputations = Vec::with_capacity(n);
    for (((client, _), &q), &zeta) in accepted.iter().zip(&realized).zip(&zetas) {
        rep.set_epsilon(client.id, snapshot.epsilon(client.id));
        let epsilon = rep.record(client.id, round, zeta, &settings.reputation)?;
        ledger.append(round, client.id, zeta, epsilon)?;
        reputations.push(ReputationUpdate {
            id: client.id,
            realized_q: q,
            zeta,
            epsilon,
        });
    }

    let outcomes: Vec<ClientOutcome> = selected
        .iter()
        .map(|&id| {
            let (idx, (client, contract)) = accepted
                .iter()
                .enumerate()
                .find(|(_, (c, _))| c.id == id)
                .expect("selected clients were accepted");
            let cost = mechanism::cost(contract.q, client.theta, params.delta)?;
            Ok(ClientOutcome {
                id,
                contract: *contract,
                realized_q: realized[idx],
                payment: contract.r,
                cost,
                client_utility: contract.r - cost,
            })
        })
        .collect::<Result<_>>()?;
    let server_utility = outcomes
        .iter()
        .map(|o| mechanism::server_utility_per_client(o.contract, params))
        .sum();

    Ok(RoundReport {
        round,
        mechanism: Mechanism::ours(params.regime),
        regime: Some(params.regime),
        k: params.k_select,
        seed,
        accepted: accepted.iter().map(|(c, _)| c.id).collect(),
        selected,
        outcomes,
        reputations,
        server_utility,
        accuracy_global: Some(accuracy_global),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub client_id: ClientId,
    pub price: f64,
}

/// Sealed bids at a common output: true cost times a uniform markup in `[0, 0.3]`.
pub fn generate_bids(
    population: &[ClientProfile],
    target_q: f64,
    delta: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Bid>> {
    population
        .iter()
        .map(|c| {
            let cost = mechanism::cost(target_q, c.theta, delta)?;
            let margin: f64 = rng.random_range(0.0..=0.3);
            Ok(Bid {
                client_id: c.id,
                price: cost * (1.0 + margin),
            })
        })
        .collect()
}

/// Median contracted output of the incomplete-information menu over `population`.
pub fn baseline_target_output(population: &[ClientProfile], params: &MarketParams) -> f64 {
    let mut qs: Vec<f64> = population
        .iter()
        .map(|c| mechanism::solve_incomplete(c.theta, params).q)
        .collect();
    if qs.is_empty() {
        return 0.0;
    }
    qs.sort_by(f64::total_cmp);
    let m = qs.len() / 2;
    if qs.len() % 2 == 1 {
        qs[m]
    } else {
        (qs[m - 1] + qs[m]) / 2.0
    }
}

fn check_bids(population: &[ClientProfile], bids: &[Bid], k: usize) -> Result<()> {
    if k > bids.len() {
        return Err(Error::SelectionTooLarge {
            k,
            population: bids.len(),
        });
    }
    for c in population {
        if !bids.iter().any(|b| b.client_id == c.id) {
            return Err(Error::Domain(format!("client {} has no bid", c.id)));
        }
    }
    if let Some(b) = bids.iter().find(|b| b.price.is_nan() || b.price < 0.0) {
        return Err(Error::Domain(format!(
            "bid of client {} is negative",
            b.client_id
        )));
    }
    Ok(())
}

fn pay_as_bid(
    mechanism: Mechanism,
    population: &[ClientProfile],
    winners: Vec<&Bid>,
    target_q: f64,
    params: &MarketParams,
    round: u64,
    seed: u64,
) -> Result<RoundReport> {
    let outcomes: Vec<ClientOutcome> = winners
        .iter()
        .map(|b| {
            let client = population
                .iter()
                .find(|c| c.id == b.client_id)
                .ok_or(Error::UnknownClient(b.client_id))?;
            let cost = mechanism::cost(target_q, client.theta, params.delta)?;
            Ok(ClientOutcome {
                id: b.client_id,
                contract: Contract {
                    q: target_q,
                    r: b.price,
                },
                realized_q: target_q,
                payment: b.price,
                cost,
                client_utility: b.price - cost,
            })
        })
        .collect::<Result<_>>()?;
    let server_utility = outcomes
        .iter()
        .map(|o| mechanism::server_value(o.realized_q, params.lambda) - o.payment)
        .sum();
    Ok(RoundReport {
        round,
        mechanism,
        regime: None,
        k: params.k_select,
        seed,
        accepted: population.iter().map(|c| c.id).collect(),
        selected: outcomes.iter().map(|o| o.id).collect(),
        outcomes,
        reputations: Vec::new(),
        server_utility,
        accuracy_global: None,
    })
}

/// Pays the `k` cheapest bids (ties by id) their asking price.
pub fn baseline_price_first(
    population: &[ClientProfile],
    bids: &[Bid],
    k: usize,
    target_q: f64,
    params: &MarketParams,
) -> Result<RoundReport> {
    check_bids(population, bids, k)?;
    let mut ranked: Vec<&Bid> = bids.iter().collect();
    ranked.sort_by(|a, b| {
        a.price
            .total_cmp(&b.price)
            .then(a.client_id.cmp(&b.client_id))
    });
    ranked.truncate(k);
    pay_as_bid(
        Mechanism::PriceFirst,
        population,
        ranked,
        target_q,
        params,
        0,
        0,
    )
}

/// Pays `k` bidders drawn uniformly at random their asking price.
pub fn baseline_randomized(
    population: &[ClientProfile],
    bids: &[Bid],
    k: usize,
    target_q: f64,
    params: &MarketParams,
    seed: u64,
) -> Result<RoundReport> {
    check_bids(population, bids, k)?;
    let mut pool: Vec<&Bid> = bids.iter().collect();
    pool.sort_by_key(|b| b.client_id);
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    pool.truncate(k);
    pool.sort_by_key(|b| b.client_id);
    pay_as_bid(
        Mechanism::Randomized,
        population,
        pool,
        target_q,
        params,
        0,
        seed,
    )
}

/// Reputation-store attack applied after every round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TamperSpec {
    pub alpha: f64,
    pub beta: f64,
}

/// Full description of an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub n_clients: usize,
    pub k_values: Vec<usize>,
    pub rounds: u64,
    pub seeds: Vec<u64>,
    pub lambda: f64,
    pub delta: f64,
    pub mechanisms: Vec<Mechanism>,
    pub aggregation: AggregationConfig,
    pub settings: RoundSettings,
    pub poisoners: usize,
    pub flip_rate: f64,
    pub generator: GeneratorConfig,
    pub ledger_mode: LedgerMode,
    pub tamper: Option<TamperSpec>,
}

impl ExperimentSpec {
    pub fn new(n_clients: usize, k_values: Vec<usize>, rounds: u64, seeds: Vec<u64>) -> Self {
        ExperimentSpec {
            n_clients,
            k_values,
            rounds,
            seeds,
            lambda: 1.0,
            delta: 2.0,
            mechanisms: Mechanism::ALL.to_vec(),
            aggregation: AggregationConfig::standard(crate::flsim::Algorithm::FedAvg),
            settings: RoundSettings::default(),
            poisoners: 0,
            flip_rate: 0.8,
            generator: GeneratorConfig::default(),
            ledger_mode: LedgerMode::Chained,
            tamper: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &k in &self.k_values {
            MarketParams::new(self.lambda, self.delta, self.n_clients, k, Regime::Complete)?;
        }
        if self.poisoners > self.n_clients {
            return Err(Error::Domain(format!(
                "poisoner count {} exceeds n_clients {}",
                self.poisoners, self.n_clients
            )));
        }
        PoisonConfig::new(self.flip_rate, [])?;
        if let Some(t) = self.tamper {
            TamperConfig::new(t.alpha, t.beta, 0)?;
        }
        Ok(())
    }
}

/// Client population for `seed`: uniform efficiencies, `poisoners` attackers
/// chosen at random, datasets from `generator`.
pub fn build_population(
    n_clients: usize,
    poisoners: usize,
    flip_rate: f64,
    generator: &GeneratorConfig,
    seed: u64,
) -> Result<(Vec<ClientProfile>, SyntheticDataset)> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, 0x7e7a]));
    let thetas: Vec<Efficiency> = (0..n_clients)
        .map(|_| Efficiency::new(rng.random_range(0.0..=1.0)))
        .collect::<Result<_>>()?;
    let mut ids: Vec<ClientId> = (0..n_clients).collect();
    ids.shuffle(&mut rng);
    let poison = PoisonConfig::new(flip_rate, ids.into_iter().take(poisoners))?;
    let (datasets, test) = generator.population(&thetas, seed)?;
    let population = datasets
        .into_iter()
        .zip(thetas)
        .enumerate()
        .map(|(id, (data, theta))| ClientProfile {
            id,
            theta,
            behavior: if poison.targets(id) {
                Behavior::Poisoner(poison.clone())
            } else {
                Behavior::Honest
            },
            data,
        })
        .collect();
    Ok((population, test))
}

/// Runs the contract mechanism for `rounds` rounds on one population.
#[allow(clippy::too_many_arguments)]
pub fn run_mechanism(
    population: &[ClientProfile],
    test: &SyntheticDataset,
    params: &MarketParams,
    aggregation: &AggregationConfig,
    settings: &RoundSettings,
    store: &mut dyn ReputationStore,
    rounds: u64,
    tamper: Option<TamperSpec>,
    seed: u64,
) -> Result<Vec<RoundReport>> {
    let mut rep = ReputationState::new(population.len());
    let mut fl = FlState::new(test.clone(), aggregation.clone(), population.len());
    let mut reports = Vec::with_capacity(rounds as usize);
    for round in 1..=rounds {
        let mut report = run_round(
            population, params, &mut rep, store, &mut fl, settings, round, seed,
        )?;
        report.seed = seed;
        reports.push(report);
        if let Some(t) = tamper {
            tamper_attack(store, &TamperConfig::new(t.alpha, t.beta, seed)?);
        }
    }
    Ok(reports)
}

/// Runs a baseline auction for `rounds` rounds with fresh bids each round.
pub fn run_baseline(
    mechanism: Mechanism,
    population: &[ClientProfile],
    params: &MarketParams,
    rounds: u64,
    seed: u64,
) -> Result<Vec<RoundReport>> {
    let target_q = baseline_target_output(population, params);
    (1..=rounds)
        .map(|round| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(mix_seed(&[seed, round, params.k_select as u64, 0xb1d]));
            let bids = generate_bids(population, target_q, params.delta, &mut rng)?;
            let mut report = match mechanism {
                Mechanism::PriceFirst => {
                    baseline_price_first(population, &bids, params.k_select, target_q, params)?
                }
                Mechanism::Randomized => baseline_randomized(
                    population,
                    &bids,
                    params.k_select,
                    target_q,
                    params,
                    mix_seed(&[seed, round, 0x5e1]),
                )?,
                other => {
                    return Err(Error::Domain(format!("{other} is not a baseline")));
                }
            };
            report.round = round;
            report.seed = seed;
            Ok(report)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub mechanism: Mechanism,
    pub k: usize,
    /// Mean over seeds of the server utility summed over all rounds.
    pub mean_utility: f64,
    pub std_utility: f64,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentSummary {
    pub reports: Vec<RoundReport>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentSummary {
    pub fn row(&self, mechanism: Mechanism, k: usize) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.mechanism == mechanism && r.k == k)
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn fresh_store(mode: LedgerMode) -> Box<dyn ReputationStore + Send> {
    match mode {
        LedgerMode::Chained => Box::new(ChainedLedger::new()),
        LedgerMode::Vulnerable => Box::new(PlainStore::new()),
    }
}

/// Every (seed, k, mechanism) cell of the grid. Cells run in parallel and are
/// merged back in grid order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    if spec.rounds == 0 {
        return Ok(ExperimentSummary::default());
    }
    let populations: Vec<(Vec<ClientProfile>, SyntheticDataset)> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            build_population(
                spec.n_clients,
                spec.poisoners,
                spec.flip_rate,
                &spec.generator,
                seed,
            )
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (si, &seed) in spec.seeds.iter().enumerate() {
        for &k in &spec.k_values {
            for &m in &spec.mechanisms {
                cells.push((si, seed, k, m));
            }
        }
    }
    let results: Vec<Vec<RoundReport>> = cells
        .par_iter()
        .map(|&(si, seed, k, m)| {
            let (population, test) = &populations[si];
            let regime = m.regime().unwrap_or(Regime::Incomplete);
            let params = MarketParams::new(spec.lambda, spec.delta, spec.n_clients, k, regime)?;
            match m.regime() {
                Some(_) => {
                    let mut store = fresh_store(spec.ledger_mode);
                    run_mechanism(
                        population,
                        test,
                        &params,
                        &spec.aggregation,
                        &spec.settings,
                        store.as_mut(),
                        spec.rounds,
                        spec.tamper,
                        seed,
                    )
                }
                None => run_baseline(m, population, &params, spec.rounds, seed),
            }
            .map(|mut reports| {
                reports.iter_mut().for_each(|r| r.k = k);
                reports
            })
        })
        .collect::<Result<_>>()?;

    let mut summary = Vec::new();
    for &k in &spec.k_values {
        for &m in &spec.mechanisms {
            let totals: Vec<f64> = cells
                .iter()
                .zip(&results)
                .filter(|((_, _, ck, cm), _)| *ck == k && *cm == m)
                .map(|(_, reports)| reports.iter().map(|r| r.server_utility).sum())
                .collect();
            let (mean, std) = mean_std(&totals);
            summary.push(SummaryRow {
                mechanism: m,
                k,
                mean_utility: mean,
                std_utility: std,
                seeds: totals.len(),
            });
        }
    }
    Ok(ExperimentSummary {
        reports: results.into_iter().flatten().collect(),
        summary,
    })
}

/// Mean server utility of one tamper scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub alpha: f64,
    pub beta: f64,
    pub ledger_mode: LedgerMode,
    /// Averaged over seeds and k values.
    pub mean_utility: f64,
}

/// Runs `mechanism` under every (alpha, beta) attack against both store kinds.
pub fn run_robustness(
    spec: &ExperimentSpec,
    mechanism: Mechanism,
    alphas: &[f64],
    betas: &[f64],
) -> Result<Vec<RobustnessRow>> {
    if mechanism.regime().is_none() {
        return Err(Error::Domain(format!("{mechanism} keeps no reputation")));
    }
    let mut rows = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            for mode in [LedgerMode::Chained, LedgerMode::Vulnerable] {
                let cell = ExperimentSpec {
                    mechanisms: vec![mechanism],
                    ledger_mode: mode,
                    tamper: Some(TamperSpec { alpha, beta }),
                    ..spec.clone()
                };
                let result = run_experiment(&cell)?;
                let means: Vec<f64> = result.summary.iter().map(|r| r.mean_utility).collect();
                rows.push(RobustnessRow {
                    alpha,
                    beta,
                    ledger_mode: mode,
                    mean_utility: mean_std(&means).0,
                });
            }
        }
    }
    Ok(rows)
}
