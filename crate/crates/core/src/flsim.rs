//! Desk-scale federated learning on synthetic data.
//!
//! Every client holds a sample of a two-class Gaussian mixture in
//! [`GeneratorConfig::dim`] dimensions. A client's efficiency controls how
//! much data it has and how clean its labels are, so efficient clients train
//! measurably better local models. The model is logistic regression with a
//! bias term, trained by full-batch gradient descent.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::Efficiency;
use crate::ClientId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Owner {
    Client(ClientId),
    Test,
}

/// Row-major feature matrix with 0/1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<u8>,
    /// Labels as drawn by the generator, before any label noise.
    true_labels: Vec<u8>,
    pub owner: Owner,
}

impl SyntheticDataset {
    pub fn new(dim: usize, features: Vec<f64>, labels: Vec<u8>, owner: Owner) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::LengthMismatch {
                what: "features vs dim * labels",
                left: features.len(),
                right: dim * labels.len(),
            });
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Domain("labels must be 0 or 1".into()));
        }
        Ok(SyntheticDataset {
            dim,
            features,
            true_labels: labels.clone(),
            labels,
            owner,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn true_labels(&self) -> &[u8] {
        &self.true_labels
    }

    /// Fraction of labels that differ from the generator's ground truth.
    pub fn noise_rate(&self) -> f64 {
        let flipped = self
            .labels
            .iter()
            .zip(&self.true_labels)
            .filter(|(a, b)| a != b)
            .count();
        flipped as f64 / self.len() as f64
    }

    /// Same samples with every label inverted.
    pub fn inverted(&self) -> SyntheticDataset {
        SyntheticDataset {
            labels: self.labels.iter().map(|l| 1 - l).collect(),
            ..self.clone()
        }
    }
}

/// Logistic-regression weights; the last entry is the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub weights: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(dim: usize) -> Self {
        ModelParams {
            weights: vec![0.0; dim + 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len().saturating_sub(1)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }

    #[inline]
    pub fn logit(&self, x: &[f64]) -> f64 {
        let (w, b) = self.weights.split_at(x.len());
        w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + b[0]
    }

    /// Class prediction; a logit of exactly zero (probability 0.5) maps to 0.
    #[inline]
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.logit(x) > 0.0)
    }

    pub fn distance(&self, other: &ModelParams) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    FedAvg,
    FedProx,
    Scaffold,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::FedAvg => "fedavg",
            Algorithm::FedProx => "fedprox",
            Algorithm::Scaffold => "scaffold",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fedavg" => Ok(Algorithm::FedAvg),
            "fedprox" => Ok(Algorithm::FedProx),
            "scaffold" => Ok(Algorithm::Scaffold),
            other => Err(Error::Domain(format!(
                "unknown aggregation algorithm {other:?}"
            ))),
        }
    }
}

/// Scaffold control variates. Entries are created lazily as zero vectors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ControlVariates {
    pub server: Vec<f64>,
    pub clients: BTreeMap<ClientId, Vec<f64>>,
    /// Total number of clients, used to scale the server variate update.
    pub population: usize,
}

impl ControlVariates {
    fn client(&self, id: Option<ClientId>, len: usize) -> Vec<f64> {
        id.and_then(|id| self.clients.get(&id).cloned())
            .unwrap_or_else(|| vec![0.0; len])
    }

    fn server(&self, len: usize) -> Vec<f64> {
        if self.server.is_empty() {
            vec![0.0; len]
        } else {
            self.server.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregationConfig {
    pub algo: Algorithm,
    pub local_epochs: usize,
    pub learning_rate: f64,
    /// Proximal coefficient, only read by FedProx.
    pub prox_mu: f64,
    /// Only read and updated by Scaffold.
    pub control_variates: ControlVariates,
}

impl AggregationConfig {
    pub fn new(
        algo: Algorithm,
        local_epochs: usize,
        learning_rate: f64,
        prox_mu: f64,
    ) -> Result<Self> {
        if local_epochs == 0 {
            return Err(Error::Domain("local_epochs must be positive".into()));
        }
        if !(learning_rate >= 0.0 && learning_rate.is_finite()) {
            return Err(Error::Domain(format!(
                "learning_rate must be nonnegative, got {learning_rate}"
            )));
        }
        if prox_mu.is_nan() || prox_mu < 0.0 {
            return Err(Error::Domain(format!(
                "prox_mu must be nonnegative, got {prox_mu}"
            )));
        }
        Ok(AggregationConfig {
            algo,
            local_epochs,
            learning_rate,
            prox_mu,
            control_variates: ControlVariates::default(),
        })
    }

    /// Defaults used by the experiment runner for `algo`.
    pub fn standard(algo: Algorithm) -> Self {
        AggregationConfig {
            algo,
            local_epochs: 10,
            learning_rate: 0.1,
            prox_mu: if algo == Algorithm::FedProx { 0.1 } else { 0.0 },
            control_variates: ControlVariates::default(),
        }
    }
}

/// Label-flipping attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoisonConfig {
    pub flip_rate: f64,
    pub target_clients: BTreeSet<ClientId>,
}

impl PoisonConfig {
    pub fn new(flip_rate: f64, target_clients: impl IntoIterator<Item = ClientId>) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip_rate) {
            return Err(Error::Domain(format!(
                "flip_rate {flip_rate} outside [0, 1]"
            )));
        }
        Ok(PoisonConfig {
            flip_rate,
            target_clients: target_clients.into_iter().collect(),
        })
    }

    pub fn targets(&self, id: ClientId) -> bool {
        self.target_clients.contains(&id)
    }
}

/// Shape of the synthetic population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub dim: usize,
    /// Distance of each class mean from the origin.
    pub separation: f64,
    /// Label-noise rate of a client with efficiency 0.
    pub noise_scale: f64,
    /// Sample count of a client with efficiency 0; efficiency 1 doubles it.
    pub base_samples: usize,
    pub test_samples: usize,
    /// Number of leading features whose mean depends on the class.
    pub informative: usize,
    /// Standard deviation of the remaining, class-independent features.
    pub nuisance_std: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            dim: 20,
            separation: 2.0,
            noise_scale: 0.4,
            base_samples: 200,
            test_samples: 2000,
            informative: 4,
            nuisance_std: 5.0,
        }
    }
}

impl GeneratorConfig {
    fn informative_count(&self) -> usize {
        self.informative.clamp(1, self.dim.max(1))
    }

    fn sample(
        &self,
        rng: &mut ChaCha8Rng,
        count: usize,
        noise: f64,
        owner: Owner,
    ) -> SyntheticDataset {
        let informative = self.informative_count();
        let offset = self.separation / (informative as f64).sqrt();
        let mut features = Vec::with_capacity(count * self.dim);
        let mut labels = Vec::with_capacity(count);
        let mut true_labels = Vec::with_capacity(count);
        for _ in 0..count {
            let y: u8 = u8::from(rng.random_bool(0.5));
            let sign = if y == 1 { 1.0 } else { -1.0 };
            for j in 0..self.dim {
                let z: f64 = rng.sample(StandardNormal);
                features.push(if j < informative {
                    sign * offset + z
                } else {
                    self.nuisance_std * z
                });
            }
            true_labels.push(y);
            labels.push(if rng.random_bool(noise) { 1 - y } else { y });
        }
        SyntheticDataset {
            dim: self.dim,
            features,
            labels,
            true_labels,
            owner,
        }
    }

    pub fn samples_for(&self, theta: Efficiency) -> usize {
        (self.base_samples as f64 * (1.0 + theta.get())).round() as usize
    }

    /// Client datasets plus a clean held-out test set, all determined by `seed`.
    pub fn population(
        &self,
        thetas: &[Efficiency],
        seed: u64,
    ) -> Result<(Vec<SyntheticDataset>, SyntheticDataset)> {
        if thetas.is_empty() {
            return Err(Error::Empty("client population"));
        }
        if self.dim == 0 || self.test_samples == 0 {
            return Err(Error::Domain(
                "dim and test_samples must be positive".into(),
            ));
        }
        let clients = thetas
            .iter()
            .enumerate()
            .map(|(i, &theta)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64 + 1);
                let noise = (1.0 - theta.get()) * self.noise_scale;
                let count = self.samples_for(theta).max(1);
                self.sample(&mut rng, count, noise, Owner::Client(i))
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        let test = self.sample(&mut rng, self.test_samples, 0.0, Owner::Test);
        Ok((clients, test))
    }
}

/// [`GeneratorConfig::population`] with the default generator.
pub fn generate_population(
    n_clients: usize,
    thetas: &[Efficiency],
    seed: u64,
) -> Result<(Vec<SyntheticDataset>, SyntheticDataset)> {
    if n_clients == 0 {
        return Err(Error::Empty("client population"));
    }
    if thetas.len() != n_clients {
        return Err(Error::LengthMismatch {
            what: "thetas vs n_clients",
            left: thetas.len(),
            right: n_clients,
        });
    }
    GeneratorConfig::default().population(thetas, seed)
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Gradient of the mean logistic loss at `model`.
pub fn logistic_gradient(model: &ModelParams, data: &SyntheticDataset) -> Vec<f64> {
    let d = data.dim();
    let mut grad = vec![0.0; d + 1];
    for i in 0..data.len() {
        let x = data.row(i);
        let err = sigmoid(model.logit(x)) - f64::from(data.labels[i]);
        for (g, xj) in grad[..d].iter_mut().zip(x) {
            *g += err * xj;
        }
        grad[d] += err;
    }
    let n = data.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    grad
}

/// Result of one client's local training.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUpdate {
    pub client: Option<ClientId>,
    pub params: ModelParams,
    pub samples: usize,
    /// Scaffold only: `c_i(new) - c_i(old)`.
    pub control_delta: Option<Vec<f64>>,
}

/// Runs `local_epochs` full-batch gradient steps starting from `global`.
pub fn local_train(
    global: &ModelParams,
    data: &SyntheticDataset,
    cfg: &AggregationConfig,
) -> Result<LocalUpdate> {
    if data.is_empty() {
        return Err(Error::Empty("training dataset"));
    }
    if !global.is_finite() {
        return Err(Error::Domain("global model has non-finite weights".into()));
    }
    if global.weights.len() != data.dim() + 1 {
        return Err(Error::LengthMismatch {
            what: "model weights vs data dim + 1",
            left: global.weights.len(),
            right: data.dim() + 1,
        });
    }
    let client = match data.owner {
        Owner::Client(id) => Some(id),
        Owner::Test => None,
    };
    let len = global.weights.len();
    let correction = (cfg.algo == Algorithm::Scaffold).then(|| {
        let c = cfg.control_variates.server(len);
        let ci = cfg.control_variates.client(client, len);
        (c, ci)
    });

    let lr = cfg.learning_rate;
    let mut w = global.clone();
    for _ in 0..cfg.local_epochs {
        let mut grad = logistic_gradient(&w, data);
        match (cfg.algo, &correction) {
            (Algorithm::FedProx, _) => {
                for ((g, wj), gj) in grad.iter_mut().zip(&w.weights).zip(&global.weights) {
                    *g += cfg.prox_mu * (wj - gj);
                }
            }
            (Algorithm::Scaffold, Some((c, ci))) => {
                for ((g, c), ci) in grad.iter_mut().zip(c).zip(ci) {
                    *g += c - ci;
                }
            }
            _ => {}
        }
        for (wj, g) in w.weights.iter_mut().zip(&grad) {
            *wj -= lr * g;
        }
    }

    let control_delta = correction.map(|(c, ci)| {
        if lr == 0.0 {
            return vec![0.0; len];
        }
        // Option II: c_i+ = c_i - c + (global - local) / (K lr)
        let steps = cfg.local_epochs as f64 * lr;
        global
            .weights
            .iter()
            .zip(&w.weights)
            .zip(c.iter().zip(&ci))
            .map(|((g, l), (c, ci))| {
                let updated = ci - c + (g - l) / steps;
                updated - ci
            })
            .collect()
    });

    Ok(LocalUpdate {
        client,
        params: w,
        samples: data.len(),
        control_delta,
    })
}

/// Sample-count weighted mean of `models`, reduced in input order.
pub fn weighted_average(models: &[&ModelParams], sample_counts: &[usize]) -> Result<ModelParams> {
    if models.is_empty() {
        return Err(Error::Empty("models to aggregate"));
    }
    if models.len() != sample_counts.len() {
        return Err(Error::LengthMismatch {
            what: "models vs sample counts",
            left: models.len(),
            right: sample_counts.len(),
        });
    }
    let len = models[0].weights.len();
    if let Some(bad) = models.iter().find(|m| m.weights.len() != len) {
        return Err(Error::LengthMismatch {
            what: "model widths",
            left: bad.weights.len(),
            right: len,
        });
    }
    let total: usize = sample_counts.iter().sum();
    if total == 0 {
        return Err(Error::Domain("total sample count is zero".into()));
    }
    // Averaging identical models must reproduce them bit for bit.
    if models.iter().all(|m| m.weights == models[0].weights) {
        return Ok(models[0].clone());
    }
    let mut out = vec![0.0; len];
    for (m, &n) in models.iter().zip(sample_counts) {
        for (o, w) in out.iter_mut().zip(&m.weights) {
            *o += n as f64 * w;
        }
    }
    out.iter_mut().for_each(|o| *o /= total as f64);
    Ok(ModelParams { weights: out })
}

/// Aggregates local updates into the next global model. For Scaffold this
/// also folds the clients' control-variate deltas into `cfg`.
pub fn aggregate(updates: &[LocalUpdate], cfg: &mut AggregationConfig) -> Result<ModelParams> {
    let models: Vec<&ModelParams> = updates.iter().map(|u| &u.params).collect();
    let counts: Vec<usize> = updates.iter().map(|u| u.samples).collect();
    let global = weighted_average(&models, &counts)?;

    if cfg.algo == Algorithm::Scaffold {
        let len = global.weights.len();
        let cv = &mut cfg.control_variates;
        if cv.server.is_empty() {
            cv.server = vec![0.0; len];
        }
        let mut mean_delta = vec![0.0; len];
        let mut contributors = 0usize;
        for u in updates {
            let Some(delta) = &u.control_delta else {
                continue;
            };
            contributors += 1;
            if let Some(id) = u.client {
                let ci = cv.clients.entry(id).or_insert_with(|| vec![0.0; len]);
                for (c, d) in ci.iter_mut().zip(delta) {
                    *c += d;
                }
            }
            for (m, d) in mean_delta.iter_mut().zip(delta) {
                *m += d;
            }
        }
        if contributors > 0 {
            let population = cv.population.max(contributors) as f64;
            for (c, m) in cv.server.iter_mut().zip(&mean_delta) {
                // (|S| / N) * mean(delta) == sum(delta) / N
                *c += m / population;
            }
        }
    }
    Ok(global)
}

/// Fraction of `test` classified correctly.
pub fn evaluate_accuracy(model: &ModelParams, test: &SyntheticDataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    if model.weights.len() != test.dim() + 1 {
        return Err(Error::LengthMismatch {
            what: "model weights vs test dim + 1",
            left: model.weights.len(),
            right: test.dim() + 1,
        });
    }
    let correct = (0..test.len())
        .filter(|&i| model.predict(test.row(i)) == test.labels[i])
        .count();
    Ok(correct as f64 / test.len() as f64)
}

/// Accuracy gained on the shared test set by the local model over the global one.
pub fn realized_contribution(
    global: &ModelParams,
    local: &ModelParams,
    test: &SyntheticDataset,
) -> Result<f64> {
    Ok(evaluate_accuracy(local, test)? - evaluate_accuracy(global, test)?)
}

/// Flips every label independently with probability `cfg.flip_rate`.
///
/// `cfg.target_clients` is not consulted here; it tells the caller whose data to poison.
pub fn poison(data: &SyntheticDataset, cfg: &PoisonConfig, seed: u64) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = cfg.flip_rate.clamp(0.0, 1.0);
    SyntheticDataset {
        labels: data
            .labels
            .iter()
            .map(|&l| if rng.random_bool(p) { 1 - l } else { l })
            .collect(),
        ..data.clone()
    }
}
