//! Contribution measurement and reputation scores.
//!
//! A client's contribution in a round is its Banzhaf index: the average
//! marginal utility it adds over every coalition of the other clients.
//! Reputation is an exponentially weighted blend of the previous score and
//! the latest contribution.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flsim::{evaluate_accuracy, weighted_average, ModelParams, SyntheticDataset};
use crate::ClientId;

/// Largest game [`banzhaf_exact`] will enumerate.
pub const EXACT_LIMIT: usize = 20;

/// Largest game a [`Coalition`] bitmask can describe.
pub const MAX_PLAYERS: usize = 64;

/// A set of players `0..n`, one bit each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Coalition(pub u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn with(self, i: usize) -> Coalition {
        Coalition(self.0 | 1 << i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_PLAYERS).filter(move |&i| bits >> i & 1 == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityMode {
    /// Utility is a sum of per-client values.
    Additive,
    /// Utility is the accuracy gain of a model aggregated from the coalition.
    Retrain,
    Custom,
}

/// Coalition value function for a cooperative game.
pub trait CoalitionUtility {
    fn value(&self, coalition: Coalition) -> f64;

    /// `U(S u {i}) - U(S)` for `i` not in `S`.
    fn marginal(&self, coalition: Coalition, player: usize) -> f64 {
        self.value(coalition.with(player)) - self.value(coalition)
    }

    fn mode(&self) -> UtilityMode {
        UtilityMode::Custom
    }
}

impl<F: Fn(Coalition) -> f64> CoalitionUtility for F {
    fn value(&self, coalition: Coalition) -> f64 {
        self(coalition)
    }
}

/// `U(S) = sum of v_i over S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Additive {
    pub values: Vec<f64>,
}

impl CoalitionUtility for Additive {
    fn value(&self, coalition: Coalition) -> f64 {
        coalition.members().map(|i| self.values[i]).sum()
    }

    fn marginal(&self, _coalition: Coalition, player: usize) -> f64 {
        self.values[player]
    }

    fn mode(&self) -> UtilityMode {
        UtilityMode::Additive
    }
}

/// Accuracy gain of the sample-weighted average of the coalition's local
/// models over the current global model. The empty coalition is worth 0.
pub struct Retrain<'a> {
    pub global: &'a ModelParams,
    pub locals: &'a [ModelParams],
    pub sample_counts: &'a [usize],
    pub test: &'a SyntheticDataset,
    baseline: f64,
}

impl<'a> Retrain<'a> {
    pub fn new(
        global: &'a ModelParams,
        locals: &'a [ModelParams],
        sample_counts: &'a [usize],
        test: &'a SyntheticDataset,
    ) -> Result<Self> {
        if locals.len() != sample_counts.len() {
            return Err(Error::LengthMismatch {
                what: "local models vs sample counts",
                left: locals.len(),
                right: sample_counts.len(),
            });
        }
        let baseline = evaluate_accuracy(global, test)?;
        Ok(Retrain {
            global,
            locals,
            sample_counts,
            test,
            baseline,
        })
    }
}

impl CoalitionUtility for Retrain<'_> {
    fn value(&self, coalition: Coalition) -> f64 {
        if coalition.is_empty() {
            return 0.0;
        }
        let members: Vec<usize> = coalition.members().collect();
        let models: Vec<&ModelParams> = members.iter().map(|&i| &self.locals[i]).collect();
        let counts: Vec<usize> = members.iter().map(|&i| self.sample_counts[i]).collect();
        let merged = match weighted_average(&models, &counts) {
            Ok(m) => m,
            Err(_) => self.global.clone(),
        };
        evaluate_accuracy(&merged, self.test).unwrap_or(self.baseline) - self.baseline
    }

    fn mode(&self) -> UtilityMode {
        UtilityMode::Retrain
    }
}

/// Running mean and variance (Welford). A constant stream keeps its mean exact.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

fn check_player(n: usize, i: usize) -> Result<()> {
    if n > MAX_PLAYERS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_PLAYERS,
        });
    }
    if i >= n {
        return Err(Error::Domain(format!("player {i} outside game of {n}")));
    }
    Ok(())
}

/// Exact Banzhaf index of player `i` by enumerating all `2^(n-1)` coalitions.
pub fn banzhaf_exact(u: &impl CoalitionUtility, n: usize, i: usize) -> Result<f64> {
    if n > EXACT_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EXACT_LIMIT,
        });
    }
    check_player(n, i)?;
    let mut acc = MeanVar::default();
    // Enumerate masks over the n - 1 other players and splice out bit i.
    let low = (1u64 << i) - 1;
    for m in 0..1u64 << (n - 1) {
        let s = Coalition((m & low) | (m & !low) << 1);
        acc.push(u.marginal(s, i));
    }
    Ok(acc.mean)
}

/// Monte Carlo Banzhaf estimate with its standard error.
pub fn banzhaf_mc_stats(
    u: &impl CoalitionUtility,
    n: usize,
    i: usize,
    samples: usize,
    seed: u64,
) -> Result<MeanVar> {
    check_player(n, i)?;
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = MeanVar::default();
    for _ in 0..samples {
        acc.push(u.marginal(sample_coalition(&mut rng, n, i), i));
    }
    Ok(acc)
}

/// Uniform random subset of `{0..n} \ {i}`: each player joins with probability 1/2.
pub fn sample_coalition(rng: &mut impl Rng, n: usize, i: usize) -> Coalition {
    let all = if n == MAX_PLAYERS {
        u64::MAX
    } else {
        (1u64 << n) - 1
    };
    Coalition(rng.random::<u64>() & all & !(1u64 << i))
}

/// Unbiased Monte Carlo estimate of [`banzhaf_exact`].
pub fn banzhaf_mc(
    u: &impl CoalitionUtility,
    n: usize,
    i: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    Ok(banzhaf_mc_stats(u, n, i, samples, seed)?.mean)
}

/// Weights of the reputation update; they must sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReputationParams {
    /// Weight on the previous reputation.
    pub w1: f64,
    /// Weight on the latest contribution.
    pub w2: f64,
}

impl Default for ReputationParams {
    fn default() -> Self {
        ReputationParams { w1: 0.5, w2: 0.5 }
    }
}

impl ReputationParams {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w1) || !(0.0..=1.0).contains(&w2) {
            return Err(Error::Domain(format!(
                "weights must lie in [0, 1]: w1 = {w1}, w2 = {w2}"
            )));
        }
        if (w1 + w2 - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("w1 + w2 = 1 violated: {w1} + {w2}")));
        }
        Ok(ReputationParams { w1, w2 })
    }
}

#[inline]
pub fn update_reputation(prev_epsilon: f64, zeta: f64, params: &ReputationParams) -> f64 {
    prev_epsilon * params.w1 + zeta * params.w2
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClientReputation {
    pub epsilon: f64,
    pub zeta_last: f64,
    pub round: u64,
}

/// Reputation of every known client. Unknown clients start at zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReputationState {
    clients: BTreeMap<ClientId, ClientReputation>,
}

impl ReputationState {
    /// Cold-start state with `n` clients at reputation zero.
    pub fn new(n: usize) -> Self {
        ReputationState {
            clients: (0..n).map(|i| (i, ClientReputation::default())).collect(),
        }
    }

    pub fn from_epsilons(eps: impl IntoIterator<Item = (ClientId, f64)>) -> Self {
        ReputationState {
            clients: eps
                .into_iter()
                .map(|(id, epsilon)| {
                    (
                        id,
                        ClientReputation {
                            epsilon,
                            ..Default::default()
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.clients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clients.is_empty()
    }

    pub fn get(&self, id: ClientId) -> Option<&ClientReputation> {
        self.clients.get(&id)
    }

    pub fn epsilon(&self, id: ClientId) -> f64 {
        self.clients.get(&id).map_or(0.0, |c| c.epsilon)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClientId, &ClientReputation)> {
        self.clients.iter().map(|(&id, c)| (id, c))
    }

    pub fn set_epsilon(&mut self, id: ClientId, epsilon: f64) {
        self.clients.entry(id).or_default().epsilon = epsilon;
    }

    /// Applies one round's contribution and returns the new reputation.
    pub fn record(
        &mut self,
        id: ClientId,
        round: u64,
        zeta: f64,
        params: &ReputationParams,
    ) -> Result<f64> {
        let entry = self.clients.entry(id).or_default();
        if entry.round != 0 && round <= entry.round {
            return Err(Error::RoundOrder {
                round,
                tip: entry.round,
            });
        }
        entry.epsilon = update_reputation(entry.epsilon, zeta, params);
        entry.zeta_last = zeta;
        entry.round = round;
        Ok(entry.epsilon)
    }
}

/// The `k` most reputable clients, ordered by reputation then ascending id.
pub fn select_top_k(state: &ReputationState, k: usize) -> Result<Vec<ClientId>> {
    if k > state.len() {
        return Err(Error::SelectionTooLarge {
            k,
            population: state.len(),
        });
    }
    let mut ranked: Vec<(ClientId, f64)> = state.iter().map(|(id, c)| (id, c.epsilon)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked.into_iter().take(k).map(|(id, _)| id).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force Banzhaf straight from the definition, over explicit subsets.
    fn brute_force(u: &impl CoalitionUtility, n: usize, i: usize) -> f64 {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut total = 0.0;
        for mask in 0..1usize << others.len() {
            let mut s = Coalition::EMPTY;
            for (b, &j) in others.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    s = s.with(j);
                }
            }
            total += u.value(s.with(i)) - u.value(s);
        }
        total / (1usize << others.len()) as f64
    }

    #[test]
    fn additive_recovers_values() {
        let u = Additive {
            values: vec![1.0, 2.0, 3.0],
        };
        for i in 0..3 {
            assert_eq!(banzhaf_exact(&u, 3, i).unwrap(), u.values[i]);
        }
    }

    #[test]
    fn two_player_example() {
        let u = |s: Coalition| match s.0 {
            0b00 => 0.0,
            0b01 | 0b10 => 1.0,
            _ => 4.0,
        };
        assert_eq!(banzhaf_exact(&u, 2, 0).unwrap(), 2.0);
        assert_eq!(banzhaf_exact(&u, 2, 1).unwrap(), 2.0);
    }

    #[test]
    fn symmetric_players_share_index() {
        // Players 1 and 3 are interchangeable.
        let u = |s: Coalition| {
            let w = [1.0, 2.5, 0.3, 2.5, 4.0];
            let base: f64 = s.members().map(|i| w[i]).sum();
            base * base
                + if s.contains(1) && s.contains(3) {
                    1.0
                } else {
                    0.0
                }
        };
        let a = banzhaf_exact(&u, 5, 1).unwrap();
        let b = banzhaf_exact(&u, 5, 3).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_brute_force() {
        let u = |s: Coalition| (s.0 as f64).sqrt() + s.len() as f64 * 0.3;
        for n in 1..=7 {
            for i in 0..n {
                let a = banzhaf_exact(&u, n, i).unwrap();
                let b = brute_force(&u, n, i);
                assert!((a - b).abs() < 1e-12, "n {n} i {i}");
            }
        }
    }

    #[test]
    fn dummy_player_scores_zero() {
        let u = |s: Coalition| {
            let s = Coalition(s.0 & !(1 << 2));
            s.len() as f64 * 1.5 + if s.contains(0) { 3.0 } else { 0.0 }
        };
        assert_eq!(banzhaf_exact(&u, 6, 2).unwrap(), 0.0);
    }

    #[test]
    fn exact_guards() {
        let u = Additive {
            values: vec![0.0; 21],
        };
        assert_eq!(
            banzhaf_exact(&u, 21, 0),
            Err(Error::TooLarge {
                n: 21,
                limit: EXACT_LIMIT
            })
        );
        assert!(banzhaf_exact(&u, 3, 3).is_err());
    }

    #[test]
    fn mc_additive_is_exact() {
        let u = Additive {
            values: vec![0.1, -0.7, 2.3, 1.0 / 3.0],
        };
        for i in 0..4 {
            for samples in [1, 7, 1000] {
                assert_eq!(banzhaf_mc(&u, 4, i, samples, 99).unwrap(), u.values[i]);
            }
        }
        assert!(banzhaf_mc(&u, 4, 0, 0, 1).is_err());
    }

    #[test]
    fn mc_single_sample_replays_sampler() {
        let u = |s: Coalition| (s.0 as f64 * 0.37).sin();
        let seed = 1234;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sample_coalition(&mut rng, 8, 3);
        assert!(!s.contains(3));
        assert!(s.0 < 1 << 8);
        let expected = u(s.with(3)) - u(s);
        assert_eq!(banzhaf_mc(&u, 8, 3, 1, seed).unwrap(), expected);
    }

    #[test]
    fn mc_within_three_standard_errors() {
        let u = |s: Coalition| {
            let x: f64 = s.members().map(|i| (i as f64 + 1.0).ln()).sum();
            x * x
                - if s.contains(0) && s.contains(5) {
                    2.0
                } else {
                    0.0
                }
        };
        for i in 0..8 {
            let exact = banzhaf_exact(&u, 8, i).unwrap();
            let est = banzhaf_mc_stats(&u, 8, i, 10_000, 17 + i as u64).unwrap();
            assert!(
                (est.mean - exact).abs() <= 3.0 * est.std_error(),
                "player {i}"
            );
        }
    }

    #[test]
    fn update_examples() {
        let p = ReputationParams::new(0.5, 0.5).unwrap();
        assert_eq!(update_reputation(0.0, 1.0, &p), 0.5);
        let p = ReputationParams::new(0.8, 0.2).unwrap();
        assert!((update_reputation(0.6, 0.2, &p) - 0.52).abs() < 1e-15);
        for (w1, w2) in [(0.5, 0.5), (0.25, 0.75), (1.0, 0.0)] {
            let p = ReputationParams::new(w1, w2).unwrap();
            assert_eq!(update_reputation(0.125, 0.125, &p), 0.125);
        }
    }

    #[test]
    fn weights_must_sum_to_one() {
        let err = ReputationParams::new(0.9, 0.2).unwrap_err();
        assert!(err.to_string().contains("w1 + w2 = 1"), "{err}");
        assert!(ReputationParams::new(-0.1, 1.1).is_err());
    }

    #[test]
    fn state_rounds_strictly_increase() {
        let p = ReputationParams::default();
        let mut s = ReputationState::new(2);
        assert_eq!(s.record(0, 1, 1.0, &p).unwrap(), 0.5);
        assert_eq!(s.record(0, 2, 1.0, &p).unwrap(), 0.75);
        assert!(s.record(0, 2, 1.0, &p).is_err());
        assert_eq!(s.get(0).unwrap().zeta_last, 1.0);
        assert_eq!(s.epsilon(1), 0.0);
    }

    #[test]
    fn top_k_examples() {
        let s = ReputationState::from_epsilons([(0, 0.9), (1, 0.1), (2, 0.5)]);
        assert_eq!(select_top_k(&s, 2).unwrap(), vec![0, 2]);
        assert_eq!(select_top_k(&s, 3).unwrap(), vec![0, 2, 1]);
        let flat = ReputationState::new(4);
        assert_eq!(select_top_k(&flat, 2).unwrap(), vec![0, 1]);
        assert_eq!(
            select_top_k(&s, 4),
            Err(Error::SelectionTooLarge {
                k: 4,
                population: 3
            })
        );
    }

    #[test]
    fn retrain_utility_empty_is_zero() {
        use crate::flsim::{generate_population, local_train, AggregationConfig, Algorithm};
        use crate::mechanism::Efficiency;
        let thetas = [Efficiency::new(1.0).unwrap(), Efficiency::new(0.0).unwrap()];
        let (clients, test) = generate_population(2, &thetas, 5).unwrap();
        let global = ModelParams::zeros(20);
        let cfg = AggregationConfig::standard(Algorithm::FedAvg);
        let locals: Vec<ModelParams> = clients
            .iter()
            .map(|d| local_train(&global, d, &cfg).unwrap().params)
            .collect();
        let counts: Vec<usize> = clients.iter().map(|d| d.len()).collect();
        let u = Retrain::new(&global, &locals, &counts, &test).unwrap();
        assert_eq!(u.mode(), UtilityMode::Retrain);
        assert_eq!(u.value(Coalition::EMPTY), 0.0);
        assert!(u.value(Coalition(0b01)) > 0.0);
        assert!(banzhaf_exact(&u, 2, 0).unwrap().is_finite());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn additive_exact_for_any_values(values in prop::collection::vec(-1e3f64..1e3, 1..=12)) {
                let n = values.len();
                let u = Additive { values: values.clone() };
                for (i, &v) in values.iter().enumerate() {
                    prop_assert_eq!(banzhaf_exact(&u, n, i).unwrap(), v);
                }
            }

            #[test]
            fn reputation_stays_in_hull(
                eps0 in -5.0f64..5.0,
                w1 in 0.0f64..=1.0,
                zetas in prop::collection::vec(-2.0f64..3.0, 1..50),
            ) {
                let p = ReputationParams { w1, w2: 1.0 - w1 };
                let lo = zetas.iter().copied().fold(eps0, f64::min);
                let hi = zetas.iter().copied().fold(eps0, f64::max);
                let mut e = eps0;
                for z in zetas {
                    e = update_reputation(e, z, &p);
                    prop_assert!(e >= lo - 1e-12 && e <= hi + 1e-12);
                }
            }

            #[test]
            fn top_k_is_sorted_and_deterministic(
                eps in prop::collection::vec(-1.0f64..1.0, 1..30),
                k in 0usize..30,
            ) {
                let s = ReputationState::from_epsilons(eps.iter().copied().enumerate());
                let k = k.min(eps.len());
                let a = select_top_k(&s, k).unwrap();
                prop_assert_eq!(&a, &select_top_k(&s, k).unwrap());
                for w in a.windows(2) {
                    let (x, y) = (eps[w[0]], eps[w[1]]);
                    prop_assert!(x > y || (x == y && w[0] < w[1]));
                }
                if let Some(&last) = a.last() {
                    for (id, &e) in eps.iter().enumerate() {
                        if !a.contains(&id) {
                            prop_assert!(e < eps[last] || (e == eps[last] && id > last));
                        }
                    }
                }
            }
        }
    }
}
