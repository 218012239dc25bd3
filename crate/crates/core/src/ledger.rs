//! Reputation storage.
//!
//! [`ChainedLedger`] is an append-only log in which every record commits to
//! the digest of the one before it, so editing any stored field is visible
//! to [`ChainedLedger::verify_chain`]. [`PlainStore`] keeps the same data
//! without digests and serves as the undefended comparison point.
//!
//! Record digests are SHA-256 over a 64-byte canonical encoding:
//!
//! | bytes  | field                        |
//! |--------|------------------------------|
//! | 0..8   | round, u64 little-endian     |
//! | 8..16  | client id, u64 little-endian |
//! | 16..24 | zeta, IEEE-754 f64 LE        |
//! | 24..32 | epsilon, IEEE-754 f64 LE     |
//! | 32..64 | previous record digest       |
//!
//! On disk each record is a frame: a u32 little-endian length (always 96)
//! followed by the 64 canonical bytes and the 32-byte record digest.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};
use crate::ClientId;

pub type Digest = [u8; 32];

pub const GENESIS: Digest = [0u8; 32];
pub const PAYLOAD_LEN: usize = 64;
pub const RECORD_LEN: usize = PAYLOAD_LEN + 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReputationRecord {
    pub round: u64,
    pub client_id: u64,
    pub zeta: f64,
    pub epsilon: f64,
    #[serde(with = "hex_digest")]
    pub prev_hash: Digest,
    #[serde(with = "hex_digest")]
    pub record_hash: Digest,
}

mod hex_digest {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        let hex: String = d.iter().map(|b| format!("{b:02x}")).collect();
        s.serialize_str(&hex)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 64 {
            return Err(D::Error::custom("digest must be 64 hex characters"));
        }
        let mut out = [0u8; 32];
        for (i, o) in out.iter_mut().enumerate() {
            *o = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

impl ReputationRecord {
    pub fn payload(&self) -> [u8; PAYLOAD_LEN] {
        let mut out = [0u8; PAYLOAD_LEN];
        out[0..8].copy_from_slice(&self.round.to_le_bytes());
        out[8..16].copy_from_slice(&self.client_id.to_le_bytes());
        out[16..24].copy_from_slice(&self.zeta.to_le_bytes());
        out[24..32].copy_from_slice(&self.epsilon.to_le_bytes());
        out[32..64].copy_from_slice(&self.prev_hash);
        out
    }

    pub fn compute_hash(&self) -> Digest {
        Sha256::digest(self.payload()).into()
    }

    pub fn is_sealed(&self) -> bool {
        self.compute_hash() == self.record_hash
    }

    pub fn to_bytes(&self) -> [u8; RECORD_LEN] {
        let mut out = [0u8; RECORD_LEN];
        out[..PAYLOAD_LEN].copy_from_slice(&self.payload());
        out[PAYLOAD_LEN..].copy_from_slice(&self.record_hash);
        out
    }

    pub fn from_bytes(b: &[u8; RECORD_LEN]) -> Self {
        let u64_at = |i: usize| u64::from_le_bytes(b[i..i + 8].try_into().unwrap());
        let mut prev_hash = [0u8; 32];
        prev_hash.copy_from_slice(&b[32..64]);
        let mut record_hash = [0u8; 32];
        record_hash.copy_from_slice(&b[64..96]);
        ReputationRecord {
            round: u64_at(0),
            client_id: u64_at(8),
            zeta: f64::from_bits(u64_at(16)),
            epsilon: f64::from_bits(u64_at(24)),
            prev_hash,
            record_hash,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainStatus {
    Ok,
    FirstTamperedIndex(usize),
}

impl ChainStatus {
    pub fn is_ok(self) -> bool {
        self == ChainStatus::Ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LedgerMode {
    Chained,
    Vulnerable,
}

impl std::fmt::Display for LedgerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LedgerMode::Chained => "chained",
            LedgerMode::Vulnerable => "vulnerable",
        })
    }
}

/// What a chained ledger reports for a client whose records fail verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum UntrustedPolicy {
    /// Report reputation 0.
    #[default]
    Zero,
    /// Report the client's newest record that still verifies, or 0 if none does.
    LastVerified,
}

/// Storage for per-round reputation entries.
pub trait ReputationStore {
    fn mode(&self) -> LedgerMode;

    fn append(
        &mut self,
        round: u64,
        client_id: ClientId,
        zeta: f64,
        epsilon: f64,
    ) -> Result<ReputationRecord>;

    /// Latest reputation of `client_id` and whether it can be trusted.
    fn read_reputation(&self, client_id: ClientId) -> Result<(f64, bool)>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn clients(&self) -> Vec<ClientId>;

    /// Index of the newest record for `client_id`.
    fn latest_index(&self, client_id: ClientId) -> Option<usize>;

    fn epsilon_at(&self, index: usize) -> f64;

    /// Rewrites a stored reputation in place, bypassing every integrity mechanism.
    fn overwrite_epsilon(&mut self, index: usize, epsilon: f64);
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChainedLedger {
    records: Vec<ReputationRecord>,
    by_client: BTreeMap<ClientId, Vec<usize>>,
    pub policy: UntrustedPolicy,
}

impl ChainedLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_policy(policy: UntrustedPolicy) -> Self {
        ChainedLedger {
            policy,
            ..Self::default()
        }
    }

    /// Builds a ledger from records as stored, without checking them.
    pub fn from_records(records: Vec<ReputationRecord>) -> Self {
        let mut by_client: BTreeMap<ClientId, Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            by_client
                .entry(r.client_id as ClientId)
                .or_default()
                .push(i);
        }
        ChainedLedger {
            records,
            by_client,
            policy: UntrustedPolicy::default(),
        }
    }

    pub fn records(&self) -> &[ReputationRecord] {
        &self.records
    }

    pub fn records_mut(&mut self) -> &mut [ReputationRecord] {
        &mut self.records
    }

    pub fn tip(&self) -> Digest {
        self.records.last().map_or(GENESIS, |r| r.record_hash)
    }

    pub fn truncate(&mut self, len: usize) {
        *self = Self {
            policy: self.policy,
            ..Self::from_records(self.records[..len.min(self.records.len())].to_vec())
        };
    }

    /// Recomputes every digest and link; reports the first record that disagrees.
    pub fn verify_chain(&self) -> ChainStatus {
        let mut expected_prev = GENESIS;
        for (i, r) in self.records.iter().enumerate() {
            if r.prev_hash != expected_prev || !r.is_sealed() {
                return ChainStatus::FirstTamperedIndex(i);
            }
            expected_prev = r.record_hash;
        }
        ChainStatus::Ok
    }

    fn record_verifies(&self, i: usize) -> bool {
        let r = &self.records[i];
        r.is_sealed()
            && self
                .records
                .get(i + 1)
                .is_none_or(|next| next.prev_hash == r.record_hash)
    }

    /// Whether every record of `client_id` still matches its digest and link.
    pub fn verify_client(&self, client_id: ClientId) -> Result<bool> {
        let idx = self
            .by_client
            .get(&client_id)
            .ok_or(Error::UnknownClient(client_id))?;
        Ok(idx.iter().all(|&i| self.record_verifies(i)))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.records.len() * (RECORD_LEN + 4));
        for r in &self.records {
            out.extend_from_slice(&(RECORD_LEN as u32).to_le_bytes());
            out.extend_from_slice(&r.to_bytes());
        }
        out
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self> {
        let mut records = Vec::new();
        while !bytes.is_empty() {
            if bytes.len() < 4 {
                return Err(Error::Format(format!(
                    "truncated length prefix after record {}",
                    records.len()
                )));
            }
            let len = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
            if len != RECORD_LEN {
                return Err(Error::Format(format!(
                    "record {} has length {len}, expected {RECORD_LEN}",
                    records.len()
                )));
            }
            let body = bytes
                .get(4..4 + RECORD_LEN)
                .ok_or_else(|| Error::Format(format!("record {} is truncated", records.len())))?;
            records.push(ReputationRecord::from_bytes(body.try_into().unwrap()));
            bytes = &bytes[4 + RECORD_LEN..];
        }
        Ok(Self::from_records(records))
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    /// One JSON object per record, for inspection.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

impl ReputationStore for ChainedLedger {
    fn mode(&self) -> LedgerMode {
        LedgerMode::Chained
    }

    fn append(
        &mut self,
        round: u64,
        client_id: ClientId,
        zeta: f64,
        epsilon: f64,
    ) -> Result<ReputationRecord> {
        if let Some(tip) = self.records.last() {
            if round < tip.round {
                return Err(Error::RoundOrder {
                    round,
                    tip: tip.round,
                });
            }
        }
        let mut record = ReputationRecord {
            round,
            client_id: client_id as u64,
            zeta,
            epsilon,
            prev_hash: self.tip(),
            record_hash: [0u8; 32],
        };
        record.record_hash = record.compute_hash();
        self.by_client
            .entry(client_id)
            .or_default()
            .push(self.records.len());
        self.records.push(record);
        Ok(record)
    }

    fn read_reputation(&self, client_id: ClientId) -> Result<(f64, bool)> {
        let idx = self
            .by_client
            .get(&client_id)
            .ok_or(Error::UnknownClient(client_id))?;
        if idx.iter().all(|&i| self.record_verifies(i)) {
            let latest = *idx.last().expect("clients have at least one record");
            return Ok((self.records[latest].epsilon, true));
        }
        let fallback = match self.policy {
            UntrustedPolicy::Zero => 0.0,
            UntrustedPolicy::LastVerified => idx
                .iter()
                .take_while(|&&i| self.record_verifies(i))
                .last()
                .map_or(0.0, |&i| self.records[i].epsilon),
        };
        Ok((fallback, false))
    }

    fn len(&self) -> usize {
        self.records.len()
    }

    fn clients(&self) -> Vec<ClientId> {
        self.by_client.keys().copied().collect()
    }

    fn latest_index(&self, client_id: ClientId) -> Option<usize> {
        self.by_client
            .get(&client_id)
            .and_then(|v| v.last().copied())
    }

    fn epsilon_at(&self, index: usize) -> f64 {
        self.records[index].epsilon
    }

    fn overwrite_epsilon(&mut self, index: usize, epsilon: f64) {
        self.records[index].epsilon = epsilon;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlainRecord {
    pub round: u64,
    pub client_id: ClientId,
    pub zeta: f64,
    pub epsilon: f64,
}

/// Reputation log without any integrity protection.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlainStore {
    records: Vec<PlainRecord>,
    by_client: BTreeMap<ClientId, Vec<usize>>,
}

impl PlainStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> &[PlainRecord] {
        &self.records
    }
}

impl ReputationStore for PlainStore {
    fn mode(&self) -> LedgerMode {
        LedgerMode::Vulnerable
    }

    fn append(
        &mut self,
        round: u64,
        client_id: ClientId,
        zeta: f64,
        epsilon: f64,
    ) -> Result<ReputationRecord> {
        if let Some(tip) = self.records.last() {
            if round < tip.round {
                return Err(Error::RoundOrder {
                    round,
                    tip: tip.round,
                });
            }
        }
        self.by_client
            .entry(client_id)
            .or_default()
            .push(self.records.len());
        self.records.push(PlainRecord {
            round,
            client_id,
            zeta,
            epsilon,
        });
        Ok(ReputationRecord {
            round,
            client_id: client_id as u64,
            zeta,
            epsilon,
            prev_hash: GENESIS,
            record_hash: GENESIS,
        })
    }

    fn read_reputation(&self, client_id: ClientId) -> Result<(f64, bool)> {
        let i = self
            .latest_index(client_id)
            .ok_or(Error::UnknownClient(client_id))?;
        Ok((self.records[i].epsilon, true))
    }

    fn len(&self) -> usize {
        self.records.len()
    }

    fn clients(&self) -> Vec<ClientId> {
        self.by_client.keys().copied().collect()
    }

    fn latest_index(&self, client_id: ClientId) -> Option<usize> {
        self.by_client
            .get(&client_id)
            .and_then(|v| v.last().copied())
    }

    fn epsilon_at(&self, index: usize) -> f64 {
        self.records[index].epsilon
    }

    fn overwrite_epsilon(&mut self, index: usize, epsilon: f64) {
        self.records[index].epsilon = epsilon;
    }
}

/// Reputation-inflation attack on stored records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TamperConfig {
    /// Fraction of clients attacked.
    pub alpha: f64,
    /// Multiplier applied to each attacked client's latest reputation.
    pub beta: f64,
    pub seed: u64,
}

impl TamperConfig {
    pub fn new(alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha {alpha} outside [0, 1]")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        Ok(TamperConfig { alpha, beta, seed })
    }

    /// The `ceil(alpha * n)` clients this attack targets, in ascending id order.
    pub fn targets(&self, clients: &[ClientId]) -> Vec<ClientId> {
        let count = ((self.alpha * clients.len() as f64).ceil() as usize).min(clients.len());
        let mut pool = clients.to_vec();
        pool.sort_unstable();
        pool.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        let mut picked = pool[..count].to_vec();
        picked.sort_unstable();
        picked
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mutation {
    pub index: usize,
    pub client_id: ClientId,
    pub before: f64,
    pub after: f64,
}

/// Multiplies the latest stored reputation of the targeted clients by
/// `beta`, leaving digests untouched. Returns the rewritten records in
/// ascending index order.
pub fn tamper_attack(store: &mut dyn ReputationStore, cfg: &TamperConfig) -> Vec<Mutation> {
    let mut log: Vec<Mutation> = cfg
        .targets(&store.clients())
        .into_iter()
        .filter_map(|client_id| {
            let index = store.latest_index(client_id)?;
            let before = store.epsilon_at(index);
            let after = before * cfg.beta;
            store.overwrite_epsilon(index, after);
            Some(Mutation {
                index,
                client_id,
                before,
                after,
            })
        })
        .collect();
    log.sort_by_key(|m| m.index);
    log
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> ChainedLedger {
        let mut l = ChainedLedger::new();
        for i in 0..n {
            let eps = 0.1 + i as f64 * 0.01;
            l.append((i / 5) as u64, i % 5, eps * 0.5, eps).unwrap();
        }
        l
    }

    #[test]
    fn genesis_and_linkage() {
        let mut l = ChainedLedger::new();
        let first = l.append(0, 3, 0.2, 0.1).unwrap();
        assert_eq!(first.prev_hash, GENESIS);
        let second = l.append(0, 3, 0.2, 0.1).unwrap();
        assert_eq!(second.prev_hash, first.record_hash);
        assert_ne!(first.record_hash, second.record_hash);
        assert_eq!(l.verify_chain(), ChainStatus::Ok);
    }

    #[test]
    fn digest_matches_canonical_encoding() {
        // Oracle: assemble the 64 bytes by hand and hash them.
        let mut l = ChainedLedger::new();
        let r = l.append(7, 2, -0.25, 1.5).unwrap();
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&7u64.to_le_bytes());
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&(-0.25f64).to_bits().to_le_bytes());
        bytes.extend_from_slice(&1.5f64.to_bits().to_le_bytes());
        bytes.extend_from_slice(&[0u8; 32]);
        let expected: Digest = Sha256::digest(&bytes).into();
        assert_eq!(r.record_hash, expected);
    }

    #[test]
    fn decreasing_round_is_rejected() {
        let mut l = ChainedLedger::new();
        l.append(3, 0, 0.0, 0.0).unwrap();
        l.append(3, 1, 0.0, 0.0).unwrap();
        assert_eq!(
            l.append(2, 0, 0.0, 0.0),
            Err(Error::RoundOrder { round: 2, tip: 3 })
        );
        let mut p = PlainStore::new();
        p.append(3, 0, 0.0, 0.0).unwrap();
        assert!(p.append(1, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn verify_examples() {
        let mut l = chain(100);
        assert_eq!(l.verify_chain(), ChainStatus::Ok);

        let mut flipped = l.clone();
        let r = &mut flipped.records_mut()[42];
        r.epsilon = f64::from_bits(r.epsilon.to_bits() ^ 1);
        assert_eq!(flipped.verify_chain(), ChainStatus::FirstTamperedIndex(42));

        l.truncate(60);
        assert_eq!(l.len(), 60);
        assert_eq!(l.verify_chain(), ChainStatus::Ok);
    }

    #[test]
    fn identical_sequences_identical_digests() {
        assert_eq!(chain(30).tip(), chain(30).tip());
        assert_eq!(chain(30).to_bytes(), chain(30).to_bytes());
    }

    #[test]
    fn tamper_alpha_zero_is_noop() {
        let mut l = chain(20);
        let log = tamper_attack(&mut l, &TamperConfig::new(0.0, 2.0, 1).unwrap());
        assert!(log.is_empty());
        assert!(l.verify_chain().is_ok());
    }

    #[test]
    fn tamper_all_clients() {
        let mut l = chain(20);
        let log = tamper_attack(&mut l, &TamperConfig::new(1.0, 2.0, 1).unwrap());
        assert_eq!(log.len(), 5);
        let smallest = log.iter().map(|m| m.index).min().unwrap();
        assert_eq!(l.verify_chain(), ChainStatus::FirstTamperedIndex(smallest));
        for m in &log {
            assert_eq!(m.after, 2.0 * m.before);
        }
    }

    #[test]
    fn tamper_identity_keeps_chain_valid() {
        let mut l = chain(20);
        let before = l.clone();
        let log = tamper_attack(&mut l, &TamperConfig::new(0.6, 1.0, 5).unwrap());
        assert_eq!(log.len(), 3);
        assert_eq!(l, before);
        assert!(l.verify_chain().is_ok());
    }

    #[test]
    fn tamper_targets_are_seeded() {
        let t = TamperConfig::new(0.3, 2.0, 9).unwrap();
        let ids: Vec<ClientId> = (0..40).collect();
        assert_eq!(t.targets(&ids).len(), 12);
        assert_eq!(t.targets(&ids), t.targets(&ids));
        assert!(TamperConfig::new(1.1, 2.0, 0).is_err());
        assert!(TamperConfig::new(0.5, 0.0, 0).is_err());
    }

    #[test]
    fn read_reputation_examples() {
        let mut chained = chain(20);
        let mut plain = PlainStore::new();
        for r in chained.records() {
            plain
                .append(r.round, r.client_id as ClientId, r.zeta, r.epsilon)
                .unwrap();
        }
        for c in 0..5 {
            assert_eq!(
                chained.read_reputation(c).unwrap(),
                plain.read_reputation(c).unwrap()
            );
            assert!(chained.read_reputation(c).unwrap().1);
        }
        let honest = plain.read_reputation(2).unwrap().0;

        let cfg = TamperConfig::new(1.0, 2.0, 3).unwrap();
        tamper_attack(&mut chained, &cfg);
        tamper_attack(&mut plain, &cfg);
        assert_eq!(chained.read_reputation(2).unwrap(), (0.0, false));
        assert_eq!(plain.read_reputation(2).unwrap(), (2.0 * honest, true));
        assert_eq!(chained.read_reputation(99), Err(Error::UnknownClient(99)));
        assert_eq!(plain.read_reputation(99), Err(Error::UnknownClient(99)));
    }

    #[test]
    fn last_verified_policy_falls_back() {
        let mut l = chain(20);
        l.policy = UntrustedPolicy::LastVerified;
        let idx = l.latest_index(1).unwrap();
        let prior = l.by_client[&1][l.by_client[&1].len() - 2];
        l.overwrite_epsilon(idx, 9.0);
        assert_eq!(
            l.read_reputation(1).unwrap(),
            (l.records()[prior].epsilon, false)
        );
        assert!(l.verify_client(0).unwrap());
        assert!(!l.verify_client(1).unwrap());
    }

    #[test]
    fn binary_round_trip_and_errors() {
        let l = chain(12);
        let bytes = l.to_bytes();
        assert_eq!(bytes.len(), 12 * 100);
        assert_eq!(
            ChainedLedger::from_bytes(&bytes).unwrap().records(),
            l.records()
        );
        assert!(ChainedLedger::from_bytes(&[])
            .unwrap()
            .verify_chain()
            .is_ok());
        assert!(ChainedLedger::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = 5;
        assert!(ChainedLedger::from_bytes(&bad).is_err());
    }

    #[test]
    fn json_lines_export() {
        let l = chain(3);
        let text = l.to_json_lines();
        assert_eq!(text.lines().count(), 3);
        let back: ReputationRecord = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
        assert_eq!(back, l.records()[1]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn any_byte_mutation_is_detected(index in 0usize..60, byte in 0usize..RECORD_LEN, bit in 0u8..8) {
                let l = chain(60);
                let mut bytes = l.to_bytes();
                bytes[index * (RECORD_LEN + 4) + 4 + byte] ^= 1 << bit;
                let t = ChainedLedger::from_bytes(&bytes).unwrap();
                match t.verify_chain() {
                    ChainStatus::FirstTamperedIndex(i) => prop_assert!(i <= index),
                    ChainStatus::Ok => prop_assert!(false, "mutation went unnoticed"),
                }
            }
        }
    }
}
