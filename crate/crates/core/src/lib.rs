//! Auction-based federated learning in a buyers' market.
//!
//! The crate prices client contracts with procurement-auction closed forms
//! ([`mechanism`]), simulates federated training on synthetic data
//! ([`flsim`]), scores clients with Banzhaf contributions ([`reputation`]),
//! keeps the scores in a hash-chained log ([`ledger`]) and ties everything
//! together round by round ([`auction`]).

pub mod auction;
pub mod error;
pub mod flsim;
pub mod ledger;
pub mod mechanism;
pub mod reputation;

pub use auction::{
    Behavior, ClientOutcome, ClientProfile, ExperimentSpec, ExperimentSummary, Mechanism,
    RobustnessRow, RoundReport,
};
pub use error::{Error, Result};
pub use flsim::{
    AggregationConfig, Algorithm, GeneratorConfig, ModelParams, PoisonConfig, SyntheticDataset,
};
pub use ledger::{
    ChainStatus, ChainedLedger, LedgerMode, PlainStore, ReputationRecord, ReputationStore,
    TamperConfig,
};
pub use mechanism::{Contract, Efficiency, MarketParams, Regime};
pub use reputation::{ReputationParams, ReputationState};

/// Identifier of a client (seller) in the market.
pub type ClientId = usize;
