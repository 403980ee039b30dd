//! In-process simulation of the client/server feature-scoring protocol.
//!
//! Rounds, each separated by a barrier:
//!
//! 0. clients report per-feature min/max; the server broadcasts the global range
//!    (its own labeled rows included) so every party normalizes identically;
//! 1. clients report [`FeatureStats`] of their normalized shard; the server
//!    broadcasts the global standard deviation of every feature;
//! 2. clients send one fuzzy similarity matrix per feature, built with radius
//!    `std_g / λ`;
//! 3. the server stacks the client matrices block-diagonally (cross-client
//!    similarity is zero), computes the entropy table, scores relevance on its
//!    labeled rows, ranks features and broadcasts `Done`.
//!
//! Every message is serialized, recorded in the [`CostLedger`] and decoded by
//! the receiver.

mod client;
mod cost;
mod message;
mod server;

use std::collections::VecDeque;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use client::{ClientPhase, ClientState};
pub use cost::{
    communication_cost, raw_data_cost, CostComparison, CostLedger, LedgerEntry, DEFAULT_BITS_PER_VALUE,
};
pub use message::{PartyId, Payload, ProtocolMessage, Round};
pub use server::ServerState;

use crate::dataset::{MultiLabelDataset, PartitionPlan};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fuzzy::{BlockSimilarity, EntropyTable, FeatureStats, FuzzySimilarityMatrix};
use crate::graph::{FeatureRanking, DEFAULT_ZETA};
use crate::relevance::DependencyVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StdAggregation {
    /// Exact pooled sample std from (count, mean, m2).
    #[default]
    PooledExact,
    /// Instance-weighted mean of the client standard deviations.
    WeightedMean,
}

impl FromStr for StdAggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pooled-exact" => Ok(Self::PooledExact),
            "weighted-mean" => Ok(Self::WeightedMean),
            other => Err(Error::config(format!(
                "unknown std aggregation '{other}', expected pooled-exact or weighted-mean"
            ))),
        }
    }
}

/// Drops one client's report in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dropout {
    pub client: u32,
    pub round: Round,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub lambda: f64,
    pub knn_k: usize,
    pub zeta: f64,
    pub std_agg: StdAggregation,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    /// Number of top-ranked features announced in `Done`.
    pub select: Option<usize>,
    /// Per-client link distances; `None` means 1.0 for every client.
    pub distances: Option<Vec<f64>>,
    pub bits_per_value: u32,
    pub exec: Execution,
    pub dropout: Option<Dropout>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            lambda: 1.2,
            knn_k: 10,
            zeta: DEFAULT_ZETA,
            std_agg: StdAggregation::PooledExact,
            pagerank_tol: 1e-10,
            pagerank_max_iter: 200,
            select: None,
            distances: None,
            bits_per_value: DEFAULT_BITS_PER_VALUE,
            exec: Execution::Parallel,
            dropout: None,
        }
    }
}

/// Exact pooled sample standard deviation of the concatenated samples.
pub fn aggregate_std(stats: &[FeatureStats]) -> Result<f64> {
    let pooled = stats.iter().fold(
        FeatureStats {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        },
        |acc, s| acc.merge(s),
    );
    pooled.std().ok_or_else(|| {
        Error::data(format!(
            "global standard deviation needs at least two instances, got {}",
            pooled.count
        ))
    })
}

/// `Σ n_i std_i / Σ n_i`; single-instance clients contribute a zero std.
pub fn aggregate_std_weighted(stats: &[FeatureStats]) -> Result<f64> {
    let total: u64 = stats.iter().map(|s| s.count).sum();
    if total < 2 {
        return Err(Error::data(format!(
            "global standard deviation needs at least two instances, got {total}"
        )));
    }
    let weighted: f64 = stats
        .iter()
        .map(|s| s.count as f64 * s.std().unwrap_or(0.0))
        .sum();
    Ok(weighted / total as f64)
}

fn check_blocks(mats: &[FuzzySimilarityMatrix]) -> Result<(u32, f64)> {
    let first = mats
        .first()
        .ok_or_else(|| Error::data("no similarity matrices to aggregate"))?;
    for m in mats {
        if m.feature_id != first.feature_id {
            return Err(Error::data(format!(
                "feature ids {} and {} mixed in one aggregation",
                first.feature_id, m.feature_id
            )));
        }
        if m.radius.to_bits() != first.radius.to_bits() {
            return Err(Error::data(format!(
                "feature {}: radius mismatch across clients ({} vs {})",
                m.feature_id, first.radius, m.radius
            )));
        }
    }
    Ok((first.feature_id, first.radius))
}

/// Block-diagonal stack of per-client matrices for one feature, kept in block form.
pub fn aggregate_blocks(mats: Vec<FuzzySimilarityMatrix>) -> Result<BlockSimilarity> {
    let (id, radius) = check_blocks(&mats)?;
    Ok(BlockSimilarity::new(id, radius, mats))
}

/// Dense block-diagonal stack of per-client matrices for one feature.
pub fn aggregate_similarity(mats: &[FuzzySimilarityMatrix]) -> Result<FuzzySimilarityMatrix> {
    Ok(aggregate_blocks(mats.to_vec())?.to_dense())
}

/// Ordered in-process transport. Posting serializes and bills the message;
/// delivery decodes it.
#[derive(Debug)]
struct Mailbox {
    queue: VecDeque<(ProtocolMessage, Vec<u8>)>,
    ledger: CostLedger,
}

impl Mailbox {
    fn post(&mut self, msg: ProtocolMessage) {
        let bytes = msg.payload.encode();
        debug_assert_eq!(bytes.len(), msg.payload_bytes);
        self.ledger.record(&msg);
        self.queue.push_back((msg, bytes));
    }

    fn next(&mut self) -> Option<Result<ProtocolMessage>> {
        let (msg, bytes) = self.queue.pop_front()?;
        Some(Payload::decode(msg.round, &bytes).map(|payload| ProtocolMessage { payload, ..msg }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub ranking: FeatureRanking,
    pub selected: Option<Vec<usize>>,
    pub entropy: EntropyTable,
    pub dependency: DependencyVector,
    pub global_min: Vec<f64>,
    pub global_max: Vec<f64>,
    pub global_std: Vec<f64>,
    pub radii: Vec<f64>,
    pub client_sizes: Vec<usize>,
    pub ledger: CostLedger,
}

/// Runs the whole protocol on `ds` split according to `plan`.
pub fn run_protocol(plan: &PartitionPlan, ds: &MultiLabelDataset, config: &ProtocolConfig) -> Result<ProtocolOutcome> {
    let (outcome, _) = run_protocol_with_state(plan, ds, config)?;
    Ok(outcome)
}

/// Like [`run_protocol`], also returning the final server state.
pub fn run_protocol_with_state(
    plan: &PartitionPlan,
    ds: &MultiLabelDataset,
    config: &ProtocolConfig,
) -> Result<(ProtocolOutcome, ServerState)> {
    let m = plan.clients();
    if m < 2 {
        return Err(Error::config(format!("at least two clients are required, got {m}")));
    }
    plan.validate(ds.n_instances())?;
    let distances = config.distances.clone().unwrap_or_else(|| vec![1.0; m]);
    if distances.len() != m {
        return Err(Error::config(format!("{} distances given for {m} clients", distances.len())));
    }

    let mut clients = plan
        .client_shards
        .iter()
        .enumerate()
        .map(|(c, shard)| ClientState::new(c as u32, &ds.subset(shard)?, config.lambda, config.exec))
        .collect::<Result<Vec<_>>>()?;
    let mut server = ServerState::new(ds.subset(&plan.server_labeled)?, m, config.clone())?;
    let mut mail = Mailbox {
        queue: VecDeque::new(),
        ledger: CostLedger::new(distances, config.bits_per_value)?,
    };

    while let Some(round) = server.expected_round() {
        let replies = config.exec.map_mut(&mut clients, ClientState::step);
        for reply in replies {
            if let Some(msg) = reply? {
                let dropped = config
                    .dropout
                    .is_some_and(|d| PartyId::Client(d.client) == msg.sender && d.round == msg.round);
                if !dropped {
                    mail.post(msg);
                }
            }
        }
        while let Some(msg) = mail.next() {
            server.receive(msg?)?;
        }
        let (next, payload) = server.close_round()?;
        debug_assert!(next > round);
        for c in &clients {
            mail.post(ProtocolMessage::new(next, PartyId::Server, c.party(), payload.clone())?);
        }
        while let Some(msg) = mail.next() {
            let msg = msg?;
            let PartyId::Client(c) = msg.receiver else { unreachable!() };
            clients[c as usize].receive(msg)?;
        }
    }
    for reply in config.exec.map_mut(&mut clients, ClientState::step) {
        debug_assert!(reply?.is_none());
    }

    let outcome = ProtocolOutcome {
        ranking: server.ranking.clone().expect("ranking after final round"),
        selected: server.selected.clone(),
        entropy: server.entropy.clone().expect("entropy after final round"),
        dependency: server.dependency.clone().expect("dependency after final round"),
        global_min: server.global_min.clone(),
        global_max: server.global_max.clone(),
        global_std: server.global_std.clone(),
        radii: server.radii.clone(),
        client_sizes: server.client_sizes.clone(),
        ledger: mail.ledger,
    };
    Ok((outcome, server))
}
