//! Communication-cost accounting.

use serde::{Deserialize, Serialize};

use super::message::{PartyId, ProtocolMessage, Round};
use crate::dataset::PartitionPlan;
use crate::error::{Error, Result};

pub const DEFAULT_BITS_PER_VALUE: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub round: Round,
    pub sender: PartyId,
    pub receiver: PartyId,
    pub payload_bytes: usize,
}

/// Every message exchanged, plus the per-client link distances `D_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    pub distances: Vec<f64>,
    pub entries: Vec<LedgerEntry>,
    pub bits_per_value: u32,
}

impl CostLedger {
    pub fn new(distances: Vec<f64>, bits_per_value: u32) -> Result<Self> {
        check_distances(&distances)?;
        Ok(Self {
            distances,
            entries: Vec::new(),
            bits_per_value,
        })
    }

    pub fn record(&mut self, msg: &ProtocolMessage) {
        self.entries.push(LedgerEntry {
            round: msg.round,
            sender: msg.sender,
            receiver: msg.receiver,
            payload_bytes: msg.payload_bytes,
        });
    }

    pub fn total_bytes(&self) -> usize {
        self.entries.iter().map(|e| e.payload_bytes).sum()
    }

    /// Bytes sent or received by each client.
    pub fn bytes_per_client(&self) -> Vec<usize> {
        let mut out = vec![0; self.distances.len()];
        for e in &self.entries {
            if let Some(c) = client_of(e) {
                if let Some(slot) = out.get_mut(c) {
                    *slot += e.payload_bytes;
                }
            }
        }
        out
    }

    pub fn bytes_per_round(&self) -> Vec<(Round, usize)> {
        let mut out: Vec<(Round, usize)> = Vec::new();
        for e in &self.entries {
            match out.iter_mut().find(|(r, _)| *r == e.round) {
                Some((_, b)) => *b += e.payload_bytes,
                None => out.push((e.round, e.payload_bytes)),
            }
        }
        out
    }
}

fn client_of(e: &LedgerEntry) -> Option<usize> {
    match (e.sender, e.receiver) {
        (PartyId::Client(c), _) | (_, PartyId::Client(c)) => Some(c as usize),
        _ => None,
    }
}

fn check_distances(distances: &[f64]) -> Result<()> {
    if let Some(d) = distances.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::config(format!("distances must be nonnegative, got {d}")));
    }
    Ok(())
}

/// `Σ_i D_i × bytes_i × 8` over the protocol messages each client exchanged.
pub fn communication_cost(ledger: &CostLedger) -> f64 {
    ledger
        .bytes_per_client()
        .iter()
        .zip(&ledger.distances)
        .map(|(&b, d)| d * (b as f64 * 8.0))
        .sum()
}

/// `Σ_i D_i × N_i × F × b`: shipping every client's raw shard with `features`
/// values per instance.
pub fn raw_data_cost(
    plan: &PartitionPlan,
    features: usize,
    distances: &[f64],
    bits_per_value: u32,
) -> Result<f64> {
    check_distances(distances)?;
    if distances.len() != plan.clients() {
        return Err(Error::config(format!(
            "{} distances given for {} clients",
            distances.len(),
            plan.clients()
        )));
    }
    Ok(plan
        .client_shards
        .iter()
        .zip(distances)
        .map(|(s, d)| d * s.len() as f64 * features as f64 * f64::from(bits_per_value))
        .sum())
}

/// Before/after feature-selection shipment cost with `N` instances per link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostComparison {
    pub instances: usize,
    pub features_before: usize,
    pub features_after: usize,
    pub bits_per_value: u32,
    pub before: f64,
    pub after: f64,
    pub before_formula: String,
    pub after_formula: String,
}

impl CostComparison {
    pub fn new(
        instances: usize,
        features_before: usize,
        features_after: usize,
        distances: &[f64],
        bits_per_value: u32,
    ) -> Result<Self> {
        check_distances(distances)?;
        let sum_d: f64 = distances.iter().sum();
        let cost = |f: usize| sum_d * instances as f64 * f as f64 * f64::from(bits_per_value);
        Ok(Self {
            instances,
            features_before,
            features_after,
            bits_per_value,
            before: cost(features_before),
            after: cost(features_after),
            before_formula: format!("Σ D_i × {instances} × {features_before} × b"),
            after_formula: format!("Σ D_i × {instances} × {features_after} × b"),
        })
    }

    /// `(features_after, features_before)`, the exact cost ratio in lowest terms.
    pub fn ratio(&self) -> (usize, usize) {
        let g = gcd(self.features_after, self.features_before).max(1);
        (self.features_after / g, self.features_before / g)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
