use std::collections::BTreeMap;

use super::message::{PartyId, Payload, ProtocolMessage, Round};
use super::{aggregate_blocks, aggregate_std, aggregate_std_weighted, ProtocolConfig, StdAggregation};
use crate::dataset::{normalize_minmax, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::fuzzy::{fuzzy_radius, BlockSimilarity, EntropyTable, FeatureStats, FuzzySimilarityMatrix};
use crate::graph::{build_graph, select_top, weighted_pagerank, FeatureRanking};
use crate::relevance::{relevance_vector, DependencyVector};

/// The coordinating server. It holds the labeled instances and waits for all
/// clients before closing each round.
#[derive(Debug, Clone)]
pub struct ServerState {
    labeled: MultiLabelDataset,
    clients: usize,
    config: ProtocolConfig,
    expected: Option<Round>,
    received: BTreeMap<u32, Payload>,
    pub global_min: Vec<f64>,
    pub global_max: Vec<f64>,
    pub global_std: Vec<f64>,
    pub radii: Vec<f64>,
    pub client_sizes: Vec<usize>,
    pub aggregated: Vec<BlockSimilarity>,
    pub entropy: Option<EntropyTable>,
    pub dependency: Option<DependencyVector>,
    pub ranking: Option<FeatureRanking>,
    pub selected: Option<Vec<usize>>,
}

impl ServerState {
    pub fn new(labeled: MultiLabelDataset, clients: usize, config: ProtocolConfig) -> Result<Self> {
        labeled.labels_or_err()?;
        if clients < 2 {
            return Err(Error::config(format!("at least two clients are required, got {clients}")));
        }
        Ok(Self {
            labeled,
            clients,
            config,
            expected: Some(Round::MinMaxReport),
            received: BTreeMap::new(),
            global_min: Vec::new(),
            global_max: Vec::new(),
            global_std: Vec::new(),
            radii: Vec::new(),
            client_sizes: Vec::new(),
            aggregated: Vec::new(),
            entropy: None,
            dependency: None,
            ranking: None,
            selected: None,
        })
    }

    /// The report round currently being collected, if any.
    pub fn expected_round(&self) -> Option<Round> {
        self.expected
    }

    fn error(round: Round, message: impl Into<String>) -> Error {
        Error::Protocol {
            round: round.to_string(),
            message: message.into(),
        }
    }

    pub fn receive(&mut self, msg: ProtocolMessage) -> Result<()> {
        let expected = self.expected.ok_or_else(|| Self::error(msg.round, "protocol already finished"))?;
        if msg.round != expected {
            return Err(Self::error(
                msg.round,
                format!("{} reported out of order, server expects {expected}", msg.sender),
            ));
        }
        let id = match msg.sender {
            PartyId::Client(c) if (c as usize) < self.clients => c,
            other => return Err(Self::error(msg.round, format!("unknown sender {other}"))),
        };
        if self.received.insert(id, msg.payload).is_some() {
            return Err(Self::error(msg.round, format!("client {id} reported twice")));
        }
        Ok(())
    }

    /// Closes the current round once every client reported and returns the
    /// broadcast for the next one. Reports are folded in client-id order, so the
    /// arrival order has no effect.
    pub fn close_round(&mut self) -> Result<ProtocolMessageBody> {
        let round = self.expected.ok_or_else(|| Self::error(Round::Done, "protocol already finished"))?;
        if let Some(missing) = (0..self.clients as u32).find(|c| !self.received.contains_key(c)) {
            return Err(Self::error(round, format!("client {missing} did not report")));
        }
        let reports: Vec<Payload> = std::mem::take(&mut self.received).into_values().collect();
        let (next, payload) = match round {
            Round::MinMaxReport => (Some(Round::StatsReport), self.close_minmax(reports)?),
            Round::StatsReport => (Some(Round::SimilarityReport), self.close_stats(reports)?),
            Round::SimilarityReport => (None, self.close_similarity(reports)?),
            other => return Err(Self::error(other, "not a client report round")),
        };
        self.expected = next;
        Ok(payload)
    }

    fn d(&self) -> usize {
        self.labeled.n_features()
    }

    fn close_minmax(&mut self, reports: Vec<Payload>) -> Result<ProtocolMessageBody> {
        let d = self.d();
        let (mut mins, mut maxs) = self.labeled.column_ranges();
        for (c, p) in reports.into_iter().enumerate() {
            let Payload::MinMax { mins: m, maxs: x } = p else { unreachable!() };
            if m.len() != d || x.len() != d {
                return Err(Self::error(
                    Round::MinMaxReport,
                    format!("client {c}: reported {} features, expected {d}", m.len().min(x.len())),
                ));
            }
            for p in 0..d {
                mins[p] = mins[p].min(m[p]);
                maxs[p] = maxs[p].max(x[p]);
            }
        }
        self.global_min = mins.clone();
        self.global_max = maxs.clone();
        Ok((Round::MinMaxBroadcast, Payload::MinMax { mins, maxs }))
    }

    fn close_stats(&mut self, reports: Vec<Payload>) -> Result<ProtocolMessageBody> {
        let d = self.d();
        let mut per_client: Vec<Vec<FeatureStats>> = Vec::with_capacity(reports.len());
        for (c, p) in reports.into_iter().enumerate() {
            let Payload::Stats(stats) = p else { unreachable!() };
            if stats.len() != d {
                return Err(Self::error(
                    Round::StatsReport,
                    format!("client {c}: {} feature statistics, expected {d}", stats.len()),
                ));
            }
            let n = stats.first().map_or(0, |s| s.count);
            if n == 0 || stats.iter().any(|s| s.count != n) {
                return Err(Self::error(
                    Round::StatsReport,
                    format!("client {c}: inconsistent instance counts"),
                ));
            }
            per_client.push(stats);
        }
        self.client_sizes = per_client.iter().map(|s| s[0].count as usize).collect();
        let std = (0..d)
            .map(|p| {
                let column: Vec<FeatureStats> = per_client.iter().map(|s| s[p]).collect();
                match self.config.std_agg {
                    StdAggregation::PooledExact => aggregate_std(&column),
                    StdAggregation::WeightedMean => aggregate_std_weighted(&column),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.radii = std
            .iter()
            .map(|&s| fuzzy_radius(s, self.config.lambda))
            .collect::<Result<_>>()?;
        self.global_std = std.clone();
        Ok((Round::GlobalStdBroadcast, Payload::GlobalStd(std)))
    }

    fn close_similarity(&mut self, reports: Vec<Payload>) -> Result<ProtocolMessageBody> {
        let d = self.d();
        let mut per_client: Vec<Vec<FuzzySimilarityMatrix>> = Vec::with_capacity(reports.len());
        for (c, p) in reports.into_iter().enumerate() {
            let Payload::Similarity(mats) = p else { unreachable!() };
            if mats.len() != d {
                return Err(Self::error(
                    Round::SimilarityReport,
                    format!("client {c}: {} similarity matrices, expected {d}", mats.len()),
                ));
            }
            for (p, m) in mats.iter().enumerate() {
                if m.feature_id as usize != p || m.size() != self.client_sizes[c] {
                    return Err(Self::error(
                        Round::SimilarityReport,
                        format!(
                            "client {c}: matrix {p} has feature id {} and size {}, expected {p} and {}",
                            m.feature_id,
                            m.size(),
                            self.client_sizes[c]
                        ),
                    ));
                }
                if m.radius.to_bits() != self.radii[p].to_bits() {
                    return Err(Self::error(
                        Round::SimilarityReport,
                        format!("client {c}: feature {p} built with radius {}, expected {}", m.radius, self.radii[p]),
                    ));
                }
            }
            per_client.push(mats);
        }
        let mut columns: Vec<Vec<FuzzySimilarityMatrix>> = vec![Vec::with_capacity(per_client.len()); d];
        for mats in per_client {
            for (p, m) in mats.into_iter().enumerate() {
                columns[p].push(m);
            }
        }
        self.aggregated = columns.into_iter().map(aggregate_blocks).collect::<Result<_>>()?;
        self.finish()
    }

    fn finish(&mut self) -> Result<ProtocolMessageBody> {
        let exec = self.config.exec;
        let entropy = EntropyTable::compute(&self.aggregated, exec)?;

        let norm = normalize_minmax(&self.labeled, &self.global_min, &self.global_max)?;
        let labeled_sims = exec.map(self.d(), |p| {
            FuzzySimilarityMatrix::build(&norm.features.column(p), self.radii[p], p as u32)
        });
        let dependency = relevance_vector(
            norm.labels_or_err()?,
            &labeled_sims,
            self.config.knn_k,
            self.config.lambda,
            exec,
        )?;

        let graph = build_graph(&dependency.values, &entropy.corr_dist, self.config.zeta)?;
        let ranking = weighted_pagerank(&graph, self.config.pagerank_tol, self.config.pagerank_max_iter, exec)?;
        let selected = self.config.select.map(|m| select_top(&ranking, m)).transpose()?;

        let ids = selected.iter().flatten().map(|&p| p as u32).collect();
        self.entropy = Some(entropy);
        self.dependency = Some(dependency);
        self.ranking = Some(ranking);
        self.selected = selected;
        Ok((Round::Done, Payload::Done { selected: ids }))
    }
}

/// Round and payload of a server broadcast.
pub type ProtocolMessageBody = (Round, Payload);
