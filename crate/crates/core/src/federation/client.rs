use serde::{Deserialize, Serialize};

use super::message::{PartyId, Payload, ProtocolMessage, Round};
use crate::dataset::{normalize_minmax, MultiLabelDataset};
use crate::error::{check_len, Error, Result};
use crate::exec::Execution;
use crate::fuzzy::{fuzzy_radius, FeatureStats, FuzzySimilarityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClientPhase {
    Start,
    AwaitingMinMax,
    AwaitingStd,
    AwaitingDone,
    Finished,
}

/// One client holding an unlabeled shard.
#[derive(Debug, Clone)]
pub struct ClientState {
    id: u32,
    shard: MultiLabelDataset,
    lambda: f64,
    exec: Execution,
    phase: ClientPhase,
    inbox: Option<ProtocolMessage>,
    normalized: Option<MultiLabelDataset>,
    cached: Vec<FuzzySimilarityMatrix>,
    selected: Option<Vec<usize>>,
}

impl ClientState {
    /// Labels are stripped from `shard` on entry.
    pub fn new(id: u32, shard: &MultiLabelDataset, lambda: f64, exec: Execution) -> Result<Self> {
        if shard.n_instances() == 0 {
            return Err(Error::config(format!("client {id} has an empty shard")));
        }
        fuzzy_radius(0.0, lambda)?;
        Ok(Self {
            id,
            shard: shard.without_labels(),
            lambda,
            exec,
            phase: ClientPhase::Start,
            inbox: None,
            normalized: None,
            cached: Vec::new(),
            selected: None,
        })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn party(&self) -> PartyId {
        PartyId::Client(self.id)
    }

    pub fn phase(&self) -> ClientPhase {
        self.phase
    }

    pub fn shard_size(&self) -> usize {
        self.shard.n_instances()
    }

    /// Similarity matrices sent in the last round, one per feature.
    pub fn cached_similarities(&self) -> &[FuzzySimilarityMatrix] {
        &self.cached
    }

    pub fn selected(&self) -> Option<&[usize]> {
        self.selected.as_deref()
    }

    pub fn receive(&mut self, msg: ProtocolMessage) -> Result<()> {
        if self.inbox.is_some() {
            return Err(self.error(msg.round, "received a second message before processing the first"));
        }
        self.inbox = Some(msg);
        Ok(())
    }

    fn error(&self, round: Round, message: &str) -> Error {
        Error::Protocol {
            round: round.to_string(),
            message: format!("client {}: {message}", self.id),
        }
    }

    fn reply(&self, round: Round, payload: Payload) -> Result<Option<ProtocolMessage>> {
        ProtocolMessage::new(round, self.party(), PartyId::Server, payload).map(Some)
    }

    /// Advances one phase, consuming the pending message if the phase needs one.
    pub fn step(&mut self) -> Result<Option<ProtocolMessage>> {
        if self.phase == ClientPhase::Start {
            let (mins, maxs) = self.shard.column_ranges();
            self.phase = ClientPhase::AwaitingMinMax;
            return self.reply(Round::MinMaxReport, Payload::MinMax { mins, maxs });
        }
        let msg = match self.inbox.take() {
            Some(m) => m,
            None => return Ok(None),
        };
        match (self.phase, msg.round, msg.payload) {
            (ClientPhase::AwaitingMinMax, Round::MinMaxBroadcast, Payload::MinMax { mins, maxs }) => {
                let norm = normalize_minmax(&self.shard, &mins, &maxs)?;
                let stats = (0..norm.n_features())
                    .map(|p| FeatureStats::from_values(&norm.features.column(p)))
                    .collect::<Result<Vec<_>>>()?;
                self.normalized = Some(norm);
                self.phase = ClientPhase::AwaitingStd;
                self.reply(Round::StatsReport, Payload::Stats(stats))
            }
            (ClientPhase::AwaitingStd, Round::GlobalStdBroadcast, Payload::GlobalStd(std)) => {
                let norm = self.normalized.as_ref().expect("normalized in previous phase");
                check_len(norm.n_features(), std.len())?;
                let radii = std
                    .iter()
                    .map(|&s| fuzzy_radius(s, self.lambda))
                    .collect::<Result<Vec<_>>>()?;
                self.cached = self.exec.map(radii.len(), |p| {
                    FuzzySimilarityMatrix::build(&norm.features.column(p), radii[p], p as u32)
                });
                self.phase = ClientPhase::AwaitingDone;
                self.reply(Round::SimilarityReport, Payload::Similarity(self.cached.clone()))
            }
            (ClientPhase::AwaitingDone, Round::Done, Payload::Done { selected }) => {
                self.selected = Some(selected.into_iter().map(|s| s as usize).collect());
                self.phase = ClientPhase::Finished;
                Ok(None)
            }
            (phase, round, _) => Err(self.error(round, &format!("unexpected message in phase {phase:?}"))),
        }
    }
}
