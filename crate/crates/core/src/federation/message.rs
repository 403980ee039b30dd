//! Protocol messages and their little-endian wire encoding.
//!
//! Every payload starts with a `u32` element count:
//!
//! | payload      | body after the count                              |
//! |--------------|---------------------------------------------------|
//! | `MinMax`     | `d` × f64 minima, then `d` × f64 maxima           |
//! | `Stats`      | `d` × (u64 count, f64 mean, f64 m2)               |
//! | `GlobalStd`  | `d` × f64                                         |
//! | `Similarity` | `d` similarity frames (see [`FuzzySimilarityMatrix::to_frame`]) |
//! | `Done`       | `m` × u32 selected feature ids                    |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FeatureStats, FuzzySimilarityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Round {
    MinMaxReport,
    MinMaxBroadcast,
    StatsReport,
    GlobalStdBroadcast,
    SimilarityReport,
    Done,
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("{self:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PartyId {
    Server,
    Client(u32),
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Server => write!(f, "server"),
            PartyId::Client(i) => write!(f, "client {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    MinMax { mins: Vec<f64>, maxs: Vec<f64> },
    Stats(Vec<FeatureStats>),
    GlobalStd(Vec<f64>),
    Similarity(Vec<FuzzySimilarityMatrix>),
    Done { selected: Vec<u32> },
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(Error::data(format!(
                "truncated payload: need {end} bytes, have {}",
                self.bytes.len()
            )));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64s(&mut self, count: usize) -> Result<Vec<f64>> {
        Ok(self
            .take(8 * count)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::data(format!(
                "{} trailing bytes after payload",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn put_f64s(out: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

impl Payload {
    /// Exact length of [`Payload::encode`].
    pub fn encoded_len(&self) -> usize {
        4 + match self {
            Payload::MinMax { mins, maxs } => 8 * (mins.len() + maxs.len()),
            Payload::Stats(s) => FeatureStats::WIRE_BYTES * s.len(),
            Payload::GlobalStd(v) => 8 * v.len(),
            Payload::Similarity(m) => m.iter().map(FuzzySimilarityMatrix::frame_len).sum(),
            Payload::Done { selected } => 4 * selected.len(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        match self {
            Payload::MinMax { mins, maxs } => {
                out.extend_from_slice(&(mins.len() as u32).to_le_bytes());
                put_f64s(&mut out, mins);
                put_f64s(&mut out, maxs);
            }
            Payload::Stats(stats) => {
                out.extend_from_slice(&(stats.len() as u32).to_le_bytes());
                stats.iter().for_each(|s| s.write(&mut out));
            }
            Payload::GlobalStd(v) => {
                out.extend_from_slice(&(v.len() as u32).to_le_bytes());
                put_f64s(&mut out, v);
            }
            Payload::Similarity(mats) => {
                out.extend_from_slice(&(mats.len() as u32).to_le_bytes());
                mats.iter().for_each(|m| m.write_frame(&mut out));
            }
            Payload::Done { selected } => {
                out.extend_from_slice(&(selected.len() as u32).to_le_bytes());
                for s in selected {
                    out.extend_from_slice(&s.to_le_bytes());
                }
            }
        }
        out
    }

    /// Decodes the payload carried in `round`.
    pub fn decode(round: Round, bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let count = r.u32()? as usize;
        let payload = match round {
            Round::MinMaxReport | Round::MinMaxBroadcast => {
                let mins = r.f64s(count)?;
                let maxs = r.f64s(count)?;
                Payload::MinMax { mins, maxs }
            }
            Round::StatsReport => Payload::Stats(
                (0..count)
                    .map(|_| FeatureStats::read(r.take(FeatureStats::WIRE_BYTES)?))
                    .collect::<Result<_>>()?,
            ),
            Round::GlobalStdBroadcast => Payload::GlobalStd(r.f64s(count)?),
            Round::SimilarityReport => {
                let mut mats = Vec::with_capacity(count);
                for _ in 0..count {
                    let (m, used) = FuzzySimilarityMatrix::from_frame(&r.bytes[r.pos..])?;
                    r.take(used)?;
                    mats.push(m);
                }
                Payload::Similarity(mats)
            }
            Round::Done => Payload::Done {
                selected: (0..count).map(|_| r.u32()).collect::<Result<_>>()?,
            },
        };
        r.finish()?;
        Ok(payload)
    }

    pub fn matches(&self, round: Round) -> bool {
        matches!(
            (self, round),
            (Payload::MinMax { .. }, Round::MinMaxReport | Round::MinMaxBroadcast)
                | (Payload::Stats(_), Round::StatsReport)
                | (Payload::GlobalStd(_), Round::GlobalStdBroadcast)
                | (Payload::Similarity(_), Round::SimilarityReport)
                | (Payload::Done { .. }, Round::Done)
        )
    }
}

/// A decoded message together with its serialized size.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolMessage {
    pub round: Round,
    pub sender: PartyId,
    pub receiver: PartyId,
    pub payload: Payload,
    pub payload_bytes: usize,
}

impl ProtocolMessage {
    pub fn new(round: Round, sender: PartyId, receiver: PartyId, payload: Payload) -> Result<Self> {
        if !payload.matches(round) {
            return Err(Error::Protocol {
                round: round.to_string(),
                message: format!("{sender} sent a payload that does not belong to this round"),
            });
        }
        Ok(Self {
            round,
            sender,
            receiver,
            payload_bytes: payload.encoded_len(),
            payload,
        })
    }
}
