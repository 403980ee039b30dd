//! Shapes, default selection sizes and published reference scores of the
//! standard benchmark datasets.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::federation::CostComparison;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScores {
    pub average_precision: f64,
    pub coverage: f64,
    pub ranking_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetPreset {
    pub name: &'static str,
    pub instances: usize,
    pub features: usize,
    pub labels: usize,
    /// Number of features kept after selection.
    pub selected: usize,
    pub reference: ReferenceScores,
}

pub const PRESETS: [DatasetPreset; 5] = [
    DatasetPreset {
        name: "cal500",
        instances: 502,
        features: 68,
        labels: 174,
        selected: 27,
        reference: ReferenceScores {
            average_precision: 0.5119,
            coverage: 128.3000,
            ranking_loss: 0.1723,
        },
    },
    DatasetPreset {
        name: "corel5k",
        instances: 5000,
        features: 499,
        labels: 374,
        selected: 150,
        reference: ReferenceScores {
            average_precision: 0.2409,
            coverage: 89.9625,
            ranking_loss: 0.1051,
        },
    },
    DatasetPreset {
        name: "emotions",
        instances: 593,
        features: 72,
        labels: 6,
        selected: 28,
        reference: ReferenceScores {
            average_precision: 0.7749,
            coverage: 2.0420,
            ranking_loss: 0.2064,
        },
    },
    DatasetPreset {
        name: "enron",
        instances: 1702,
        features: 1001,
        labels: 53,
        selected: 100,
        reference: ReferenceScores {
            average_precision: 0.6687,
            coverage: 12.8647,
            ranking_loss: 0.0847,
        },
    },
    DatasetPreset {
        name: "yeast",
        instances: 2417,
        features: 103,
        labels: 14,
        selected: 31,
        reference: ReferenceScores {
            average_precision: 0.7792,
            coverage: 6.1242,
            ranking_loss: 0.1527,
        },
    },
];

/// Looks a preset up by case-insensitive name; `emotion` also matches.
pub fn preset(name: &str) -> Option<&'static DatasetPreset> {
    let key = name.to_ascii_lowercase();
    let key = if key == "emotion" { "emotions".to_string() } else { key };
    PRESETS.iter().find(|p| p.name == key)
}

impl DatasetPreset {
    /// Raw-data shipment cost before and after selection over `distances.len()` links.
    pub fn cost_comparison(&self, distances: &[f64], bits_per_value: u32) -> Result<CostComparison> {
        CostComparison::new(self.instances, self.features, self.selected, distances, bits_per_value)
    }
}
