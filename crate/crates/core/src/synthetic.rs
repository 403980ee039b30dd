//! Seeded synthetic multi-label data with planted informative features.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{LabelMatrix, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub instances: usize,
    pub labels: usize,
    /// Features equal to one label plus Gaussian noise.
    pub informative: usize,
    /// Uniform noise features.
    pub noise: usize,
    pub noise_level: f64,
    pub positive_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            instances: 300,
            labels: 4,
            informative: 8,
            noise: 16,
            noise_level: 0.3,
            positive_rate: 0.35,
            seed: 0,
        }
    }
}

/// A generated dataset and the column indices of its informative features.
#[derive(Debug, Clone)]
pub struct Planted {
    pub dataset: MultiLabelDataset,
    pub informative: Vec<usize>,
}

/// Informative feature `q` tracks label `q mod L`; columns are shuffled so
/// informative features do not sit at fixed positions.
pub fn planted_dataset(spec: &SyntheticSpec) -> Result<Planted> {
    if spec.instances < 2 || spec.labels == 0 || spec.informative + spec.noise == 0 {
        return Err(Error::config("synthetic data needs n >= 2, L >= 1 and d >= 1"));
    }
    if !(0.0..=1.0).contains(&spec.positive_rate) || spec.noise_level.is_nan() || spec.noise_level < 0.0 {
        return Err(Error::config("positive rate must lie in [0, 1] and noise level be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, l) = (spec.instances, spec.labels);
    let d = spec.informative + spec.noise;

    let ys: Vec<Vec<u8>> = (0..n)
        .map(|_| (0..l).map(|_| u8::from(rng.random::<f64>() < spec.positive_rate)).collect())
        .collect();
    let mut columns: Vec<usize> = (0..d).collect();
    columns.shuffle(&mut rng);

    let mut x = Matrix::zeros(n, d);
    for (q, &col) in columns.iter().enumerate() {
        for (i, y) in ys.iter().enumerate() {
            let v = if q < spec.informative {
                let z: f64 = rng.sample(StandardNormal);
                f64::from(y[q % l]) + spec.noise_level * z
            } else {
                rng.random::<f64>()
            };
            x.set(i, col, v);
        }
    }
    let mut informative = columns[..spec.informative].to_vec();
    informative.sort_unstable();
    let dataset = MultiLabelDataset::new(
        x,
        Some(LabelMatrix::from_rows(&ys)?),
        (0..d).map(|p| format!("f{p}")).collect(),
        (0..l).map(|t| format!("y{t}")).collect(),
        "synthetic",
    )?;
    Ok(Planted { dataset, informative })
}
