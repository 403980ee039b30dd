//! MLKNN classifier and the ranking metrics used to judge a feature subset.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{LabelMatrix, MultiLabelDataset};
use crate::error::{check_len, Error, Result};
use crate::exec::Execution;
use crate::matrix::Matrix;

pub const DEFAULT_MLKNN_K: usize = 10;
pub const DEFAULT_SMOOTH: f64 = 1.0;

/// Trained MLKNN model. Posterior tables are indexed `[label][count]` for
/// `count` in `0..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlknnModel {
    pub k: usize,
    pub smooth: f64,
    pub prior: Vec<f64>,
    pub likelihood_pos: Vec<Vec<f64>>,
    pub likelihood_neg: Vec<Vec<f64>>,
    train: Matrix,
    labels: LabelMatrix,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` rows of `train` closest to `x`, ties by index; `skip`
/// excludes one row (the query itself during training).
fn nearest(train: &Matrix, x: &[f64], k: usize, skip: Option<usize>) -> Vec<usize> {
    let mut cand: Vec<(f64, usize)> = (0..train.rows())
        .filter(|&j| Some(j) != skip)
        .map(|j| (squared_distance(train.row(j), x), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < cand.len() {
        cand.select_nth_unstable_by(k, cmp);
        cand.truncate(k);
    }
    cand.sort_by(cmp);
    cand.into_iter().map(|(_, j)| j).collect()
}

fn label_counts(labels: &LabelMatrix, neighbors: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; labels.labels()];
    for &j in neighbors {
        for (l, &y) in labels.row(j).iter().enumerate() {
            counts[l] += y as usize;
        }
    }
    counts
}

pub fn mlknn_train(train: &MultiLabelDataset, k: usize, smooth: f64, exec: Execution) -> Result<MlknnModel> {
    let labels = train.labels_or_err()?;
    let n = train.n_instances();
    if k == 0 || k >= n {
        return Err(Error::config(format!(
            "MLKNN needs 1 <= k < number of training instances ({n}), got {k}"
        )));
    }
    if !(smooth > 0.0 && smooth.is_finite()) {
        return Err(Error::config(format!("smoothing must be positive, got {smooth}")));
    }
    let n_labels = labels.labels();
    let prior = (0..n_labels)
        .map(|l| {
            let positives: usize = (0..n).map(|i| labels.get(i, l) as usize).sum();
            (smooth + positives as f64) / (2.0 * smooth + n as f64)
        })
        .collect();

    let x = &train.features;
    let counts = exec.map(n, |i| label_counts(labels, &nearest(x, x.row(i), k, Some(i))));
    let mut hist_pos = vec![vec![0usize; k + 1]; n_labels];
    let mut hist_neg = vec![vec![0usize; k + 1]; n_labels];
    for (i, c) in counts.iter().enumerate() {
        for l in 0..n_labels {
            if labels.get(i, l) == 1 {
                hist_pos[l][c[l]] += 1;
            } else {
                hist_neg[l][c[l]] += 1;
            }
        }
    }
    let smoothed = |hist: &[usize]| -> Vec<f64> {
        let total: usize = hist.iter().sum();
        let denom = smooth * (k + 1) as f64 + total as f64;
        hist.iter().map(|&h| (smooth + h as f64) / denom).collect()
    };
    Ok(MlknnModel {
        k,
        smooth,
        prior,
        likelihood_pos: hist_pos.iter().map(|h| smoothed(h)).collect(),
        likelihood_neg: hist_neg.iter().map(|h| smoothed(h)).collect(),
        train: x.clone(),
        labels: labels.clone(),
    })
}

/// Per-label posterior `P(H_1 | E)` for every test row.
pub fn mlknn_predict(model: &MlknnModel, test: &Matrix, exec: Execution) -> Result<PredictionMatrix> {
    if test.rows() > 0 {
        check_len(model.train.cols(), test.cols())?;
    }
    let n_labels = model.labels.labels();
    let rows = exec.map(test.rows(), |i| {
        let c = label_counts(&model.labels, &nearest(&model.train, test.row(i), model.k, None));
        (0..n_labels)
            .map(|l| {
                let pos = model.prior[l] * model.likelihood_pos[l][c[l]];
                let neg = (1.0 - model.prior[l]) * model.likelihood_neg[l][c[l]];
                pos / (pos + neg)
            })
            .collect::<Vec<f64>>()
    });
    let data = rows.into_iter().flatten().collect();
    Ok(PredictionMatrix {
        scores: Matrix::from_vec(test.rows(), n_labels, data)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionMatrix {
    pub scores: Matrix,
}

impl PredictionMatrix {
    /// 1-based rank of every label of instance `i`: higher score first, lower
    /// label index first on ties.
    pub fn ranks(&self, i: usize) -> Vec<usize> {
        ranks_of(self.scores.row(i))
    }
}

fn ranks_of(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; scores.len()];
    for (pos, &l) in order.iter().enumerate() {
        ranks[l] = pos + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

impl Direction {
    pub fn arrow(self) -> &'static str {
        match self {
            Direction::HigherIsBetter => "↑",
            Direction::LowerIsBetter => "↓",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub direction: Direction,
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} {}", self.value, self.direction.arrow())
    }
}

fn per_instance<F>(pred: &PredictionMatrix, truth: &LabelMatrix, direction: Direction, f: F) -> Result<MetricValue>
where
    F: Fn(&[usize], &[u8]) -> Option<f64>,
{
    check_len(truth.rows(), pred.scores.rows())?;
    check_len(truth.labels(), pred.scores.cols())?;
    let mut total = 0.0;
    let mut evaluated = 0;
    for i in 0..truth.rows() {
        if let Some(v) = f(&pred.ranks(i), truth.row(i)) {
            total += v;
            evaluated += 1;
        }
    }
    if evaluated == 0 {
        return Err(Error::data("no instance can be evaluated: every label set is empty or full"));
    }
    Ok(MetricValue {
        value: total / evaluated as f64,
        evaluated,
        skipped: truth.rows() - evaluated,
        direction,
    })
}

fn positives(y: &[u8]) -> Vec<usize> {
    (0..y.len()).filter(|&l| y[l] == 1).collect()
}

/// Mean over instances of `(1/|y|) Σ_{l∈y} |{l'∈y : rank(l') <= rank(l)}| / rank(l)`.
pub fn average_precision(pred: &PredictionMatrix, truth: &LabelMatrix) -> Result<MetricValue> {
    per_instance(pred, truth, Direction::HigherIsBetter, |ranks, y| {
        let pos = positives(y);
        if pos.is_empty() {
            return None;
        }
        let sum: f64 = pos
            .iter()
            .map(|&l| {
                let above = pos.iter().filter(|&&m| ranks[m] <= ranks[l]).count();
                above as f64 / ranks[l] as f64
            })
            .sum();
        Some(sum / pos.len() as f64)
    })
}

/// Mean of `max_{l∈y} rank(l) - 1`.
pub fn coverage(pred: &PredictionMatrix, truth: &LabelMatrix) -> Result<MetricValue> {
    per_instance(pred, truth, Direction::LowerIsBetter, |ranks, y| {
        positives(y).iter().map(|&l| ranks[l]).max().map(|r| (r - 1) as f64)
    })
}

/// Fraction of (relevant, irrelevant) label pairs ranked in the wrong order.
pub fn ranking_loss(pred: &PredictionMatrix, truth: &LabelMatrix) -> Result<MetricValue> {
    per_instance(pred, truth, Direction::LowerIsBetter, |ranks, y| {
        let pos = positives(y);
        let neg: Vec<usize> = (0..y.len()).filter(|&l| y[l] == 0).collect();
        if pos.is_empty() || neg.is_empty() {
            return None;
        }
        let wrong = pos
            .iter()
            .flat_map(|&a| neg.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| ranks[a] > ranks[b])
            .count();
        Some(wrong as f64 / (pos.len() * neg.len()) as f64)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub average_precision: MetricValue,
    pub coverage: MetricValue,
    pub ranking_loss: MetricValue,
}

/// Trains MLKNN on `train` restricted to `features`, then scores `test`.
pub fn evaluate_subset(
    train: &MultiLabelDataset,
    test: &MultiLabelDataset,
    features: &[usize],
    k: usize,
    smooth: f64,
    exec: Execution,
) -> Result<Metrics> {
    let model = mlknn_train(&train.select_features(features)?, k, smooth, exec)?;
    let pred = mlknn_predict(&model, &test.features.select_cols(features), exec)?;
    let truth = test.labels_or_err()?;
    Ok(Metrics {
        average_precision: average_precision(&pred, truth)?,
        coverage: coverage(&pred, truth)?,
        ranking_loss: ranking_loss(&pred, truth)?,
    })
}
