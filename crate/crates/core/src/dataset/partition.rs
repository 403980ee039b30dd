//! Seeded train/test split and Dirichlet label-skew partitioning across clients.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::MultiLabelDataset;
use crate::error::{Error, Result};

/// Guards `floor` against products like `10 * 0.7 = 6.999…`.
const FLOOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub clients: usize,
    /// Dirichlet concentration; small values give strongly skewed shards.
    pub skew_alpha: f64,
    pub labeled_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for PartitionParams {
    fn default() -> Self {
        Self {
            clients: 10,
            skew_alpha: 0.5,
            labeled_fraction: 0.2,
            test_fraction: 0.3,
            seed: 0,
        }
    }
}

/// Who holds which instance. Index sets are sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub client_shards: Vec<Vec<usize>>,
    pub server_labeled: Vec<usize>,
    pub test_set: Vec<usize>,
    pub seed: u64,
    pub skew_alpha: f64,
    pub labeled_fraction: f64,
    pub test_fraction: f64,
}

impl PartitionPlan {
    pub fn clients(&self) -> usize {
        self.client_shards.len()
    }

    /// Server-labeled indices followed by every shard, in client order.
    pub fn training_indices(&self) -> Vec<usize> {
        let mut all = self.server_labeled.clone();
        for shard in &self.client_shards {
            all.extend_from_slice(shard);
        }
        all.sort_unstable();
        all
    }

    /// Checks disjointness, coverage bounds, shard non-emptiness and `M >= 2`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.clients() < 2 {
            return Err(Error::config(format!(
                "at least two clients are required, plan has {}",
                self.clients()
            )));
        }
        let mut seen = vec![false; n];
        let sets = self
            .client_shards
            .iter()
            .chain([&self.server_labeled, &self.test_set]);
        for (j, set) in sets.enumerate() {
            if j < self.clients() && set.is_empty() {
                return Err(Error::data(format!("client shard {j} is empty")));
            }
            for &i in set {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, len: n });
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::data(format!("instance {i} assigned twice")));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn floor_count(n: usize, fraction: f64) -> usize {
    (n as f64 * fraction + FLOOR_EPS).floor() as usize
}

/// One Dirichlet(alpha, …, alpha) draw over `m` outcomes.
fn dirichlet(rng: &mut ChaCha8Rng, alpha: f64, m: usize) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha validated positive");
    let mut p: Vec<f64> = (0..m).map(|_| gamma.sample(rng)).collect();
    let total: f64 = p.iter().sum();
    if total > 0.0 && total.is_finite() {
        p.iter_mut().for_each(|v| *v /= total);
    } else {
        // Every gamma draw underflowed (tiny alpha): all mass on the largest.
        let best = p
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        p = vec![0.0; m];
        p[best] = 1.0;
    }
    p
}

/// Splits `ds` into a test set, the server's labeled set and `clients` unlabeled
/// shards whose anchor-label mix follows a per-class Dirichlet draw.
///
/// The training count is `floor(n * (1 - test_fraction))` and the test set takes
/// the remainder; the server receives `floor(n_train * labeled_fraction)`.
/// Per anchor class, client `j` receives `floor(p_j * n_class)` instances and the
/// leftovers of all classes are dealt round-robin starting at client 0.
pub fn partition_noniid(ds: &MultiLabelDataset, params: &PartitionParams) -> Result<PartitionPlan> {
    let PartitionParams {
        clients,
        skew_alpha,
        labeled_fraction,
        test_fraction,
        seed,
    } = *params;
    if clients < 2 {
        return Err(Error::config(format!(
            "at least two clients are required, got {clients}"
        )));
    }
    for (name, f) in [("labeled_fraction", labeled_fraction), ("test_fraction", test_fraction)] {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::config(format!("{name} must lie in (0, 1), got {f}")));
        }
    }
    if !(skew_alpha > 0.0 && skew_alpha.is_finite()) {
        return Err(Error::config(format!(
            "skew alpha must be positive and finite, got {skew_alpha}"
        )));
    }
    let labels = ds.labels_or_err()?;

    let n = ds.n_instances();
    let n_train = floor_count(n, 1.0 - test_fraction);
    let n_test = n - n_train;
    let n_labeled = floor_count(n_train, labeled_fraction);
    let n_pool = n_train - n_labeled;
    if n_train == 0 {
        return Err(Error::data("fractions leave no training data"));
    }
    if n_labeled == 0 {
        return Err(Error::data("labeled fraction leaves the server no labeled instances"));
    }
    if n_pool < clients {
        return Err(Error::data(format!(
            "{n_pool} unlabeled instances cannot fill {clients} non-empty shards"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (test, rest) = order.split_at(n_test);
    let (labeled, pool) = rest.split_at(n_labeled);

    // Sentinel class `L` collects instances without any positive label.
    let sentinel = labels.labels();
    let mut by_anchor: Vec<Vec<usize>> = vec![Vec::new(); sentinel + 1];
    for &i in pool {
        by_anchor[labels.anchor(i).unwrap_or(sentinel)].push(i);
    }

    let mut shards: Vec<Vec<usize>> = vec![Vec::new(); clients];
    let mut leftovers = Vec::new();
    for members in by_anchor.iter().filter(|m| !m.is_empty()) {
        let props = dirichlet(&mut rng, skew_alpha, clients);
        let mut cursor = 0;
        for (shard, p) in shards.iter_mut().zip(&props) {
            let take = ((p * members.len() as f64).floor() as usize).min(members.len() - cursor);
            shard.extend_from_slice(&members[cursor..cursor + take]);
            cursor += take;
        }
        leftovers.extend_from_slice(&members[cursor..]);
    }
    for (t, i) in leftovers.into_iter().enumerate() {
        shards[t % clients].push(i);
    }
    if let Some(j) = shards.iter().position(Vec::is_empty) {
        return Err(Error::data(format!(
            "client shard {j} would be empty; raise skew alpha or lower the client count"
        )));
    }

    let sorted = |s: &[usize]| {
        let mut v = s.to_vec();
        v.sort_unstable();
        v
    };
    shards.iter_mut().for_each(|s| s.sort_unstable());
    Ok(PartitionPlan {
        client_shards: shards,
        server_labeled: sorted(labeled),
        test_set: sorted(test),
        seed,
        skew_alpha,
        labeled_fraction,
        test_fraction,
    })
}
