//! Feature–label relevance on the server's labeled instances.
//!
//! Instances are compared in label space with a centered (Pearson) similarity;
//! each instance gets a soft same-class set ST and a different-class set DT of
//! size `k`. A feature's k-nearest-neighbor dependency degree is the mean, over
//! labeled instances, of how dissimilar each instance is to its DT members
//! under that feature's fuzzy relation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::LabelMatrix;
use crate::error::{check_len, Error, Result};
use crate::exec::Execution;
use crate::fuzzy::FuzzySimilarityMatrix;
use crate::matrix::Matrix;

/// Label-space similarity between instances, in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSimilarityMatrix {
    pub values: Matrix,
    /// Rows whose label vector has zero variance (all 0 or all 1).
    pub degenerate: Vec<bool>,
}

impl LabelSimilarityMatrix {
    pub fn size(&self) -> usize {
        self.values.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }
}

/// Per-instance ST and DT index lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborSets {
    pub st: Vec<Vec<usize>>,
    pub dt: Vec<Vec<usize>>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyVector {
    pub values: Vec<f64>,
    pub k: usize,
    pub lambda: f64,
}

impl DependencyVector {
    /// Two-column text table: `feature_id<TAB>dependency`.
    pub fn write_table<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "feature_id\tdependency")?;
        for (p, v) in self.values.iter().enumerate() {
            writeln!(out, "{p}\t{v:.17}")?;
        }
        Ok(())
    }
}

/// Centered cosine similarity of the binary label vectors.
pub fn label_similarity(labels: &LabelMatrix) -> Result<LabelSimilarityMatrix> {
    let s = labels.rows();
    let l = labels.labels();
    if l < 2 {
        return Err(Error::data(format!(
            "label similarity needs at least two labels, got {l}"
        )));
    }
    if s < 2 {
        return Err(Error::data(format!(
            "label similarity needs at least two instances, got {s}"
        )));
    }
    let centered: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            let row = labels.row(i);
            let mean = row.iter().map(|&v| f64::from(v)).sum::<f64>() / l as f64;
            row.iter().map(|&v| f64::from(v) - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let degenerate: Vec<bool> = norms.iter().map(|&n| n == 0.0).collect();

    let mut values = Matrix::zeros(s, s);
    for i in 0..s {
        values.set(i, i, 1.0);
        for j in 0..i {
            let sim = if degenerate[i] || degenerate[j] {
                0.0
            } else {
                let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
                (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0)
            };
            values.set(i, j, sim);
            values.set(j, i, sim);
        }
    }
    Ok(LabelSimilarityMatrix { values, degenerate })
}

/// Chooses ST (most label-similar) and DT (least label-similar) sets.
///
/// Ties are broken by ascending index; degenerate candidates sort after all
/// others for ST. When the preferred top-k and bottom-k overlap (ties or
/// `2k > s - 1`), a contested candidate stays in ST if its similarity is
/// non-negative and otherwise in DT, and the losing set takes its next
/// candidate. When `2k > s - 1` the candidates are split by rank: ST takes
/// the top `ceil((s-1)/2)` and DT the rest.
pub fn select_neighbor_sets(sim: &LabelSimilarityMatrix, k: usize) -> Result<NeighborSets> {
    let s = sim.size();
    if k == 0 {
        return Err(Error::config("neighbor count k must be at least 1"));
    }
    if k >= s {
        return Err(Error::config(format!(
            "neighbor count k = {k} must be below the labeled set size {s}"
        )));
    }
    let mut st = Vec::with_capacity(s);
    let mut dt = Vec::with_capacity(s);
    for i in 0..s {
        let (a, b) = neighbors_of(sim, i, k);
        st.push(a);
        dt.push(b);
    }
    Ok(NeighborSets { st, dt, k })
}

fn neighbors_of(sim: &LabelSimilarityMatrix, i: usize, k: usize) -> (Vec<usize>, Vec<usize>) {
    let s = sim.size();
    let value = |j: usize| sim.get(i, j);
    let others: Vec<usize> = (0..s).filter(|&j| j != i).collect();

    let mut desc = others.clone();
    desc.sort_by(|&a, &b| {
        sim.degenerate[a]
            .cmp(&sim.degenerate[b])
            .then_with(|| value(b).total_cmp(&value(a)))
            .then(a.cmp(&b))
    });
    let mut asc = others;
    asc.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));

    if 2 * k > s - 1 {
        let top = (s - 1).div_ceil(2);
        let mut st: Vec<usize> = desc[..top].to_vec();
        let mut dt: Vec<usize> = desc[top..].to_vec();
        st.sort_unstable();
        dt.sort_unstable();
        return (st, dt);
    }

    let st_pref = &desc[..k];
    let dt_pref = &asc[..k];
    #[derive(Clone, Copy, PartialEq)]
    enum Side {
        Free,
        St,
        Dt,
    }
    let mut side = vec![Side::Free; s];
    for &j in st_pref {
        side[j] = Side::St;
    }
    for &j in dt_pref {
        side[j] = match side[j] {
            Side::St if value(j) >= 0.0 && !sim.degenerate[j] => Side::St,
            _ => Side::Dt,
        };
    }
    let fill = |side: &mut Vec<Side>, order: &[usize], want: Side| {
        let mut have = side.iter().filter(|&&x| x == want).count();
        for &j in order {
            if have == k {
                break;
            }
            if side[j] == Side::Free {
                side[j] = want;
                have += 1;
            }
        }
    };
    fill(&mut side, &desc, Side::St);
    fill(&mut side, &asc, Side::Dt);

    let pick = |want: Side| -> Vec<usize> { (0..s).filter(|&j| side[j] == want).collect() };
    (pick(Side::St), pick(Side::Dt))
}

/// Mean of `1 - r_ij` over `x_j ∈ DT(x_i)`.
pub fn knn_lower_approximation(sim_f: &FuzzySimilarityMatrix, dt: &[usize], i: usize) -> Result<f64> {
    mean_over(sim_f, dt, i, |r| 1.0 - r)
}

/// Mean of `r_ij` over `x_j ∈ ST(x_i)`.
pub fn knn_upper_approximation(sim_f: &FuzzySimilarityMatrix, st: &[usize], i: usize) -> Result<f64> {
    mean_over(sim_f, st, i, |r| r)
}

fn mean_over(
    sim_f: &FuzzySimilarityMatrix,
    set: &[usize],
    i: usize,
    term: impl Fn(f64) -> f64,
) -> Result<f64> {
    let n = sim_f.size();
    if set.is_empty() {
        return Err(Error::data(format!("empty neighbor set for instance {i}")));
    }
    if let Some(&bad) = set.iter().chain([&i]).find(|&&j| j >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let row = sim_f.row(i);
    Ok(set.iter().map(|&j| term(row[j])).sum::<f64>() / set.len() as f64)
}

/// k-nearest-neighbor fuzzy dependency degree of the labels on one feature.
pub fn dependency_degree(sim_f: &FuzzySimilarityMatrix, sets: &NeighborSets) -> Result<f64> {
    let s = sim_f.size();
    if s == 0 {
        return Err(Error::data("no labeled instances"));
    }
    check_len(s, sets.dt.len())?;
    let total = (0..s)
        .map(|i| knn_lower_approximation(sim_f, &sets.dt[i], i))
        .sum::<Result<f64>>()?;
    Ok(total / s as f64)
}

/// Dependency degree of every feature, given relations built on the labeled set.
pub fn relevance_vector(
    labels: &LabelMatrix,
    sims: &[FuzzySimilarityMatrix],
    k: usize,
    lambda: f64,
    exec: Execution,
) -> Result<DependencyVector> {
    for m in sims {
        check_len(labels.rows(), m.size())?;
    }
    let sets = select_neighbor_sets(&label_similarity(labels)?, k)?;
    let values = exec.try_map(sims.len(), |p| dependency_degree(&sims[p], &sets))?;
    Ok(DependencyVector { values, k, lambda })
}
