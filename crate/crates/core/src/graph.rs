//! Feature graph and weighted PageRank ranking.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::exec::Execution;
use crate::matrix::Matrix;

pub const DEFAULT_ZETA: f64 = 0.85;

/// Complete feature graph: vertex weights from relevance, edge weights from
/// correlation distance. Zero-weight edges are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureGraph {
    pub vertex_weights: Vec<f64>,
    pub edge_weights: Matrix,
    pub zeta: f64,
}

impl FeatureGraph {
    pub fn vertices(&self) -> usize {
        self.vertex_weights.len()
    }

    /// Neighbors of `i`: features with a strictly positive edge weight.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.edge_weights.row(i);
        (0..self.vertices()).filter(move |&j| j != i && row[j] > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub scores: Vec<f64>,
    /// Feature indices by descending score, ascending index on ties.
    pub order: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
}

impl FeatureRanking {
    pub fn from_scores(scores: Vec<f64>, iterations: usize, converged: bool) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Self {
            scores,
            order,
            iterations,
            converged,
        }
    }

    /// Text table `rank<TAB>feature_id<TAB>score`, ranks starting at 1.
    pub fn write_table<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "rank\tfeature_id\tscore")?;
        for (r, &p) in self.order.iter().enumerate() {
            writeln!(out, "{}\t{p}\t{:.17e}", r + 1, self.scores[p])?;
        }
        Ok(())
    }
}

/// Builds the graph; vertex weights are rescaled to sum to one.
pub fn build_graph(relevance: &[f64], corr_dist: &Matrix, zeta: f64) -> Result<FeatureGraph> {
    let d = relevance.len();
    check_len(d, corr_dist.rows())?;
    check_len(d, corr_dist.cols())?;
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::config(format!("zeta must lie in (0, 1), got {zeta}")));
    }
    if let Some(p) = relevance.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::data(format!(
            "vertex weight {} of feature {p} is negative or non-finite",
            relevance[p]
        )));
    }
    let mut edges = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let w = corr_dist.get(i, j);
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::data(format!("edge weight ({i},{j}) = {w} is invalid")));
            }
            if w != corr_dist.get(j, i) {
                return Err(Error::data(format!("edge weights not symmetric at ({i},{j})")));
            }
            if i != j {
                edges.set(i, j, w);
            }
        }
    }
    let total: f64 = relevance.iter().sum();
    // All-zero relevance carries no preference; fall back to uniform weights.
    let vertex_weights = if total > 0.0 {
        relevance.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / d as f64; d]
    };
    Ok(FeatureGraph {
        vertex_weights,
        edge_weights: edges,
        zeta,
    })
}

/// Fixed-point iteration of
/// `G_i = (1 - ζ) W_i + ζ Σ_{j ∈ B(i)} G_j w_ij / Σ_{z ∈ B(j)} w_jz`,
/// starting from `G = W` and stopping once the L1 change drops below `tol`.
pub fn weighted_pagerank(
    g: &FeatureGraph,
    tol: f64,
    max_iter: usize,
    exec: Execution,
) -> Result<FeatureRanking> {
    if !(g.zeta > 0.0 && g.zeta < 1.0) {
        return Err(Error::config(format!("zeta must lie in (0, 1), got {}", g.zeta)));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::config(format!("tolerance must be positive, got {tol}")));
    }
    let d = g.vertices();
    let neighbors: Vec<Vec<usize>> = (0..d).map(|i| g.neighbors(i).collect()).collect();
    let out_weight: Vec<f64> = (0..d)
        .map(|j| neighbors[j].iter().map(|&z| g.edge_weights.get(j, z)).sum())
        .collect();

    let mut scores = g.vertex_weights.clone();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let next = exec.map(d, |i| {
            let inflow: f64 = neighbors[i]
                .iter()
                .map(|&j| scores[j] * g.edge_weights.get(i, j) / out_weight[j])
                .sum();
            (1.0 - g.zeta) * g.vertex_weights[i] + g.zeta * inflow
        });
        iterations += 1;
        let change: f64 = next.iter().zip(&scores).map(|(a, b)| (a - b).abs()).sum();
        scores = next;
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(FeatureRanking::from_scores(scores, iterations, converged))
}

/// First `m` features of the ranking.
pub fn select_top(r: &FeatureRanking, m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > r.order.len() {
        return Err(Error::config(format!(
            "number of selected features must be in 1..={}, got {m}",
            r.order.len()
        )));
    }
    Ok(r.order[..m].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank(g: &FeatureGraph) -> FeatureRanking {
        weighted_pagerank(g, 1e-10, 200, Execution::Sequential).unwrap()
    }

    #[test]
    fn two_vertex_graph() {
        let corr = Matrix::from_rows(&[vec![0.0, 0.4], vec![0.4, 0.0]]).unwrap();
        let g = build_graph(&[0.1, 0.3], &corr, 0.85).unwrap();
        assert!((g.vertex_weights[0] - 0.25).abs() < 1e-15);
        assert!((g.vertex_weights[1] - 0.75).abs() < 1e-15);
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1]);

        let sym = build_graph(&[0.2, 0.2], &corr, 0.85).unwrap();
        let r = rank(&sym);
        assert_eq!(r.scores[0], r.scores[1]);
        assert_eq!(r.order, vec![0, 1]);
    }

    #[test]
    fn edgeless_graph_is_scaled_weights() {
        let g = build_graph(&[0.5, 0.3, 0.2], &Matrix::zeros(3, 3), 0.85).unwrap();
        let r = rank(&g);
        assert!(r.converged);
        assert_eq!(r.iterations, 2);
        for (s, w) in r.scores.iter().zip(&g.vertex_weights) {
            assert_eq!(*s, (1.0 - 0.85) * w);
        }
    }

    #[test]
    fn single_vertex() {
        let g = build_graph(&[0.7], &Matrix::zeros(1, 1), 0.85).unwrap();
        let r = rank(&g);
        assert!((r.scores[0] - 0.15).abs() < 1e-15);
        assert_eq!(select_top(&r, 1).unwrap(), vec![0]);
    }

    #[test]
    fn rejects_negative_and_bad_zeta() {
        let bad = Matrix::from_rows(&[vec![0.0, -0.1], vec![-0.1, 0.0]]).unwrap();
        assert!(build_graph(&[0.1, 0.2], &bad, 0.85).is_err());
        assert!(build_graph(&[0.1, 0.2], &Matrix::zeros(2, 2), 1.0).is_err());
        assert!(build_graph(&[-0.1, 0.2], &Matrix::zeros(2, 2), 0.85).is_err());
    }

    #[test]
    fn select_top_bounds() {
        let r = FeatureRanking::from_scores(vec![0.1, 0.3, 0.3, 0.05], 1, true);
        assert_eq!(r.order, vec![1, 2, 0, 3]);
        assert_eq!(select_top(&r, 1).unwrap(), vec![1]);
        assert_eq!(select_top(&r, 4).unwrap().len(), 4);
        assert!(select_top(&r, 0).is_err());
        assert!(select_top(&r, 5).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let corr = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let g = build_graph(&[0.9, 0.1], &corr, 0.85).unwrap();
        let r = weighted_pagerank(&g, 1e-300, 3, Execution::Sequential).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn ranking_table_format() {
        let r = FeatureRanking::from_scores(vec![0.1, 0.3], 1, true);
        let mut buf = Vec::new();
        r.write_table(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rank\tfeature_id\tscore\n1\t1\t"));
    }
}
