//! Brute-force reference implementations shared by the integration tests.
//! Written directly from the definitions, without reusing library internals.

#![allow(dead_code)]

pub type Dense = Vec<Vec<f64>>;

pub fn relation(column: &[f64], radius: f64) -> Dense {
    let n = column.len();
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let diff = (column[i] - column[j]).abs();
            r[i][j] = if i == j {
                1.0
            } else if diff <= radius {
                1.0 - diff
            } else {
                0.0
            };
        }
    }
    r
}

/// Block-diagonal relation: pairs in different groups get 0.
pub fn grouped_relation(groups: &[Vec<f64>], radius: f64) -> Dense {
    let n: usize = groups.iter().map(Vec::len).sum();
    let mut r = vec![vec![0.0; n]; n];
    let mut offset = 0;
    for g in groups {
        let block = relation(g, radius);
        for i in 0..g.len() {
            for j in 0..g.len() {
                r[offset + i][offset + j] = block[i][j];
            }
        }
        offset += g.len();
    }
    r
}

fn card(row: &[f64]) -> f64 {
    row.iter().sum()
}

fn inter(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

pub fn ce(a: &Dense) -> f64 {
    let n = a.len() as f64;
    a.iter().map(|row| 1.0 - card(row) / n).sum::<f64>() / n
}

pub fn cje(a: &Dense, b: &Dense) -> f64 {
    let n = a.len() as f64;
    a.iter().zip(b).map(|(x, y)| 1.0 - inter(x, y) / n).sum::<f64>() / n
}

pub fn cce(a: &Dense, b: &Dense) -> f64 {
    let n = a.len() as f64;
    a.iter()
        .zip(b)
        .map(|(x, y)| card(y) / n - inter(x, y) / n)
        .sum::<f64>()
        / n
}

pub fn cmi(a: &Dense, b: &Dense) -> f64 {
    let n = a.len() as f64;
    a.iter()
        .zip(b)
        .map(|(x, y)| 1.0 - (card(y) + card(x) - inter(x, y)) / n)
        .sum::<f64>()
        / n
}

pub fn corr(a: &Dense, b: &Dense) -> f64 {
    cje(a, b) - cmi(a, b)
}

pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Straightforward MLKNN: full sort of all distances, explicit counting.
pub struct OracleMlknn {
    pub prior: Vec<f64>,
    pub pos: Vec<Vec<f64>>,
    pub neg: Vec<Vec<f64>>,
    x: Dense,
    y: Vec<Vec<u8>>,
    k: usize,
}

fn neighbors(x: &Dense, q: &[f64], k: usize, skip: Option<usize>) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = x
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != skip)
        .map(|(j, row)| (row.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), j))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|(_, j)| j).collect()
}

impl OracleMlknn {
    pub fn train(x: Dense, y: Vec<Vec<u8>>, k: usize, s: f64) -> Self {
        let n = x.len();
        let l = y[0].len();
        let prior = (0..l)
            .map(|t| (s + y.iter().filter(|r| r[t] == 1).count() as f64) / (2.0 * s + n as f64))
            .collect();
        let mut pos = vec![vec![0.0; k + 1]; l];
        let mut neg = vec![vec![0.0; k + 1]; l];
        for i in 0..n {
            let nb = neighbors(&x, &x[i], k, Some(i));
            for t in 0..l {
                let c = nb.iter().filter(|&&j| y[j][t] == 1).count();
                if y[i][t] == 1 {
                    pos[t][c] += 1.0;
                } else {
                    neg[t][c] += 1.0;
                }
            }
        }
        for t in 0..l {
            let tp: f64 = pos[t].iter().sum();
            let tn: f64 = neg[t].iter().sum();
            for c in 0..=k {
                pos[t][c] = (s + pos[t][c]) / (s * (k + 1) as f64 + tp);
                neg[t][c] = (s + neg[t][c]) / (s * (k + 1) as f64 + tn);
            }
        }
        Self { prior, pos, neg, x, y, k }
    }

    pub fn predict(&self, q: &[f64]) -> Vec<f64> {
        let nb = neighbors(&self.x, q, self.k, None);
        (0..self.prior.len())
            .map(|t| {
                let c = nb.iter().filter(|&&j| self.y[j][t] == 1).count();
                let a = self.prior[t] * self.pos[t][c];
                let b = (1.0 - self.prior[t]) * self.neg[t][c];
                a / (a + b)
            })
            .collect()
    }
}
