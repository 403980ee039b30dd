//! Fuzzy similarity relations and the fuzzy complementary entropy family.
//!
//! Each feature induces a reflexive, symmetric relation on the instances. The
//! entropy measures only ever need, per instance `i`, the fuzzy cardinality
//! `|[x_i]| = Σ_j r_ij` and the min-t-norm intersection cardinality
//! `|[x_i]_a ∩ [x_i]_b| = Σ_j min(a_ij, b_ij)`; the [`SimilarityRelation`] trait
//! exposes exactly those two row reductions so that dense matrices and the
//! block-diagonal aggregates built by the server share one code path.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::exec::Execution;
use crate::matrix::{stable_sum, Matrix};

/// Admissible range of the radius divisor λ.
pub const LAMBDA_RANGE: (f64, f64) = (0.4, 2.0);

/// `feature_id: u32`, `n: u32`, `radius: f64`.
pub const FRAME_HEADER_BYTES: usize = 16;

/// Adaptive fuzzy radius `ε = std_g / λ`.
pub fn fuzzy_radius(global_std: f64, lambda: f64) -> Result<f64> {
    if !(LAMBDA_RANGE.0..=LAMBDA_RANGE.1).contains(&lambda) {
        return Err(Error::config(format!(
            "lambda {lambda} outside [{}, {}]",
            LAMBDA_RANGE.0, LAMBDA_RANGE.1
        )));
    }
    if !(global_std >= 0.0 && global_std.is_finite()) {
        return Err(Error::data(format!("invalid standard deviation {global_std}")));
    }
    Ok(global_std / lambda)
}

/// Row-wise reductions needed by the entropy measures.
pub trait SimilarityRelation {
    /// Number of instances (`|U|`).
    fn size(&self) -> usize;

    /// `|[x_i]|` for every instance.
    fn cardinalities(&self) -> Vec<f64>;

    /// `|[x_i]_self ∩ [x_i]_other|` under the min t-norm, for every instance.
    fn intersections(&self, other: &Self) -> Result<Vec<f64>>;
}

/// Dense `n × n` fuzzy similarity relation of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySimilarityMatrix {
    pub feature_id: u32,
    pub radius: f64,
    n: usize,
    values: Vec<f64>,
}

fn row_min_sum(a: &[f64], b: &[f64]) -> f64 {
    stable_sum(a.iter().zip(b).map(|(x, y)| x.min(*y)))
}

impl FuzzySimilarityMatrix {
    /// Builds the relation of one normalized column:
    /// `r_ij = 1 - |v_i - v_j|` when `|v_i - v_j| <= radius`, else 0; `r_ii = 1`.
    pub fn build(column: &[f64], radius: f64, feature_id: u32) -> Self {
        let n = column.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
            for j in 0..i {
                let diff = (column[i] - column[j]).abs();
                let r = if diff <= radius { 1.0 - diff } else { 0.0 };
                values[i * n + j] = r;
                values[j * n + i] = r;
            }
        }
        Self {
            feature_id,
            radius,
            n,
            values,
        }
    }

    pub fn identity(n: usize, feature_id: u32) -> Self {
        let mut values = vec![0.0; n * n];
        (0..n).for_each(|i| values[i * n + i] = 1.0);
        Self {
            feature_id,
            radius: 0.0,
            n,
            values,
        }
    }

    /// Wraps an explicit matrix after checking reflexivity, symmetry and range.
    pub fn from_matrix(m: &Matrix, radius: f64, feature_id: u32) -> Result<Self> {
        check_len(m.rows(), m.cols())?;
        let n = m.rows();
        for i in 0..n {
            if m.get(i, i) != 1.0 {
                return Err(Error::data(format!("relation not reflexive at {i}")));
            }
            for j in 0..n {
                let v = m.get(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::data(format!("entry ({i},{j}) = {v} outside [0,1]")));
                }
                if v != m.get(j, i) {
                    return Err(Error::data(format!("relation not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self {
            feature_id,
            radius,
            n,
            values: m.as_slice().to_vec(),
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `|[x_i]| = Σ_j r_ij`.
    pub fn cardinality(&self, i: usize) -> Result<f64> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            });
        }
        Ok(stable_sum(self.row(i).iter().copied()))
    }

    /// Length in bytes of [`Self::to_frame`].
    pub fn frame_len(&self) -> usize {
        FRAME_HEADER_BYTES + 8 * self.n * self.n
    }

    /// Little-endian frame: header then row-major `f64` payload.
    pub fn to_frame(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.frame_len());
        self.write_frame(&mut out);
        out
    }

    pub fn write_frame(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.feature_id.to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&self.radius.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }

    /// Decodes one frame from the front of `bytes`, returning it and the bytes consumed.
    pub fn from_frame(bytes: &[u8]) -> Result<(Self, usize)> {
        if bytes.len() < FRAME_HEADER_BYTES {
            return Err(Error::data("truncated similarity frame header"));
        }
        let feature_id = u32::from_le_bytes(bytes[0..4].try_into().expect("4 bytes"));
        let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
        let radius = f64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
        let len = FRAME_HEADER_BYTES + 8 * n * n;
        if bytes.len() < len {
            return Err(Error::data(format!(
                "similarity frame needs {len} bytes, {} available",
                bytes.len()
            )));
        }
        let values = bytes[FRAME_HEADER_BYTES..len]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok((
            Self {
                feature_id,
                radius,
                n,
                values,
            },
            len,
        ))
    }
}

impl SimilarityRelation for FuzzySimilarityMatrix {
    fn size(&self) -> usize {
        self.n
    }

    fn cardinalities(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| stable_sum(self.row(i).iter().copied()))
            .collect()
    }

    fn intersections(&self, other: &Self) -> Result<Vec<f64>> {
        check_len(self.n, other.n)?;
        Ok((0..self.n)
            .map(|i| row_min_sum(self.row(i), other.row(i)))
            .collect())
    }
}

/// Block-diagonal relation: instances of different blocks have similarity 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSimilarity {
    pub feature_id: u32,
    pub radius: f64,
    blocks: Vec<FuzzySimilarityMatrix>,
}

impl BlockSimilarity {
    pub fn new(feature_id: u32, radius: f64, blocks: Vec<FuzzySimilarityMatrix>) -> Self {
        Self {
            feature_id,
            radius,
            blocks,
        }
    }

    pub fn blocks(&self) -> &[FuzzySimilarityMatrix] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(FuzzySimilarityMatrix::size).collect()
    }

    /// Materializes the full `N × N` matrix.
    pub fn to_dense(&self) -> FuzzySimilarityMatrix {
        let n: usize = self.blocks.iter().map(|b| b.size()).sum();
        let mut values = vec![0.0; n * n];
        let mut offset = 0;
        for b in &self.blocks {
            for i in 0..b.size() {
                let dst = (offset + i) * n + offset;
                values[dst..dst + b.size()].copy_from_slice(b.row(i));
            }
            offset += b.size();
        }
        FuzzySimilarityMatrix {
            feature_id: self.feature_id,
            radius: self.radius,
            n,
            values,
        }
    }
}

impl SimilarityRelation for BlockSimilarity {
    fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    fn cardinalities(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.cardinalities()).collect()
    }

    fn intersections(&self, other: &Self) -> Result<Vec<f64>> {
        check_len(self.blocks.len(), other.blocks.len())?;
        let mut out = Vec::with_capacity(self.size());
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            out.extend(a.intersections(b)?);
        }
        Ok(out)
    }
}

fn universe(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::data("empty universe"));
    }
    Ok(n as f64)
}

fn mean_term(len: usize, n: f64, term: impl Fn(usize) -> f64) -> f64 {
    stable_sum((0..len).map(term)) / n
}

/// `CE = (1/|U|) Σ_i (1 - |[x_i]| / |U|)`.
pub fn complementary_entropy<R: SimilarityRelation>(a: &R) -> Result<f64> {
    let n = universe(a.size())?;
    let ca = a.cardinalities();
    Ok(ce_from_parts(&ca, n))
}

/// `CJE = (1/|U|) Σ_i (1 - |[x_i]_a ∩ [x_i]_b| / |U|)`.
pub fn complementary_joint_entropy<R: SimilarityRelation>(a: &R, b: &R) -> Result<f64> {
    check_len(a.size(), b.size())?;
    let n = universe(a.size())?;
    let inter = a.intersections(b)?;
    Ok(cje_from_parts(&inter, n))
}

/// `CCE(a|b) = (1/|U|) Σ_i (|[x_i]_b| - |[x_i]_a ∩ [x_i]_b|) / |U|`.
pub fn complementary_conditional_entropy<R: SimilarityRelation>(a: &R, b: &R) -> Result<f64> {
    check_len(a.size(), b.size())?;
    let n = universe(a.size())?;
    let cb = b.cardinalities();
    let inter = a.intersections(b)?;
    Ok(mean_term(cb.len(), n, |i| cb[i] / n - inter[i] / n))
}

/// `CMI = (1/|U|) Σ_i (1 - (|[x_i]_b| + |[x_i]_a| - |[x_i]_a ∩ [x_i]_b|) / |U|)`.
pub fn complementary_mutual_information<R: SimilarityRelation>(a: &R, b: &R) -> Result<f64> {
    check_len(a.size(), b.size())?;
    let n = universe(a.size())?;
    let inter = a.intersections(b)?;
    Ok(cmi_from_parts(&a.cardinalities(), &b.cardinalities(), &inter, n))
}

/// `CJE - CMI`, evaluated as `(1/|U|²) Σ_i (|[x_i]_a| + |[x_i]_b| - 2|∩|)`,
/// which is non-negative term by term.
pub fn correlation_distance<R: SimilarityRelation>(a: &R, b: &R) -> Result<f64> {
    check_len(a.size(), b.size())?;
    let n = universe(a.size())?;
    let inter = a.intersections(b)?;
    Ok(corr_from_parts(&a.cardinalities(), &b.cardinalities(), &inter, n))
}

fn ce_from_parts(card: &[f64], n: f64) -> f64 {
    mean_term(card.len(), n, |i| 1.0 - card[i] / n)
}

fn cje_from_parts(inter: &[f64], n: f64) -> f64 {
    mean_term(inter.len(), n, |i| 1.0 - inter[i] / n)
}

fn cmi_from_parts(ca: &[f64], cb: &[f64], inter: &[f64], n: f64) -> f64 {
    mean_term(inter.len(), n, |i| 1.0 - (cb[i] + ca[i] - inter[i]) / n)
}

fn corr_from_parts(ca: &[f64], cb: &[f64], inter: &[f64], n: f64) -> f64 {
    let s = mean_term(inter.len(), n, |i| {
        ((ca[i] - inter[i]).max(0.0) + (cb[i] - inter[i]).max(0.0)) / n
    });
    s.max(0.0)
}

/// Pairwise information measures over all features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTable {
    pub ce: Vec<f64>,
    pub cje: Matrix,
    pub cmi: Matrix,
    pub corr_dist: Matrix,
    pub universe_size: usize,
}

impl EntropyTable {
    /// Fills the `d × d` tables; the off-diagonal pairs are evaluated in parallel.
    pub fn compute<R>(relations: &[R], exec: Execution) -> Result<Self>
    where
        R: SimilarityRelation + Sync,
    {
        let d = relations.len();
        let size = relations.first().map_or(0, |r| r.size());
        for r in relations {
            check_len(size, r.size())?;
        }
        let n = universe(size)?;
        let cards: Vec<Vec<f64>> = exec.map(d, |p| relations[p].cardinalities());
        let ce: Vec<f64> = cards.iter().map(|c| ce_from_parts(c, n)).collect();

        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|p| (p + 1..d).map(move |b| (p, b))).collect();
        let cells = exec.try_map(pairs.len(), |k| {
            let (p, b) = pairs[k];
            let inter = relations[p].intersections(&relations[b])?;
            Ok::<_, Error>((
                cje_from_parts(&inter, n),
                cmi_from_parts(&cards[p], &cards[b], &inter, n),
                corr_from_parts(&cards[p], &cards[b], &inter, n),
            ))
        })?;

        let mut cje = Matrix::zeros(d, d);
        let mut cmi = Matrix::zeros(d, d);
        let mut corr = Matrix::zeros(d, d);
        for (p, &h) in ce.iter().enumerate() {
            cje.set(p, p, h);
            cmi.set(p, p, h);
        }
        for (&(p, b), &(j, m, c)) in pairs.iter().zip(&cells) {
            cje.set(p, b, j);
            cje.set(b, p, j);
            cmi.set(p, b, m);
            cmi.set(b, p, m);
            corr.set(p, b, c);
            corr.set(b, p, c);
        }
        Ok(Self {
            ce,
            cje,
            cmi,
            corr_dist: corr,
            universe_size: size,
        })
    }

    pub fn features(&self) -> usize {
        self.ce.len()
    }
}

/// Sufficient statistics of one feature column: count, mean and the sum of
/// squared deviations from the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl FeatureStats {
    pub const WIRE_BYTES: usize = 24;

    /// Welford accumulation over `values`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::data("feature statistics need at least one value"));
        }
        let mut s = Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        };
        for &v in values {
            s.count += 1;
            let delta = v - s.mean;
            s.mean += delta / s.count as f64;
            s.m2 += delta * (v - s.mean);
        }
        Ok(s)
    }

    /// Combines two disjoint samples (Chan et al. parallel variance).
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let count = self.count + other.count;
        let n = count as f64;
        let delta = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }

    /// Sample standard deviation (`n - 1` denominator); `None` below two values.
    pub fn std(&self) -> Option<f64> {
        (self.count >= 2).then(|| (self.m2.max(0.0) / (self.count - 1) as f64).sqrt())
    }

    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.count.to_le_bytes());
        out.extend_from_slice(&self.mean.to_le_bytes());
        out.extend_from_slice(&self.m2.to_le_bytes());
    }

    pub fn read(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < Self::WIRE_BYTES {
            return Err(Error::data("truncated feature statistics"));
        }
        Ok(Self {
            count: u64::from_le_bytes(bytes[0..8].try_into().expect("8 bytes")),
            mean: f64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")),
            m2: f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes")),
        })
    }
}

/// `lower(X)(x) = inf_y max(1 - R(x, y), X(y))`.
pub fn fuzzy_lower_approximation(rel: &FuzzySimilarityMatrix, x_set: &[f64]) -> Result<Vec<f64>> {
    check_len(rel.size(), x_set.len())?;
    Ok((0..rel.size())
        .map(|i| {
            rel.row(i)
                .iter()
                .zip(x_set)
                .map(|(r, x)| (1.0 - r).max(*x))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// `upper(X)(x) = sup_y min(R(x, y), X(y))`.
pub fn fuzzy_upper_approximation(rel: &FuzzySimilarityMatrix, x_set: &[f64]) -> Result<Vec<f64>> {
    check_len(rel.size(), x_set.len())?;
    Ok((0..rel.size())
        .map(|i| {
            rel.row(i)
                .iter()
                .zip(x_set)
                .map(|(r, x)| r.min(*x))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}
