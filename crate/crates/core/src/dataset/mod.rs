//! Multi-label datasets: loading, min-max scaling, and federated partitioning.

mod arff;
mod delimited;
mod partition;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::matrix::Matrix;

pub use partition::{partition_noniid, PartitionParams, PartitionPlan};

/// Binary `n × L` label matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMatrix {
    rows: usize,
    labels: usize,
    data: Vec<u8>,
}

impl LabelMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let labels = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * labels);
        for row in rows {
            check_len(labels, row.len())?;
            if let Some(v) = row.iter().find(|&&v| v > 1) {
                return Err(Error::data(format!("label value {v} is not binary")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            labels,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    #[inline]
    pub fn get(&self, r: usize, l: usize) -> u8 {
        self.data[r * self.labels + l]
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.labels..(r + 1) * self.labels]
    }

    /// Lowest-index positive label of row `r`, if any.
    pub fn anchor(&self, r: usize) -> Option<usize> {
        self.row(r).iter().position(|&v| v == 1)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.labels);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: idx.len(),
            labels: self.labels,
            data,
        }
    }
}

/// Instances × features, plus binary labels when the set is labeled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLabelDataset {
    pub features: Matrix,
    pub labels: Option<LabelMatrix>,
    pub feature_names: Vec<String>,
    pub label_names: Vec<String>,
    pub source_id: String,
}

impl MultiLabelDataset {
    pub fn new(
        features: Matrix,
        labels: Option<LabelMatrix>,
        feature_names: Vec<String>,
        label_names: Vec<String>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        check_len(features.cols(), feature_names.len())?;
        if let Some(y) = &labels {
            check_len(features.rows(), y.rows())?;
            check_len(y.labels(), label_names.len())?;
        }
        if let Some(v) = features.as_slice().iter().find(|v| !v.is_finite()) {
            return Err(Error::data(format!("non-finite feature value {v}")));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            label_names,
            source_id: source_id.into(),
        })
    }

    pub fn n_instances(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_labels(&self) -> usize {
        self.label_names.len()
    }

    pub fn labels_or_err(&self) -> Result<&LabelMatrix> {
        self.labels
            .as_ref()
            .ok_or_else(|| Error::data(format!("dataset `{}` has no labels", self.source_id)))
    }

    /// Rows `idx`, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let n = self.n_instances();
        if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        Ok(Self {
            features: self.features.select_rows(idx),
            labels: self.labels.as_ref().map(|y| y.select_rows(idx)),
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
            source_id: self.source_id.clone(),
        })
    }

    /// Columns `idx`, in the given order.
    pub fn select_features(&self, idx: &[usize]) -> Result<Self> {
        let d = self.n_features();
        if let Some(&bad) = idx.iter().find(|&&i| i >= d) {
            return Err(Error::IndexOutOfRange { index: bad, len: d });
        }
        Ok(Self {
            features: self.features.select_cols(idx),
            labels: self.labels.clone(),
            feature_names: idx.iter().map(|&i| self.feature_names[i].clone()).collect(),
            label_names: self.label_names.clone(),
            source_id: self.source_id.clone(),
        })
    }

    pub fn without_labels(&self) -> Self {
        Self {
            labels: None,
            ..self.clone()
        }
    }

    /// Per-feature minimum and maximum.
    pub fn column_ranges(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.n_features();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for r in 0..self.n_instances() {
            for (p, &v) in self.features.row(r).iter().enumerate() {
                mins[p] = mins[p].min(v);
                maxs[p] = maxs[p].max(v);
            }
        }
        (mins, maxs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Arff,
    Csv,
}

impl DataFormat {
    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "arff" => Some(DataFormat::Arff),
            "csv" => Some(DataFormat::Csv),
            _ => None,
        }
    }
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "arff" => Ok(DataFormat::Arff),
            "csv" => Ok(DataFormat::Csv),
            other => Err(Error::config(format!("unknown data format `{other}`"))),
        }
    }
}

/// Which columns of a file hold labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSpec {
    /// The last `k` columns.
    Trailing(usize),
    /// Columns with these names.
    Names(Vec<String>),
    /// Mulan label-list XML file naming the label columns.
    Xml(PathBuf),
}

impl LabelSpec {
    pub(crate) fn resolve(&self, column_names: &[String]) -> Result<Vec<usize>> {
        let names = match self {
            LabelSpec::Trailing(k) => {
                if *k == 0 || *k >= column_names.len() {
                    return Err(Error::config(format!(
                        "trailing label count {k} must be in 1..{}",
                        column_names.len()
                    )));
                }
                return Ok((column_names.len() - k..column_names.len()).collect());
            }
            LabelSpec::Names(names) => names.clone(),
            LabelSpec::Xml(path) => read_mulan_labels(path)?,
        };
        if names.is_empty() {
            return Err(Error::config("label list is empty"));
        }
        let cols = names
            .iter()
            .map(|name| {
                column_names
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::config(format!("label `{name}` is not a column")))
            })
            .collect::<Result<Vec<_>>>()?;
        if cols.len() >= column_names.len() {
            return Err(Error::config("every column is a label; no features left"));
        }
        Ok(cols)
    }
}

/// Label names from a Mulan XML file (`<label name="...">`, any nesting).
pub fn read_mulan_labels(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mulan_labels(&text)
}

pub(crate) fn parse_mulan_labels(text: &str) -> Result<Vec<String>> {
    let re = regex::Regex::new(r#"<label\s+name\s*=\s*(?:"([^"]*)"|'([^']*)')"#)
        .expect("static regex");
    let names: Vec<String> = re
        .captures_iter(text)
        .filter_map(|c| c.get(1).or_else(|| c.get(2)))
        .map(|m| xml_unescape(m.as_str()))
        .collect();
    if names.is_empty() {
        return Err(Error::data("label XML lists no labels"));
    }
    Ok(names)
}

fn xml_unescape(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&amp;", "&")
}

/// Splits parsed rows into feature and label columns. `lines[r]` is the source
/// line of row `r`, used in error messages.
pub(crate) fn assemble(
    column_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    lines: &[usize],
    labels: &LabelSpec,
    source_id: &str,
) -> Result<MultiLabelDataset> {
    if rows.is_empty() {
        return Err(Error::Parse {
            line: lines.first().copied().unwrap_or(0),
            message: "empty dataset".into(),
        });
    }
    let label_cols = labels.resolve(&column_names)?;
    let feature_cols: Vec<usize> = (0..column_names.len())
        .filter(|c| !label_cols.contains(c))
        .collect();
    let mut feats = Vec::with_capacity(rows.len() * feature_cols.len());
    let mut ys = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        feats.extend(feature_cols.iter().map(|&c| row[c]));
        let y = label_cols
            .iter()
            .map(|&c| match row[c] {
                0.0 => Ok(0u8),
                1.0 => Ok(1u8),
                v => Err(Error::Parse {
                    line: lines[r],
                    message: format!("label column `{}` has non-binary value {v}", column_names[c]),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        ys.push(y);
    }
    let features = Matrix::from_vec(rows.len(), feature_cols.len(), feats)?;
    MultiLabelDataset::new(
        features,
        Some(LabelMatrix::from_rows(&ys)?),
        feature_cols.iter().map(|&c| column_names[c].clone()).collect(),
        label_cols.iter().map(|&c| column_names[c].clone()).collect(),
        source_id,
    )
}

/// Reads an ARFF (dense) or CSV-with-header file.
pub fn load_dataset(path: &Path, format: DataFormat, labels: &LabelSpec) -> Result<MultiLabelDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    match format {
        DataFormat::Arff => arff::parse(&text, labels, &source_id),
        DataFormat::Csv => delimited::parse(&text, labels, &source_id),
    }
}

/// Parses ARFF text already in memory.
pub fn parse_arff(text: &str, labels: &LabelSpec, source_id: &str) -> Result<MultiLabelDataset> {
    arff::parse(text, labels, source_id)
}

/// Parses CSV text already in memory.
pub fn parse_csv(text: &str, labels: &LabelSpec, source_id: &str) -> Result<MultiLabelDataset> {
    delimited::parse(text, labels, source_id)
}

/// Maps each feature to `(v - min) / (max - min)`; constant columns become zero.
pub fn normalize_minmax(
    ds: &MultiLabelDataset,
    mins: &[f64],
    maxs: &[f64],
) -> Result<MultiLabelDataset> {
    let d = ds.n_features();
    check_len(d, mins.len())?;
    check_len(d, maxs.len())?;
    if let Some(p) = (0..d).find(|&p| mins[p].is_nan() || maxs[p].is_nan() || mins[p] > maxs[p]) {
        return Err(Error::data(format!(
            "feature {p}: min {} exceeds max {}",
            mins[p], maxs[p]
        )));
    }
    let n = ds.n_instances();
    let mut out = Matrix::zeros(n, d);
    for r in 0..n {
        for (p, &v) in ds.features.row(r).iter().enumerate() {
            let span = maxs[p] - mins[p];
            let scaled = if span > 0.0 { (v - mins[p]) / span } else { 0.0 };
            out.set(r, p, scaled);
        }
    }
    Ok(MultiLabelDataset {
        features: out,
        ..ds.clone()
    })
}
