//! CSV with a header row.

use super::{assemble, LabelSpec, MultiLabelDataset};
use crate::error::{Error, Result};

pub(crate) fn parse(text: &str, labels: &LabelSpec, source_id: &str) -> Result<MultiLabelDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            message: "missing header row".into(),
        });
    }

    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .zip(&header)
            .map(|(v, name)| {
                if v.is_empty() || v == "?" || v.eq_ignore_ascii_case("na") {
                    return Err(Error::Parse {
                        line,
                        message: format!("missing value in column `{name}`"),
                    });
                }
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{v}` is not numeric (column `{name}`)"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
        lines.push(line);
    }
    if lines.is_empty() {
        lines.push(2);
    }
    assemble(header, rows, &lines, labels, source_id)
}
