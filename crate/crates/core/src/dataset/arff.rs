//! Dense ARFF reader restricted to numeric and binary attributes.

use super::{assemble, LabelSpec, MultiLabelDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum AttrKind {
    Numeric,
    /// Two-valued nominal attribute; values map to 0/1 by position unless
    /// both values are themselves the numbers 0 and 1.
    Binary([String; 2]),
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits the leading (possibly quoted) token from `s`.
fn take_token(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    let mut chars = s.chars();
    let first = chars.next()?;
    if first == '\'' || first == '"' {
        let end = s[1..].find(first)? + 1;
        Some((s[1..end].to_string(), &s[end + 1..]))
    } else {
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        Some((s[..end].to_string(), &s[end..]))
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2
        && ((s.starts_with('\'') && s.ends_with('\'')) || (s.starts_with('"') && s.ends_with('"')))
    {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<(String, AttrKind)> {
    let (name, tail) = take_token(rest).ok_or_else(|| parse_err(line, "attribute without name"))?;
    let tail = tail.trim();
    let lower = tail.to_ascii_lowercase();
    let kind = if lower == "numeric" || lower == "real" || lower == "integer" {
        AttrKind::Numeric
    } else if tail.starts_with('{') && tail.ends_with('}') {
        let values: Vec<String> = tail[1..tail.len() - 1]
            .split(',')
            .map(|v| unquote(v).to_string())
            .collect();
        match <[String; 2]>::try_from(values) {
            Ok(pair) => AttrKind::Binary(pair),
            Err(values) => {
                return Err(parse_err(
                    line,
                    format!(
                        "attribute `{name}` is nominal with {} values; only numeric or binary attributes are supported",
                        values.len()
                    ),
                ))
            }
        }
    } else {
        return Err(parse_err(
            line,
            format!("attribute `{name}` has unsupported type `{tail}`"),
        ));
    };
    Ok((name, kind))
}

fn parse_value(raw: &str, kind: &AttrKind, name: &str, line: usize) -> Result<f64> {
    let v = unquote(raw);
    if v == "?" {
        return Err(parse_err(line, format!("missing value in attribute `{name}`")));
    }
    match kind {
        AttrKind::Numeric => v
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("`{v}` is not numeric (attribute `{name}`)"))),
        AttrKind::Binary(pair) => {
            let numeric = pair[0] == "0" && pair[1] == "1";
            match pair.iter().position(|p| p == v) {
                Some(i) if numeric => Ok(pair[i].parse().expect("0 or 1")),
                Some(i) => Ok(i as f64),
                None => Err(parse_err(
                    line,
                    format!("`{v}` is not a declared value of attribute `{name}`"),
                )),
            }
        }
    }
}

pub(crate) fn parse(text: &str, labels: &LabelSpec, source_id: &str) -> Result<MultiLabelDataset> {
    let mut attrs: Vec<(String, AttrKind)> = Vec::new();
    let mut in_data = false;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut data_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                continue;
            } else if lower.starts_with("@attribute") {
                attrs.push(parse_attribute(&line["@attribute".len()..], line_no)?);
            } else if lower.starts_with("@data") {
                if attrs.is_empty() {
                    return Err(parse_err(line_no, "no attributes declared before @data"));
                }
                in_data = true;
                data_line = line_no;
            } else {
                return Err(parse_err(line_no, format!("unexpected header line `{line}`")));
            }
            continue;
        }
        if line.starts_with('{') {
            return Err(parse_err(line_no, "sparse ARFF rows are not supported"));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != attrs.len() {
            return Err(parse_err(
                line_no,
                format!("expected {} values, found {}", attrs.len(), fields.len()),
            ));
        }
        let row = fields
            .iter()
            .zip(&attrs)
            .map(|(f, (name, kind))| parse_value(f, kind, name, line_no))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
        lines.push(line_no);
    }
    if !in_data {
        return Err(parse_err(text.lines().count(), "missing @data section"));
    }
    if lines.is_empty() {
        lines.push(data_line);
    }
    let names = attrs.into_iter().map(|(n, _)| n).collect();
    assemble(names, rows, &lines, labels, source_id)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "% comment
@relation 'toy: -C -2'
@attribute f1 numeric
@attribute 'f 2' REAL
@attribute lab1 {0,1}
@attribute lab2 {FALSE,TRUE}

@data
0.5,1.0,1,FALSE
-2,3e-1,0,TRUE
";

    #[test]
    fn parses_dense_mulan_style() {
        let ds = parse(TOY, &LabelSpec::Trailing(2), "toy").unwrap();
        assert_eq!(ds.n_instances(), 2);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.feature_names, vec!["f1", "f 2"]);
        assert_eq!(ds.features.row(1), &[-2.0, 0.3]);
        let y = ds.labels.unwrap();
        assert_eq!(y.row(0), &[1, 0]);
        assert_eq!(y.row(1), &[0, 1]);
    }

    #[test]
    fn labels_by_name() {
        let spec = LabelSpec::Names(vec!["lab2".into(), "lab1".into()]);
        let ds = parse(TOY, &spec, "toy").unwrap();
        assert_eq!(ds.label_names, vec!["lab2", "lab1"]);
        assert_eq!(ds.labels.unwrap().row(0), &[0, 1]);
    }

    #[test]
    fn missing_value_reports_line() {
        let text = TOY.replace("-2,3e-1", "-2,?");
        match parse(&text, &LabelSpec::Trailing(2), "toy") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 10);
                assert!(message.contains("missing"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_binary_label_rejected() {
        let text = "@relation r\n@attribute a numeric\n@attribute y numeric\n@data\n1,2\n";
        match parse(text, &LabelSpec::Trailing(1), "r") {
            Err(Error::Parse { line: 5, message }) => assert!(message.contains("non-binary")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sparse_and_wide_nominals_rejected() {
        let sparse = "@relation r\n@attribute a numeric\n@attribute y {0,1}\n@data\n{0 1,1 1}\n";
        assert!(parse(sparse, &LabelSpec::Trailing(1), "r").is_err());
        let nominal = "@relation r\n@attribute a {x,y,z}\n@attribute y {0,1}\n@data\nx,1\n";
        assert!(matches!(
            parse(nominal, &LabelSpec::Trailing(1), "r"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn empty_data_section() {
        let text = "@relation r\n@attribute a numeric\n@attribute y {0,1}\n@data\n";
        match parse(text, &LabelSpec::Trailing(1), "r") {
            Err(Error::Parse { message, .. }) => assert_eq!(message, "empty dataset"),
            other => panic!("{other:?}"),
        }
    }
}
