//! Prediction files: a `actual,predicted` header followed by one label pair
//! per line.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::confusion::LabeledPredictions;
use crate::error::{Error, Result};

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_predictions<R: Read>(
    reader: R,
    positive: &str,
    negative: Option<&str>,
) -> Result<LabeledPredictions<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| parse_error(1, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(parse_error(
            1,
            "empty file, expected header `actual,predicted`",
        ));
    }
    if headers.len() != 2 || &headers[0] != "actual" || &headers[1] != "predicted" {
        return Err(parse_error(1, "expected header `actual,predicted`"));
    }

    let mut pairs = Vec::new();
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        pairs.push((record[0].to_string(), record[1].to_string()));
        lines.push(line);
    }
    if pairs.is_empty() {
        return Err(parse_error(1, "no prediction rows after the header"));
    }

    let data = match negative {
        Some(neg) => LabeledPredictions::new(pairs, positive.to_string(), neg.to_string()),
        None => LabeledPredictions::with_inferred_negative(pairs, positive.to_string()),
    };
    data.map_err(|e| match e {
        Error::UnknownLabel { label, index } => parse_error(
            lines[index],
            format!("unknown label {label:?} (positive label is {positive:?})"),
        ),
        other => other,
    })
}

pub fn read_predictions_file(
    path: &Path,
    positive: &str,
    negative: Option<&str>,
) -> std::result::Result<LabeledPredictions<String>, super::CliError> {
    let file = File::open(path).map_err(|source| super::CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_predictions(file, positive, negative).map_err(|e| super::CliError::File {
        path: path.to_path_buf(),
        source: e,
    })
}
