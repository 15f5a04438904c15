//! `value,weight` CSV ingestion and witness-file loading.

use std::fs;
use std::path::{Path, PathBuf};

use devbound_core::{WeightedSample, Witness};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct InputDataset {
    pub path: PathBuf,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub digest: String,
    /// Present when the input was a witness file rather than CSV.
    pub witness: Option<Witness>,
}

/// What reports echo back about their input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSummary {
    pub path: String,
    pub sha256: String,
    pub n: usize,
}

impl InputDataset {
    pub fn summary(&self) -> InputSummary {
        InputSummary {
            path: self.path.display().to_string(),
            sha256: self.digest.clone(),
            n: self.values.len(),
        }
    }

    pub fn sample(&self, eps_sum: f64) -> Result<WeightedSample, CliError> {
        WeightedSample::with_tolerance(self.values.clone(), self.weights.clone(), eps_sum)
            .map_err(|e| CliError::Input(format!("{}: {e}", self.path.display())))
    }
}

/// Reads CSV, or a witness JSON file when the first non-blank byte is `{`.
pub fn load(path: &Path) -> Result<InputDataset, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::Input(format!("{} is not UTF-8 text", path.display())))?;

    if text.trim_start().starts_with('{') {
        let witness: Witness = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("{}: not a witness file: {e}", path.display())))?;
        return Ok(InputDataset {
            path: path.to_path_buf(),
            values: witness.values.clone(),
            weights: witness.weights.clone(),
            digest,
            witness: Some(witness),
        });
    }

    let (values, weights) = parse_csv(text).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok(InputDataset {
        path: path.to_path_buf(),
        values,
        weights,
        digest,
        witness: None,
    })
}

fn parse_field(field: &str, what: &str, line: u64) -> Result<f64, CliError> {
    field
        .parse::<f64>()
        .map_err(|_| CliError::Input(format!("row {line}: {what} `{field}` is not a number")))
}

/// Parses two-column `value,weight` rows. A first row whose first field is
/// not a number is taken as a header.
pub fn parse_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut values = Vec::new();
    let mut weights = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::Input(format!(
                "row {line}: expected 2 columns (value,weight), found {}",
                record.len()
            )));
        }
        values.push(parse_field(&record[0], "value", line)?);
        weights.push(parse_field(&record[1], "weight", line)?);
    }
    if values.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    Ok((values, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_detected() {
        let (v, w) = parse_csv("value,weight\n1,0.5\n2,0.5\n").unwrap();
        assert_eq!(v, vec![1.0, 2.0]);
        assert_eq!(w, vec![0.5, 0.5]);
        let (v, _) = parse_csv("1,0.5\n2,0.5").unwrap();
        assert_eq!(v, vec![1.0, 2.0]);
    }

    #[test]
    fn errors_name_the_row() {
        let err = parse_csv("value,weight\n1,0.5\n2,abc\n").unwrap_err();
        assert_eq!(err.to_string(), "row 3: weight `abc` is not a number");
        let err = parse_csv("1,0.5,7\n").unwrap_err();
        assert!(err.to_string().starts_with("row 1: expected 2 columns"));
    }

    #[test]
    fn comma_decimals_are_rejected() {
        assert!(parse_csv("\"1,5\",1\n").is_err());
    }

    #[test]
    fn blank_input_is_rejected() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("value,weight\n").is_err());
    }
}
