//! CSV dataset ingestion and emission.

use std::path::Path;

use partls::ndarray::{Array1, Array2};
use partls::Dataset;

use crate::failure::Failure;

pub struct LoadedDataset {
    pub dataset: Dataset,
    pub feature_names: Vec<String>,
}

/// Reads a CSV with a header row: the target column becomes `y`, every
/// other column becomes a feature in header order.
pub fn load_dataset(path: &Path, target: &str) -> Result<LoadedDataset, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    let target_idx = headers.iter().position(|h| h == target).ok_or_else(|| {
        Failure::input(format!(
            "target column '{target}' not found; available columns: {}",
            headers.join(", ")
        ))
    })?;
    let feature_names: Vec<String> =
        headers.iter().enumerate().filter(|(i, _)| *i != target_idx).map(|(_, h)| h.clone()).collect();
    if feature_names.is_empty() {
        return Err(Failure::input("dataset has no feature columns besides the target"));
    }

    let mut x_rows: Vec<f64> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::input(format!("row {}: {e}", row_idx + 2)))?;
        if record.len() != headers.len() {
            return Err(Failure::input(format!(
                "row {}: expected {} fields, found {}",
                row_idx + 2,
                headers.len(),
                record.len()
            )));
        }
        for (col_idx, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                Failure::input(format!(
                    "row {}, column '{}': cannot parse '{cell}' as a number",
                    row_idx + 2,
                    headers[col_idx]
                ))
            })?;
            if !value.is_finite() {
                return Err(Failure::input(format!(
                    "row {}, column '{}': non-finite value '{cell}'",
                    row_idx + 2,
                    headers[col_idx]
                )));
            }
            if col_idx == target_idx {
                y.push(value);
            } else {
                x_rows.push(value);
            }
        }
    }
    if y.is_empty() {
        return Err(Failure::input(format!("{}: no data rows", path.display())));
    }

    let rows = y.len();
    let cols = feature_names.len();
    let x = Array2::from_shape_vec((rows, cols), x_rows)
        .expect("row-major cell collection matches dimensions");
    let dataset = Dataset::new(x, Array1::from_vec(y))?;
    Ok(LoadedDataset { dataset, feature_names })
}

/// Writes a dataset as CSV with the given feature names plus a target
/// column. Values print in shortest round-trip decimal form, so reloading
/// reproduces each float exactly.
pub fn write_dataset(
    path: &Path,
    dataset: &Dataset,
    feature_names: &[String],
    target_name: &str,
) -> Result<(), Failure> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut header: Vec<String> = feature_names.to_vec();
    header.push(target_name.to_owned());
    writer.write_record(&header)?;
    for (row, target) in dataset.x().outer_iter().zip(dataset.y().iter()) {
        let mut record: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        record.push(format!("{target}"));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
