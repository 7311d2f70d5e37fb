use std::collections::HashMap;
use std::io::{Read, Write};

use super::{Class, DatasetError, EncodedDataset, FeatureKind, RawCell, RawDataset, RawSchema};
use crate::scalar::Scalar;

/// Reads a comma-separated file with a header row and validates every cell
/// against `schema`. Header columns may appear in any order.
pub fn parse_csv<R: Read>(source: R, schema: &RawSchema) -> Result<RawDataset, DatasetError> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader
        .headers()
        .map_err(|e| DatasetError::Csv(e.to_string()))?
        .clone();

    let mut position: HashMap<&str, usize> = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        let known = name == schema.target.column || schema.feature(name).is_some();
        if !known {
            return Err(DatasetError::UnknownColumn(name.to_string()));
        }
        position.insert(name, i);
    }
    let feature_cols = schema
        .features
        .iter()
        .map(|f| {
            position
                .get(f.name.as_str())
                .copied()
                .ok_or_else(|| DatasetError::MissingColumn(f.name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let target_col = *position
        .get(schema.target.column.as_str())
        .ok_or_else(|| DatasetError::MissingColumn(schema.target.column.clone()))?;

    let mut records = Vec::new();
    let mut labels = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| DatasetError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(DatasetError::RowLength {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(schema.features.len());
        for (f, &col) in schema.features.iter().zip(&feature_cols) {
            let text = &record[col];
            if text.is_empty() {
                return Err(DatasetError::MissingValue {
                    line,
                    column: f.name.clone(),
                });
            }
            let cell = match &f.kind {
                FeatureKind::Numeric => match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => RawCell::Number(v),
                    _ => {
                        return Err(DatasetError::NonNumericCell {
                            line,
                            column: f.name.clone(),
                            value: text.to_string(),
                        })
                    }
                },
                FeatureKind::Binary { values } => {
                    check_nominal(values, text, line, &f.name)?;
                    RawCell::Text(text.to_string())
                }
                FeatureKind::Nominal { values } => {
                    check_nominal(values, text, line, &f.name)?;
                    RawCell::Text(text.to_string())
                }
            };
            row.push(cell);
        }
        let target = &record[target_col];
        let label = if target == schema.target.positive {
            Class::Positive
        } else if target == schema.target.negative {
            Class::Negative
        } else if target.is_empty() {
            return Err(DatasetError::MissingValue {
                line,
                column: schema.target.column.clone(),
            });
        } else {
            return Err(DatasetError::IllegalNominalValue {
                line,
                column: schema.target.column.clone(),
                value: target.to_string(),
            });
        };
        records.push(row);
        labels.push(label);
    }

    Ok(RawDataset {
        schema: schema.clone(),
        records,
        labels,
    })
}

fn check_nominal(
    allowed: &[String],
    text: &str,
    line: u64,
    column: &str,
) -> Result<(), DatasetError> {
    if allowed.iter().any(|v| v == text) {
        Ok(())
    } else {
        Err(DatasetError::IllegalNominalValue {
            line,
            column: column.to_string(),
            value: text.to_string(),
        })
    }
}

/// Dumps an encoded dataset with generated column names (`VHD=mild` style)
/// and a trailing `label` column holding +1/-1.
pub fn write_encoded_csv<T: Scalar, W: Write>(
    data: &EncodedDataset<T>,
    sink: W,
) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| DatasetError::Csv(e.to_string());
    let mut header: Vec<String> = data.columns.iter().map(|c| c.name()).collect();
    header.push("label".into());
    w.write_record(&header).map_err(csv_err)?;
    for (row, label) in data.matrix.rows().zip(&data.labels) {
        let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        cells.push(if label.is_positive() { "1" } else { "-1" }.to_string());
        w.write_record(&cells).map_err(csv_err)?;
    }
    w.flush().map_err(|e| DatasetError::Csv(e.to_string()))?;
    Ok(())
}
