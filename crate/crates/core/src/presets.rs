//! Named feature masks.

use crate::dataset::{ColumnKind, EncodedDataset};
use crate::scalar::Scalar;

/// The 35-feature GSVMA selection for the Z-Alizadeh Sani dataset, as
/// (source feature, nominal level) pairs using the shipped schema's names.
///
/// Binary features are encoded as a single column, so both listed levels of
/// `CHF` and `Diastolic Murmur` resolve to that one column.
pub const PAPER35: &[(&str, Option<&str>)] = &[
    ("Sex", Some("Male")),
    ("CRF", Some("Y")),
    ("CVA", Some("N")),
    ("Airway disease", Some("Y")),
    ("Thyroid Disease", Some("N")),
    ("CHF", Some("N")),
    ("CHF", Some("Y")),
    ("Systolic Murmur", Some("Y")),
    ("Diastolic Murmur", Some("N")),
    ("Diastolic Murmur", Some("Y")),
    ("LowTH Ang", Some("N")),
    ("LVH", Some("N")),
    ("Poor R Progression", Some("Y")),
    ("VHD", Some("mild")),
    ("VHD", Some("Severe")),
    ("VHD", Some("Moderate")),
    ("Age", None),
    ("HTN", None),
    ("EX-Smoker", None),
    ("FH", None),
    ("PR", None),
    ("Typical Chest Pain", None),
    ("Function Class", None),
    ("Q Wave", None),
    ("St Elevation", None),
    ("Tinversion", None),
    ("FBS", None),
    ("TG", None),
    ("LDL", None),
    ("ESR", None),
    ("Lymph", None),
    ("Neut", None),
    ("PLT", None),
    ("EF-TTE", None),
    ("Region RWMA", None),
];

/// Names accepted by [`preset_mask`].
pub const PRESET_NAMES: &[&str] = &["paper35", "all"];

/// Resolves `(feature, level)` pairs to an encoded-column mask.
///
/// A level matches a one-hot column `feature=level`; for binary and numeric
/// features the level is ignored and the feature's single column is used.
pub fn resolve<T: Scalar>(
    data: &EncodedDataset<T>,
    entries: &[(&str, Option<&str>)],
) -> Result<Vec<bool>, Vec<String>> {
    let mut mask = vec![false; data.n_columns()];
    let mut missing = Vec::new();
    for &(source, level) in entries {
        let cols = data.columns_of(source);
        let hit = cols.iter().copied().find(|&j| match &data.columns[j].kind {
            ColumnKind::OneHot { value, .. } => Some(value.as_str()) == level,
            _ => true,
        });
        match hit {
            Some(j) => mask[j] = true,
            None => missing.push(match level {
                Some(l) => format!("{source}={l}"),
                None => source.to_string(),
            }),
        }
    }
    if missing.is_empty() {
        Ok(mask)
    } else {
        Err(missing)
    }
}

/// Mask for a named preset. Unknown names and unresolvable columns are
/// reported as `Err` with a description.
pub fn preset_mask<T: Scalar>(name: &str, data: &EncodedDataset<T>) -> Result<Vec<bool>, String> {
    match name {
        "all" => Ok(vec![true; data.n_columns()]),
        "paper35" => resolve(data, PAPER35)
            .map_err(|m| format!("preset paper35: columns not found: {}", m.join(", "))),
        other => Err(format!(
            "unknown preset `{other}` (known: {})",
            PRESET_NAMES.join(", ")
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{encode, parse_csv, RawSchema};

    fn empty_cad() -> EncodedDataset<f64> {
        let schema = RawSchema::z_alizadeh_sani();
        let header: Vec<&str> = schema
            .features
            .iter()
            .map(|f| f.name.as_str())
            .chain(["Cath"])
            .collect();
        encode(&parse_csv(format!("{}\n", header.join(",")).as_bytes(), &schema).unwrap())
    }

    #[test]
    fn paper35_resolves_against_shipped_schema() {
        let data = empty_cad();
        let mask = preset_mask("paper35", &data).unwrap();
        let names: Vec<String> = data
            .column_names()
            .into_iter()
            .zip(&mask)
            .filter(|(_, &on)| on)
            .map(|(n, _)| n)
            .collect();
        assert!(names.contains(&"VHD=mild".to_string()));
        assert!(!names.contains(&"VHD=N".to_string()));
        assert!(names.contains(&"CHF".to_string()));
        // 35 entries; CHF and Diastolic Murmur each collapse two levels into one column.
        assert_eq!(names.len(), 33);
    }

    #[test]
    fn unknown_preset_and_missing_columns() {
        let data = empty_cad();
        assert!(preset_mask("nope", &data).is_err());
        let err = resolve(&data, &[("Nope", None), ("VHD", Some("huge"))]).unwrap_err();
        assert_eq!(err, vec!["Nope".to_string(), "VHD=huge".to_string()]);
    }
}
