//! Sidecar description of a raw tabular dataset: one entry per input feature
//! plus the binary target column.

use serde::{Deserialize, Serialize};

use super::DatasetError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    /// Two-valued nominal. The first value encodes to 0, the second to 1.
    Binary {
        values: [String; 2],
    },
    /// Multi-valued nominal, one-hot expanded in declared order.
    Nominal {
        values: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub column: String,
    /// Raw value of the positive class (encoded as +1).
    pub positive: String,
    /// Raw value of the negative class (encoded as -1).
    pub negative: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSchema {
    pub target: TargetSpec,
    #[serde(rename = "feature")]
    pub features: Vec<FeatureSpec>,
}

/// Schema of the Z-Alizadeh Sani CAD dataset as distributed by the UCI repository
/// (55 input features, target column `Cath`).
pub const Z_ALIZADEH_SANI_SCHEMA: &str = include_str!("../../data/z_alizadeh_sani.schema.toml");

impl RawSchema {
    pub fn from_toml(text: &str) -> Result<Self, DatasetError> {
        let schema: RawSchema =
            toml::from_str(text).map_err(|e| DatasetError::Schema(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("schema serializes")
    }

    pub fn z_alizadeh_sani() -> Self {
        Self::from_toml(Z_ALIZADEH_SANI_SCHEMA).expect("shipped schema is valid")
    }

    /// All-numeric schema with the given feature names.
    pub fn numeric(names: &[&str], target: TargetSpec) -> Self {
        Self {
            target,
            features: names
                .iter()
                .map(|n| FeatureSpec {
                    name: n.to_string(),
                    kind: FeatureKind::Numeric,
                })
                .collect(),
        }
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.features.is_empty() {
            return Err(DatasetError::Schema("schema declares no features".into()));
        }
        if self.target.positive == self.target.negative {
            return Err(DatasetError::Schema(
                "target positive and negative values must differ".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for f in &self.features {
            if f.name == self.target.column {
                return Err(DatasetError::Schema(format!(
                    "feature `{}` duplicates the target column",
                    f.name
                )));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(DatasetError::Schema(format!(
                    "duplicate feature `{}`",
                    f.name
                )));
            }
            match &f.kind {
                FeatureKind::Numeric => {}
                FeatureKind::Binary { values } => {
                    if values[0] == values[1] {
                        return Err(DatasetError::Schema(format!(
                            "binary feature `{}` lists the same value twice",
                            f.name
                        )));
                    }
                }
                FeatureKind::Nominal { values } => {
                    let distinct: std::collections::HashSet<_> = values.iter().collect();
                    if values.len() < 2 || distinct.len() != values.len() {
                        return Err(DatasetError::Schema(format!(
                            "nominal feature `{}` needs at least two distinct values",
                            f.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
