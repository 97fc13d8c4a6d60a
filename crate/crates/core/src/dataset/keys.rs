//! Label keys used for stratification and distribution tables.

use std::fmt;

use thiserror::Error;

use crate::formats::DatasetRecord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyError {
    #[error("unknown label key {0:?} (expected one of: {KNOWN_KEYS}, betti_<i>, torsion_<i>)")]
    UnknownKey(String),
    #[error("record {id:?} has no value for key {key:?}")]
    MissingKey { id: String, key: String },
}

const KNOWN_KEYS: &str = "betti_numbers, torsion_coefficients, genus, orientable, name, n_vertices, dimension";

/// A parsed label key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKey {
    BettiNumbers,
    Betti(usize),
    TorsionCoefficients,
    Torsion(usize),
    Genus,
    Orientable,
    Name,
    NVertices,
    Dimension,
}

impl std::str::FromStr for LabelKey {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let indexed = |prefix: &str| s.strip_prefix(prefix).and_then(|i| i.parse::<usize>().ok());
        Ok(match s {
            "betti_numbers" => LabelKey::BettiNumbers,
            "torsion_coefficients" => LabelKey::TorsionCoefficients,
            "genus" => LabelKey::Genus,
            "orientable" => LabelKey::Orientable,
            "name" => LabelKey::Name,
            "n_vertices" => LabelKey::NVertices,
            "dimension" => LabelKey::Dimension,
            _ => {
                if let Some(i) = indexed("betti_") {
                    LabelKey::Betti(i)
                } else if let Some(i) = indexed("torsion_") {
                    LabelKey::Torsion(i)
                } else {
                    return Err(KeyError::UnknownKey(s.to_string()));
                }
            }
        })
    }
}

impl fmt::Display for LabelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelKey::BettiNumbers => f.write_str("betti_numbers"),
            LabelKey::Betti(i) => write!(f, "betti_{i}"),
            LabelKey::TorsionCoefficients => f.write_str("torsion_coefficients"),
            LabelKey::Torsion(i) => write!(f, "torsion_{i}"),
            LabelKey::Genus => f.write_str("genus"),
            LabelKey::Orientable => f.write_str("orientable"),
            LabelKey::Name => f.write_str("name"),
            LabelKey::NVertices => f.write_str("n_vertices"),
            LabelKey::Dimension => f.write_str("dimension"),
        }
    }
}

/// A label value. Ordering is by type, then value; tuples compare
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelValue {
    Bool(bool),
    Int(u64),
    Str(String),
    Tuple(Vec<LabelValue>),
}

impl LabelValue {
    fn write_inner(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelValue::Str(s) => write!(f, "{}", serde_json::Value::String(s.clone())),
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for LabelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelValue::Bool(b) => write!(f, "{b}"),
            LabelValue::Int(i) => write!(f, "{i}"),
            LabelValue::Str(s) if s.is_empty() => f.write_str("\"\""),
            LabelValue::Str(s) => f.write_str(s),
            LabelValue::Tuple(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    item.write_inner(f)?;
                }
                f.write_str("]")
            }
        }
    }
}

impl LabelKey {
    /// Value of this key on `r`, or `None` when the record lacks it.
    pub fn value(&self, r: &DatasetRecord) -> Option<LabelValue> {
        match *self {
            LabelKey::BettiNumbers => {
                r.betti_numbers.as_ref().map(|b| LabelValue::Tuple(b.iter().map(|&x| LabelValue::Int(x)).collect()))
            }
            LabelKey::Betti(i) => r.betti_numbers.as_ref()?.get(i).map(|&x| LabelValue::Int(x)),
            LabelKey::TorsionCoefficients => r
                .torsion_coefficients
                .as_ref()
                .map(|t| LabelValue::Tuple(t.iter().map(|s| LabelValue::Str(s.clone())).collect())),
            LabelKey::Torsion(i) => r.torsion_coefficients.as_ref()?.get(i).map(|s| LabelValue::Str(s.clone())),
            LabelKey::Genus => r.genus.map(|g| LabelValue::Int(u64::from(g))),
            LabelKey::Orientable => r.orientable.map(LabelValue::Bool),
            LabelKey::Name => r.name.clone().map(LabelValue::Str),
            LabelKey::NVertices => Some(LabelValue::Int(r.n_vertices.unwrap_or_else(|| r.distinct_vertices()) as u64)),
            LabelKey::Dimension => r.dimension_or_inferred().map(|d| LabelValue::Int(d as u64)),
        }
    }

    pub fn require(&self, r: &DatasetRecord) -> Result<LabelValue, KeyError> {
        self.value(r).ok_or_else(|| KeyError::MissingKey { id: r.id.clone(), key: self.to_string() })
    }
}
