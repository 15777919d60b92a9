//! Column schemas: one `name,kind` line per CSV column.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Categorical,
    Label,
    /// A 0/1 column taken as one location coordinate without re-encoding. Only
    /// produced by [`auto_schema`] for the `u1..ud` columns of simulated data.
    Binary,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Continuous => "continuous",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Label => "label",
            ColumnKind::Binary => "binary",
        }
    }

    /// Kinds accepted in schema files.
    fn parse(s: &str) -> Option<Self> {
        match s {
            "continuous" => Some(ColumnKind::Continuous),
            "categorical" => Some(ColumnKind::Categorical),
            "label" => Some(ColumnKind::Label),
            _ => None,
        }
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
}

fn check_single_label(columns: &[ColumnSchema]) -> Result<(), DataError> {
    match columns.iter().filter(|c| c.kind == ColumnKind::Label).count() {
        1 => Ok(()),
        n => Err(DataError::LabelColumns(n)),
    }
}

/// Parses schema text in file order. Blank lines are ignored.
pub fn parse_schema(text: &str) -> Result<Vec<ColumnSchema>, DataError> {
    let mut columns: Vec<ColumnSchema> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let malformed = |msg: &str| DataError::Schema {
            line: idx + 1,
            message: msg.to_string(),
        };
        let (name, kind) = line.split_once(',').ok_or_else(|| malformed("expected `name,kind`"))?;
        let (name, kind) = (name.trim(), kind.trim());
        if name.is_empty() {
            return Err(malformed("empty column name"));
        }
        let kind = ColumnKind::parse(kind).ok_or_else(|| malformed(&format!("unknown kind `{kind}`")))?;
        if columns.iter().any(|c| c.name == name) {
            return Err(malformed(&format!("duplicate column `{name}`")));
        }
        columns.push(ColumnSchema {
            name: name.to_string(),
            kind,
        });
    }
    check_single_label(&columns)?;
    Ok(columns)
}

/// Schema for the self-describing simulated layout `u1..ud, z1..zp, label`.
pub fn auto_schema(header: &[&str]) -> Result<Vec<ColumnSchema>, DataError> {
    let indexed = |name: &str, prefix: char| {
        name.strip_prefix(prefix)
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
    };
    let columns = header
        .iter()
        .map(|&name| {
            let kind = if name == "label" {
                ColumnKind::Label
            } else if indexed(name, 'u') {
                ColumnKind::Binary
            } else if indexed(name, 'z') {
                ColumnKind::Continuous
            } else {
                return Err(DataError::AutoSchema(name.to_string()));
            };
            Ok(ColumnSchema {
                name: name.to_string(),
                kind,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_single_label(&columns)?;
    Ok(columns)
}

/// Schema text for `columns`, the inverse of [`parse_schema`].
pub fn schema_text(columns: &[ColumnSchema]) -> String {
    columns.iter().map(|c| format!("{},{}\n", c.name, c.kind)).collect()
}
