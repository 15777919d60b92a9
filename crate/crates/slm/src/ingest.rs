//! CSV ingestion: categorical columns are one-hot encoded with every observed level
//! (a missing entry is a level of its own), missing continuous entries take the
//! column mean pooled over both classes, and the lexicographically smaller label is
//! class 1 unless overridden.

use std::collections::BTreeSet;

use csv::{ReaderBuilder, StringRecord, Trim};
use serde::{Deserialize, Serialize};
use slm_core::{Class, MixedDataset, MixedObservation};

use crate::error::DataError;
use crate::schema::{ColumnKind, ColumnSchema};

/// How one schema column maps onto `z` and `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedColumn {
    pub name: String,
    pub kind: ColumnKind,
    /// Categorical levels in indicator order: sorted observed values, then `None`
    /// for the missing level when it occurs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<Option<String>>,
    /// Imputation value of a continuous column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
}

/// Everything needed to encode new rows the way the training data was encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    pub columns: Vec<EncodedColumn>,
    /// `labels[0]` is class 1, `labels[1]` class 2.
    pub labels: [String; 2],
}

/// A test row after encoding, with its label when the file has one.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedRow {
    pub observation: MixedObservation,
    pub label: Option<Class>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Label value to treat as class 1 instead of the lexicographically smaller one.
    pub class1_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub dataset: MixedDataset,
    pub encoding: Encoding,
}

fn is_missing(field: &str) -> bool {
    field.is_empty()
}

// Lines starting with `#` are comments (simulated files carry their seed that way).
fn reader(text: &str) -> csv::Reader<&[u8]> {
    ReaderBuilder::new()
        .trim(Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

/// Column names of a CSV file's header row.
pub fn header_names(csv_text: &str) -> Result<Vec<String>, DataError> {
    Ok(reader(csv_text).headers()?.iter().map(str::to_string).collect())
}

/// Position of every schema column in the header. The label column may be absent
/// only when `label_optional` is set.
fn column_positions(
    header: &StringRecord,
    columns: &[(String, ColumnKind)],
    label_optional: bool,
) -> Result<Vec<Option<usize>>, DataError> {
    let mut seen = BTreeSet::new();
    for name in header.iter() {
        if !seen.insert(name) {
            return Err(DataError::Header(format!("duplicate column `{name}`")));
        }
        if !columns.iter().any(|(c, _)| c == name) {
            return Err(DataError::Header(format!("column `{name}` is not in the schema")));
        }
    }
    columns
        .iter()
        .map(|(name, kind)| match header.iter().position(|h| h == name) {
            Some(i) => Ok(Some(i)),
            None if label_optional && *kind == ColumnKind::Label => Ok(None),
            None => Err(DataError::Header(format!("missing column `{name}`"))),
        })
        .collect()
}

fn records(text: &str, width: usize) -> Result<(StringRecord, Vec<StringRecord>), DataError> {
    let mut rdr = reader(text);
    let header = rdr.headers()?.clone();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => DataError::RowWidth {
                row: i + 1,
                expected: *expected_len as usize,
                found: *len as usize,
            },
            _ => DataError::Csv(e),
        })?;
        if rec.len() != width {
            return Err(DataError::RowWidth {
                row: i + 1,
                expected: width,
                found: rec.len(),
            });
        }
        rows.push(rec);
    }
    Ok((header, rows))
}

fn parse_continuous(field: &str, row: usize, column: &str) -> Result<Option<f64>, DataError> {
    if is_missing(field) {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(DataError::Value {
            row,
            column: column.to_string(),
            message: format!("`{field}` is not a finite number"),
        }),
    }
}

fn parse_binary(field: &str, row: usize, column: &str) -> Result<u8, DataError> {
    match field {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => Err(DataError::Value {
            row,
            column: column.to_string(),
            message: format!("`{field}` is not 0 or 1"),
        }),
    }
}

/// [`load_dataset_with`] with default options, keeping only the dataset.
pub fn load_dataset(csv_text: &str, schema: &[ColumnSchema]) -> Result<MixedDataset, DataError> {
    Ok(load_dataset_with(csv_text, schema, &LoadOptions::default())?.dataset)
}

pub fn load_dataset_with(csv_text: &str, schema: &[ColumnSchema], opts: &LoadOptions) -> Result<Ingested, DataError> {
    let spec: Vec<(String, ColumnKind)> = schema.iter().map(|c| (c.name.clone(), c.kind)).collect();
    let mut rdr = reader(csv_text);
    let header = rdr.headers()?.clone();
    let positions = column_positions(&header, &spec, false)?;
    let (_, rows) = records(csv_text, header.len())?;

    // First pass: label values, categorical levels, continuous means.
    let mut labels = BTreeSet::new();
    let mut columns = Vec::with_capacity(schema.len());
    for (col, pos) in schema.iter().zip(&positions) {
        let pos = pos.expect("all training columns are present");
        let mut encoded = EncodedColumn {
            name: col.name.clone(),
            kind: col.kind,
            levels: Vec::new(),
            mean: None,
        };
        match col.kind {
            ColumnKind::Label => {
                for (r, rec) in rows.iter().enumerate() {
                    let v = &rec[pos];
                    if is_missing(v) {
                        return Err(DataError::Value {
                            row: r + 1,
                            column: col.name.clone(),
                            message: "missing label".into(),
                        });
                    }
                    labels.insert(v.to_string());
                }
            }
            ColumnKind::Categorical => {
                let mut seen = BTreeSet::new();
                let mut missing = false;
                for rec in &rows {
                    let v = &rec[pos];
                    if is_missing(v) {
                        missing = true;
                    } else {
                        seen.insert(v.to_string());
                    }
                }
                encoded.levels = seen.into_iter().map(Some).collect();
                if missing {
                    encoded.levels.push(None);
                }
            }
            ColumnKind::Continuous => {
                let (mut sum, mut count) = (0.0, 0usize);
                for (r, rec) in rows.iter().enumerate() {
                    if let Some(v) = parse_continuous(&rec[pos], r + 1, &col.name)? {
                        sum += v;
                        count += 1;
                    }
                }
                if count == 0 {
                    return Err(DataError::AllMissing(col.name.clone()));
                }
                encoded.mean = Some(sum / count as f64);
            }
            ColumnKind::Binary => {}
        }
        columns.push(encoded);
    }
    if labels.len() != 2 {
        return Err(DataError::LabelValues(labels.len()));
    }
    let mut labels: Vec<String> = labels.into_iter().collect();
    if let Some(first) = &opts.class1_label {
        match labels.iter().position(|l| l == first) {
            Some(0) => {}
            Some(_) => labels.swap(0, 1),
            None => return Err(DataError::UnknownLabel(first.clone())),
        }
    }
    let encoding = Encoding {
        columns,
        labels: [labels[0].clone(), labels[1].clone()],
    };

    // Second pass: encode.
    let mut class1 = Vec::new();
    let mut class2 = Vec::new();
    for (r, rec) in rows.iter().enumerate() {
        let row = encoding.encode_record(rec, &positions, r + 1)?;
        match row.label.expect("training rows carry labels") {
            Class::One => class1.push(row.observation),
            Class::Two => class2.push(row.observation),
        }
    }
    let dataset = MixedDataset::with_dims(class1, class2, encoding.p(), encoding.d())?;
    Ok(Ingested { dataset, encoding })
}

impl Encoding {
    pub fn p(&self) -> usize {
        self.columns.iter().filter(|c| c.kind == ColumnKind::Continuous).count()
    }

    pub fn d(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match c.kind {
                ColumnKind::Categorical => c.levels.len(),
                ColumnKind::Binary => 1,
                _ => 0,
            })
            .sum()
    }

    pub fn class_of(&self, label: &str) -> Option<Class> {
        if label == self.labels[0] {
            Some(Class::One)
        } else if label == self.labels[1] {
            Some(Class::Two)
        } else {
            None
        }
    }

    pub fn label_of(&self, class: Class) -> &str {
        &self.labels[usize::from(class.index() - 1)]
    }

    /// Names of the location coordinates: `column=level` for indicators (the missing
    /// level is `column=`), the column name for binary columns.
    pub fn location_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.columns {
            match c.kind {
                ColumnKind::Categorical => {
                    for l in &c.levels {
                        out.push(format!("{}={}", c.name, l.as_deref().unwrap_or("")));
                    }
                }
                ColumnKind::Binary => out.push(c.name.clone()),
                _ => {}
            }
        }
        out
    }

    fn encode_record(
        &self,
        rec: &StringRecord,
        positions: &[Option<usize>],
        row: usize,
    ) -> Result<EncodedRow, DataError> {
        let mut z = Vec::with_capacity(self.p());
        let mut u = Vec::with_capacity(self.d());
        let mut label = None;
        for (col, pos) in self.columns.iter().zip(positions) {
            let Some(pos) = *pos else { continue };
            let field = &rec[pos];
            match col.kind {
                ColumnKind::Continuous => {
                    let v = parse_continuous(field, row, &col.name)?;
                    z.push(v.unwrap_or(col.mean.expect("continuous columns carry a mean")));
                }
                ColumnKind::Categorical => {
                    let value = (!is_missing(field)).then_some(field);
                    let hit = col.levels.iter().position(|l| l.as_deref() == value);
                    if hit.is_none() {
                        log::warn!(
                            "row {row}: level `{field}` of `{}` was not seen in training; all its indicators are 0",
                            col.name
                        );
                    }
                    u.extend((0..col.levels.len()).map(|k| u8::from(Some(k) == hit)));
                }
                ColumnKind::Binary => u.push(parse_binary(field, row, &col.name)?),
                ColumnKind::Label => {
                    label = Some(self.class_of(field).ok_or_else(|| DataError::Value {
                        row,
                        column: col.name.clone(),
                        message: format!("unknown label `{field}`"),
                    })?);
                }
            }
        }
        Ok(EncodedRow {
            observation: MixedObservation::new(z, u)?,
            label,
        })
    }

    /// Encodes rows of a CSV with the training columns; the label column is optional.
    pub fn encode_csv(&self, csv_text: &str) -> Result<Vec<EncodedRow>, DataError> {
        let spec: Vec<(String, ColumnKind)> = self.columns.iter().map(|c| (c.name.clone(), c.kind)).collect();
        let mut rdr = reader(csv_text);
        let header = rdr.headers()?.clone();
        let positions = column_positions(&header, &spec, true)?;
        let (_, rows) = records(csv_text, header.len())?;
        rows.iter()
            .enumerate()
            .map(|(r, rec)| self.encode_record(rec, &positions, r + 1))
            .collect()
    }
}
