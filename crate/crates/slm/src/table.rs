//! CSV tables written atomically: rows go to a temporary file in the destination
//! directory, which is then renamed over the target.

use std::fs;
use std::io::Write;
use std::path::Path;

use csv::{ReaderBuilder, Terminator, WriterBuilder};
use tempfile::NamedTempFile;

use crate::error::DataError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// `# `-prefixed lines written before the header (seed and configuration echo).
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            comments: Vec::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn push<S: ToString>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(|v| v.to_string()).collect());
    }

    /// CSV text with LF line endings.
    pub fn to_csv(&self) -> Result<String, DataError> {
        let mut out = Vec::new();
        for c in &self.comments {
            writeln!(out, "# {c}").expect("writing to memory cannot fail");
        }
        {
            let mut w = WriterBuilder::new()
                .terminator(Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush().expect("writing to memory cannot fail");
        }
        Ok(String::from_utf8(out).expect("CSV fields are UTF-8"))
    }

    /// Parses text produced by [`Table::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, DataError> {
        let comments = text
            .lines()
            .map_while(|l| l.strip_prefix("# "))
            .map(str::to_string)
            .collect::<Vec<_>>();
        let mut rdr = ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = rdr.headers()?.iter().map(str::to_string).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Table { comments, header, rows })
    }
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), DataError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| DataError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| DataError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| DataError::io(path, e))?;
    tmp.persist(path).map_err(|e| DataError::io(path, e.error))?;
    Ok(())
}

pub fn emit_table(table: &Table, path: &Path) -> Result<(), DataError> {
    write_atomic(path, table.to_csv()?.as_bytes())
}

pub fn read_text(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|e| DataError::io(path, e))
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["n", "method", "regret"]);
        assert_eq!(t.to_csv().unwrap(), "n,method,regret\n");
    }

    #[test]
    fn write_then_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(["a", "b"]).with_comment("seed=7");
        t.push([fmt_f64(0.1 + 0.2), "x,y".to_string()]);
        t.push([fmt_f64(-1e-300), "\"q\"".to_string()]);
        emit_table(&t, &path).unwrap();
        let text = read_text(&path).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("# seed=7\n"));
        let back = Table::from_csv(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.rows[0][0].parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let t = Table::new(["a"]);
        let err = emit_table(&t, Path::new("/nonexistent-dir/sub/t.csv")).unwrap_err();
        assert!(matches!(err, DataError::Io { .. }));
    }
}
