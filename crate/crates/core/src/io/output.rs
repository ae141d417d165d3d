//! Result artifacts: CSV tables with 12 significant digits and pretty JSON.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::{Error, Result};

/// Significant digits of every number written to CSV.
pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with [`CSV_SIGNIFICANT_DIGITS`] significant digits, in fixed
/// notation for moderate exponents and scientific notation otherwise.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = CSV_SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.into()
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Flag(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_number(*x),
            Cell::Flag(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// A table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::InvalidArgument(format!(
                "CSV row has {} cells, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(io_err)?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out =
        serde_json::to_vec_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    out.push(b'\n');
    Ok(out)
}

/// Files collected in memory and written together, or not at all.
#[derive(Debug, Default)]
pub struct ArtifactSet {
    files: Vec<(String, Vec<u8>)>,
}

impl ArtifactSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_csv(&mut self, name: impl Into<String>, table: &CsvTable) -> Result<()> {
        self.add(name, table.to_bytes()?);
        Ok(())
    }

    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        self.add(name, json_bytes(value)?);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes every file into `dir`, creating it if needed. On failure the
    /// files written so far, and the directory if it was created, are removed.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let created = !dir.exists();
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Err(e) = std::fs::write(&path, bytes) {
                for p in &written {
                    let _ = std::fs::remove_file(p);
                }
                let _ = std::fs::remove_file(&path);
                if created {
                    let _ = std::fs::remove_dir(dir);
                }
                return Err(e.into());
            }
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_number(123456.789), "123456.789");
        assert_eq!(format_number(0.8f64.powi(21)), "0.00922337203685");
        assert_eq!(format_number(1e-12), "1e-12");
        assert_eq!(format_number(-1.5e-7), "-1.5e-7");
        assert_eq!(format_number(6.02214076e23), "6.02214076e23");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn parsed_back_within_precision() {
        for x in [
            std::f64::consts::PI,
            1e-9 / 7.0,
            12345.678901234,
            -0.000123456789012345,
        ] {
            let y: f64 = format_number(x).parse().unwrap();
            assert!((x - y).abs() <= 1e-11 * x.abs(), "{x} {y}");
        }
    }

    #[test]
    fn csv_has_header_and_checks_width() {
        let mut t = CsvTable::new(&["n", "value", "note"]);
        t.push(vec![1usize.into(), 0.5.into(), "a,b".into()])
            .unwrap();
        t.push(vec![
            2usize.into(),
            Cell::from(None::<f64>),
            Cell::Flag(true),
        ])
        .unwrap();
        assert!(t.push(vec![3usize.into()]).is_err());
        let text = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        assert_eq!(text, "n,value,note\n1,0.5,\"a,b\"\n2,,true\n");
    }

    #[test]
    fn failed_commit_leaves_nothing() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("out");
        let mut a = ArtifactSet::new();
        a.add("ok.txt", b"x".to_vec());
        a.add("missing/sub.txt", b"y".to_vec());
        assert!(a.commit(&dir).is_err());
        assert!(!dir.exists());
        let mut b = ArtifactSet::new();
        b.add("ok.txt", b"x".to_vec());
        let paths = b.commit(&dir).unwrap();
        assert_eq!(std::fs::read(&paths[0]).unwrap(), b"x");
    }
}
