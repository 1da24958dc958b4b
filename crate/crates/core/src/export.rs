//! CSV/JSON output and run manifests.
//!
//! CSV files carry `#`-prefixed metadata lines, one header line and numbers with 15
//! significant digits.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Significant digits written for every number.
pub const SIG_DIGITS: usize = 15;

/// `x` with [`SIG_DIGITS`] significant digits, plain decimal where reasonable.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round once in scientific form so the digit count is exact.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..15).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("round trip");
    let s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A numeric table with metadata.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidDimension(format!("row of {} values for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Build from equal-length columns.
    pub fn from_columns<S: Into<String>>(names: impl IntoIterator<Item = S>, cols: &[&[f64]]) -> Result<Self> {
        let mut t = Self::new(names);
        if t.columns.len() != cols.len() {
            return Err(Error::InvalidDimension("column names and data differ in count".into()));
        }
        let n = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidDimension("columns differ in length".into()));
        }
        for i in 0..n {
            t.rows.push(cols.iter().map(|c| c[i]).collect());
        }
        Ok(t)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let v = v.replace('\n', " ");
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|&x| format_number(x)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// The header and data lines only.
    pub fn body(&self) -> String {
        self.to_csv_string().lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Parse a file written by [`CsvTable::write`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = CsvTable::default();
        let mut header = None;
        for line in text.lines() {
            if let Some(m) = line.strip_prefix('#') {
                let (k, v) = m.trim().split_once(':').unwrap_or((m.trim(), ""));
                t.metadata.push((k.trim().to_string(), v.trim().to_string()));
            } else if header.is_none() {
                header = Some(line.split(',').map(str::to_string).collect::<Vec<_>>());
            } else if !line.is_empty() {
                let row = line
                    .split(',')
                    .map(|x| x.parse::<f64>().map_err(|e| Error::Format(format!("{x:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                t.rows.push(row);
            }
        }
        t.columns = header.ok_or_else(|| Error::Format("missing header line".into()))?;
        if t.rows.iter().any(|r| r.len() != t.columns.len()) {
            return Err(Error::Format("ragged CSV rows".into()));
        }
        Ok(t)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Output format of the tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Write `table` as `<dir>/<stem>.<ext>` and return the path.
pub fn write_table(dir: &Path, stem: &str, table: &CsvTable, format: OutputFormat) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    match format {
        OutputFormat::Csv => table.write(&path)?,
        OutputFormat::Json => write_json(&path, table)?,
    }
    Ok(path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// Everything needed to rerun a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub command: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
    pub versions: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, parameters: serde_json::Value) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("nuqg-core".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("graph-format".to_string(), crate::graph::FORMAT_TAG.to_string());
        Self { tool: "nuqg".into(), command: command.into(), seed, parameters, outputs: Vec::new(), versions }
    }

    pub fn with_version(mut self, name: &str, version: &str) -> Self {
        self.versions.insert(name.into(), version.into());
        self
    }

    pub fn add_output(&mut self, path: &Path) {
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.outputs.push(name);
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_number(std::f64::consts::PI * 100.0), "314.159265358979");
        assert_eq!(format_number(1e-7), "1e-7");
        assert_eq!(format_number(1.234e20), "1.234e20");
        assert_eq!(format_number(123456.0), "123456");
        assert_eq!(format_number(f64::NAN), "nan");
        for x in [1.0 / 7.0, 12345.678901234567, 9.999999999999999e-3, 2.0e14 / 3.0] {
            let y: f64 = format_number(x).parse().unwrap();
            assert!(((x - y) / x).abs() < 1e-14, "{x} vs {y}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut t = CsvTable::new(["s", "p"]).meta("nu", 1.5).meta("source", "rmt");
        t.push(vec![0.0, 1.0 / 3.0]).unwrap();
        t.push(vec![0.1, 2.0]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let text = t.to_csv_string();
        assert!(text.starts_with("# nu: 1.5\n# source: rmt\ns,p\n0,0.333333333333333\n"));
        assert_eq!(t.body().lines().count(), 3);
        let back = CsvTable::parse(&text).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.metadata, t.metadata);
        assert_eq!(back.column("p").unwrap()[1], 2.0);
    }

    #[test]
    fn table_and_manifest_files() {
        let dir = tempfile::tempdir().unwrap();
        let t = CsvTable::from_columns(["a", "b"], &[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let csv = write_table(dir.path(), "t", &t, OutputFormat::Csv).unwrap();
        let json = write_table(dir.path(), "t", &t, OutputFormat::Json).unwrap();
        assert_eq!(CsvTable::parse(&std::fs::read_to_string(&csv).unwrap()).unwrap().rows, t.rows);
        let back: CsvTable = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(back, t);
        let mut m = Manifest::new("rmt-curve", 7, serde_json::json!({"nu": 2.0}));
        m.add_output(&csv);
        let path = m.write(dir.path()).unwrap();
        let back: Manifest = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.outputs, vec!["t.csv"]);
    }
}
