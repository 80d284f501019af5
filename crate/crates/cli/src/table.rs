//! Number formatting and the CSV layer.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`; infinities are `inf`/`-inf` and NaN is `nan`.

use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:?}")
    }
}

pub fn parse_number(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

/// A header plus string cells, as written to or read from disk.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|x| format_number(*x)).collect());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column `name` parsed as numbers; unparsable cells become NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| parse_number(&r[k]).unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let file = File::create(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let header: Vec<String> = r
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.map_err(csv_err)?;
            if record.len() != header.len() {
                return Err(CliError::Table {
                    path: path.to_path_buf(),
                    message: format!(
                        "row has {} fields, header has {}",
                        record.len(),
                        header.len()
                    ),
                });
            }
            rows.push(record.iter().map(str::to_string).collect());
        }
        Ok(Self { header, rows })
    }
}

/// Joins `dir` and `name`, creating `dir` if needed.
pub fn output_path(dir: &Path, name: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(dir.join(name))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_forms() {
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1.0), "1.0");
        assert_eq!(format_number(1e-20), "1e-20");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(-0.0), "-0.0");
    }

    #[test]
    fn parse_inverts_format() {
        for x in [0.1, 1.0 / 3.0, 2.364318083507378, 1e300, -7.5e-310, 0.0] {
            assert_eq!(parse_number(&format_number(x)), Some(x));
        }
        assert_eq!(parse_number("inf"), Some(f64::INFINITY));
        assert!(parse_number("nan").unwrap().is_nan());
        assert_eq!(parse_number("x"), None);
    }

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(&["a", "b"]);
        t.push_numbers(&[0.1, f64::INFINITY]);
        t.push(vec!["Edge-broken".into(), "".into()]);
        t.write(&path).unwrap();
        let back = Table::read(&path).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.numeric_column("a").unwrap()[0], 0.1);
        assert!(back.numeric_column("z").is_none());
    }
}
