use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Result, Scalar};

/// Which CSV column holds the targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
    /// The rightmost column.
    Last,
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "last" => ColumnSelector::Last,
            _ => s.parse().map_or_else(|_| ColumnSelector::Name(s.to_string()), ColumnSelector::Index),
        })
    }
}

/// Numeric CSV contents with an optional header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn columns(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn resolve(&self, selector: &ColumnSelector) -> Result<usize> {
        let cols = self.columns();
        let index = match selector {
            ColumnSelector::Index(i) => *i,
            ColumnSelector::Last => cols.saturating_sub(1),
            ColumnSelector::Name(name) => self
                .header
                .as_ref()
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(|| Error::argument(format!("no column named '{name}'")))?,
        };
        if index >= cols {
            return Err(Error::argument(format!("target column {index} out of range for {cols} columns")));
        }
        Ok(index)
    }

    /// Splits off the target column; the other columns become inputs in
    /// file order. No scaling is applied.
    pub fn to_dataset<T: Scalar>(&self, target: &ColumnSelector) -> Result<Dataset<T>> {
        let t = self.resolve(target)?;
        if self.columns() < 2 {
            return Err(Error::argument("need at least one input column besides the target"));
        }
        let mut inputs = Vec::with_capacity(self.rows.len() * (self.columns() - 1));
        let mut targets = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            for (j, &v) in row.iter().enumerate() {
                if j == t {
                    targets.push(T::of(v));
                } else {
                    inputs.push(T::of(v));
                }
            }
        }
        Dataset::new(inputs, self.columns() - 1, targets)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

/// Reads a comma-separated numeric file. The first row is taken as a header
/// when any of its cells fails to parse as a number.
pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(file);
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: Vec<std::result::Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if line == 0 && parsed.iter().any(|v| v.is_err()) {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (column, value) in parsed.into_iter().enumerate() {
            match value {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        row: line + 1,
                        column: column + 1,
                        message: format!("non-numeric cell '{}'", &record[column]),
                    })
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty(format!("{} has no data rows", path.display())));
    }
    Ok(CsvTable { header, rows })
}

/// Reads a CSV file and min-max scales every input column to `[0, 1]`.
pub fn load_csv<T: Scalar>(path: &Path, target: &ColumnSelector) -> Result<Dataset<T>> {
    let raw = read_csv(path)?.to_dataset(target)?;
    Ok(InputScaling::fit(&raw).apply(&raw))
}

/// Per-column min-max map fitted on one dataset and reusable on another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputScaling {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl InputScaling {
    pub fn fit<T: Scalar>(data: &Dataset<T>) -> Self {
        let n = data.dim();
        let mut min = vec![f64::INFINITY; n];
        let mut max = vec![f64::NEG_INFINITY; n];
        for row in data.rows() {
            for j in 0..n {
                let v = row[j].to_f64_lossy();
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        InputScaling { min, max }
    }

    /// Constant columns map to 0.
    pub fn apply<T: Scalar>(&self, data: &Dataset<T>) -> Dataset<T> {
        let n = data.dim();
        let inputs = data
            .inputs()
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                let j = p % n;
                let span = self.max[j] - self.min[j];
                if span > 0.0 {
                    (v - T::of(self.min[j])) / T::of(span)
                } else {
                    T::zero()
                }
            })
            .collect();
        Dataset::new(inputs, n, data.targets().to_vec()).expect("scaling preserves shape")
    }
}

/// Writes `x1..xn,y` columns with shortest round-trip float formatting.
pub fn write_csv<T: Scalar, W: Write>(data: &Dataset<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (row, y) in data.rows().zip(data.targets()) {
        w.write_record(row.iter().chain(std::iter::once(y)).map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| io_error(Path::new("<csv>"), e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_csv(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_detection_and_selection() {
        let f = temp_csv("a,b,price\n1,2,3\n4,5,6\n");
        let t = read_csv(f.path()).unwrap();
        assert_eq!(t.header.as_deref(), Some(&["a".to_string(), "b".into(), "price".into()][..]));
        let d: Dataset<f64> = t.to_dataset(&"price".parse().unwrap()).unwrap();
        assert_eq!(d.inputs(), &[1.0, 2.0, 4.0, 5.0]);
        assert_eq!(d.targets(), &[3.0, 6.0]);
        let d: Dataset<f64> = t.to_dataset(&ColumnSelector::Index(0)).unwrap();
        assert_eq!(d.inputs(), &[2.0, 3.0, 5.0, 6.0]);
        assert!(t.to_dataset::<f64>(&ColumnSelector::Name("nope".into())).is_err());
        assert!(t.to_dataset::<f64>(&ColumnSelector::Index(3)).is_err());
    }

    #[test]
    fn positional_file_round_trips_exactly() {
        let f = temp_csv("0.1,0.30000000000000004,-7.25\n1e-300,2.5,3\n");
        let t = read_csv(f.path()).unwrap();
        assert!(t.header.is_none());
        let d: Dataset<f64> = t.to_dataset(&ColumnSelector::Last).unwrap();
        assert_eq!(d.inputs(), &[0.1, 0.30000000000000004, 1e-300, 2.5]);
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        let g = temp_csv(std::str::from_utf8(&buf).unwrap());
        let back: Dataset<f64> = read_csv(g.path()).unwrap().to_dataset(&ColumnSelector::Last).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn parse_error_carries_location() {
        let f = temp_csv("x,y\n1,2\n3,oops\n");
        match read_csv(f.path()) {
            Err(Error::Parse { row, column, .. }) => assert_eq!((row, column), (3, 2)),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(read_csv(Path::new("/definitely/missing.csv")), Err(Error::Io { .. })));
        assert!(matches!(read_csv(temp_csv("a,b\n").path()), Err(Error::Empty(_))));
    }

    #[test]
    fn load_scales_inputs_only() {
        let f = temp_csv("2,10,5\n4,10,6\n3,10,7\n");
        let d: Dataset<f64> = load_csv(f.path(), &ColumnSelector::Last).unwrap();
        assert_eq!(d.inputs(), &[0.0, 0.0, 1.0, 0.0, 0.5, 0.0]);
        assert_eq!(d.targets(), &[5.0, 6.0, 7.0]);
    }
}
