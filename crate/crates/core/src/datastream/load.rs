use std::path::Path;

use csv::{ReaderBuilder, Trim};

use super::{Dataset, LabeledPattern};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reads a headed, comma-separated file whose last column is the class label.
///
/// Rows are numbered from 1 for the first data row, columns from 1.
pub fn load_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(file);

    let malformed = |reason: String| Error::Malformed {
        path: path.to_path_buf(),
        reason,
    };
    let headers = reader.headers().map_err(|e| malformed(e.to_string()))?.clone();
    if headers.len() < 2 {
        return Err(malformed(
            "header needs at least one feature column and a label column".into(),
        ));
    }
    let width = headers.len();
    let feature_names: Vec<String> = headers.iter().take(width - 1).map(str::to_string).collect();

    let mut classes: Vec<String> = Vec::new();
    let mut patterns = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| malformed(format!("row {row}: {e}")))?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                row,
                expected: width,
                found: record.len(),
            });
        }
        let mut features = Vec::with_capacity(width - 1);
        for (col, cell) in record.iter().take(width - 1).enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    path: path.to_path_buf(),
                    row,
                    column: col + 1,
                    name: feature_names[col].clone(),
                    value: cell.to_string(),
                })?;
            features.push(T::of(v));
        }
        let name = &record[width - 1];
        let label = match classes.iter().position(|c| c == name) {
            Some(l) => l,
            None => {
                classes.push(name.to_string());
                classes.len() - 1
            }
        };
        patterns.push(LabeledPattern { features, label });
    }
    if patterns.is_empty() {
        return Err(malformed("no data rows".into()));
    }
    if classes.len() < 2 {
        return Err(Error::SingleClass(classes.remove(0)));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Dataset::new(name, patterns, feature_names, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn minimal_file() {
        let f = write("a,b,class\n0.1,0.2,x\n0.3,0.4,y\n");
        let ds: Dataset<f64> = load_csv(f.path()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.classes, ["x", "y"]);
        assert_eq!(ds.feature_names, ["a", "b"]);
        assert_eq!(ds.patterns[1].features, [0.3, 0.4]);
    }

    #[test]
    fn non_numeric_cell() {
        let f = write("a,b,class\n0.1,0.2,x\n0.3,abc,y\n");
        let err = load_csv::<f64>(f.path()).unwrap_err();
        match &err {
            Error::NonNumeric { row, column, value, .. } => {
                assert_eq!((*row, *column, value.as_str()), (2, 2, "abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("row 2, column 2"));
    }

    #[test]
    fn ragged_row() {
        let f = write("a,b,class\n0.1,0.2,x\n0.3,y\n");
        assert!(matches!(
            load_csv::<f64>(f.path()),
            Err(Error::RaggedRow {
                row: 2,
                expected: 3,
                found: 2,
                ..
            })
        ));
    }

    #[test]
    fn single_class_and_missing() {
        let f = write("a,class\n0.1,x\n0.3,x\n");
        assert!(matches!(load_csv::<f64>(f.path()), Err(Error::SingleClass(_))));
        assert!(matches!(
            load_csv::<f64>("/no/such/file.csv"),
            Err(Error::MissingFile { .. })
        ));
    }
}
