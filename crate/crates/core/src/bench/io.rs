use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{FeatureVector, LabeledDataset};

/// Reads an `.fvecs` file: repeated `[dim: i32 LE][dim × f32 LE]`.
pub fn load_fvecs(path: &Path) -> Result<Vec<FeatureVector>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_fvecs(&bytes, path)
}

pub fn parse_fvecs(bytes: &[u8], path: &Path) -> Result<Vec<FeatureVector>> {
    let format = |offset: usize, message: String| Error::Format {
        path: path.to_owned(),
        offset: offset as u64,
        message,
    };
    let mut out = Vec::new();
    let mut pos = 0;
    let mut dim0 = None;
    while pos < bytes.len() {
        let header = bytes
            .get(pos..pos + 4)
            .ok_or_else(|| format(pos, "truncated dimension header".into()))?;
        let dim = i32::from_le_bytes(header.try_into().expect("4 bytes"));
        if dim <= 0 {
            return Err(format(pos, format!("invalid dimension {dim}")));
        }
        let dim = dim as usize;
        match dim0 {
            None => dim0 = Some(dim),
            Some(d) if d != dim => {
                return Err(format(pos, format!("dimension {dim} differs from first record's {d}")))
            }
            _ => {}
        }
        let start = pos + 4;
        let body = bytes
            .get(start..start + 4 * dim)
            .ok_or_else(|| format(pos, format!("truncated record {}", out.len())))?;
        let comps = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        out.push(FeatureVector::new(out.len(), comps)?);
        pos = start + 4 * dim;
    }
    Ok(out)
}

pub fn write_fvecs<V: AsRef<[f32]>>(path: &Path, vectors: &[V]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for v in vectors {
        let v = v.as_ref();
        w.write_all(&(v.len() as i32).to_le_bytes()).map_err(io)?;
        for c in v {
            w.write_all(&c.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// One non-negative integer per line.
pub fn load_labels(path: &Path) -> Result<Vec<usize>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let label = line.trim().parse::<usize>().map_err(|_| Error::LineFormat {
            path: path.to_owned(),
            line: i + 1,
            message: format!("expected a non-negative integer, got '{}'", line.trim()),
        })?;
        labels.push(label);
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for l in labels {
        writeln!(w, "{l}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Comma-separated floats with the integer label in the last column, no
/// header.
pub fn load_csv_dataset(path: &Path) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line_err = |message: String| Error::LineFormat {
            path: path.to_owned(),
            line: i + 1,
            message,
        };
        if record.len() < 2 {
            return Err(line_err("need at least one feature and a label".into()));
        }
        let label_field = &record[record.len() - 1];
        let label = label_field
            .parse::<usize>()
            .map_err(|_| line_err(format!("bad label '{label_field}'")))?;
        let row = record
            .iter()
            .take(record.len() - 1)
            .map(|f| f.parse::<f32>().map_err(|_| line_err(format!("bad number '{f}'"))))
            .collect::<Result<Vec<f32>>>()?;
        vectors.push(row);
        labels.push(label);
    }
    LabeledDataset::new(vectors, labels, None)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => Error::LineFormat {
            path: path.to_owned(),
            line: pos.line() as usize,
            message: e.to_string(),
        },
        None => Error::Format {
            path: path.to_owned(),
            offset: 0,
            message: e.to_string(),
        },
    }
}

/// Loads a labeled dataset, choosing the format by extension: `.csv` is
/// self-labeled, anything else is read as fvecs and needs `labels`.
pub fn load_dataset(path: &Path, labels: Option<&Path>) -> Result<LabeledDataset> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        return load_csv_dataset(path);
    }
    let labels_path =
        labels.ok_or_else(|| Error::Config(format!("{} needs a labels file", path.display())))?;
    let vectors = load_fvecs(path)?;
    let labels = load_labels(labels_path)?;
    if vectors.len() != labels.len() {
        return Err(Error::LabelCountMismatch {
            vectors: vectors.len(),
            labels: labels.len(),
        });
    }
    LabeledDataset::from_feature_vectors(vectors, labels, None)
}
