//! CSV and JSON file formats.
//!
//! Matrices are comma-separated decimals with an optional header row of
//! column labels and an optional leading column of row labels. Assignments
//! are integer CSVs of the same shape without labels. Floats are written in
//! shortest round-trip form with LF line endings.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BiclusterAssignment, ObservedMatrix};

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ObservedMatrix> {
    let path = path.as_ref();
    read_matrix_from(open(path)?)
}

pub fn read_matrix_from<R: Read>(reader: R) -> Result<ObservedMatrix> {
    let mut records = Vec::new();
    for rec in csv_reader(reader).records() {
        let rec = rec?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        records.push(rec.iter().map(str::to_owned).collect::<Vec<String>>());
    }
    if records.is_empty() {
        return Err(Error::InvalidMatrix("empty matrix file".into()));
    }
    let numeric = |s: &str| s.parse::<f64>().is_ok();

    let header = if records[0].iter().skip(1).all(|s| numeric(s)) && !records[0].is_empty() {
        // a fully numeric first line (label cell aside) is data, unless the
        // remaining rows show that column 0 holds labels
        None
    } else {
        Some(records.remove(0))
    };
    if records.is_empty() {
        return Err(Error::InvalidMatrix("no data rows".into()));
    }
    let labelled_rows = records.iter().all(|r| !r.is_empty() && !numeric(&r[0]));
    let header = match header {
        None if !labelled_rows && !records[0].iter().all(|s| numeric(s)) => {
            return Err(Error::InvalidMatrix("non-numeric entry in row 1".into()))
        }
        h => h,
    };

    let offset = usize::from(labelled_rows);
    let p = records[0].len().saturating_sub(offset);
    let n = records.len();
    let mut data = Vec::with_capacity(n * p);
    let mut row_labels = labelled_rows.then(|| Vec::with_capacity(n));
    for (i, rec) in records.iter().enumerate() {
        if rec.len() != p + offset {
            return Err(Error::InvalidMatrix(format!(
                "row {} has {} fields, expected {}",
                i + 1,
                rec.len(),
                p + offset
            )));
        }
        if let Some(labels) = row_labels.as_mut() {
            labels.push(rec[0].clone());
        }
        for (j, field) in rec[offset..].iter().enumerate() {
            let x: f64 = field.parse().map_err(|_| {
                Error::InvalidMatrix(format!(
                    "entry ({}, {}) is not a number: {field:?}",
                    i + 1,
                    j + 1
                ))
            })?;
            data.push(x);
        }
    }
    let col_labels = match header {
        Some(h) if h.len() == p + offset => Some(h[offset..].to_vec()),
        Some(h) if h.len() == p => Some(h),
        Some(h) => {
            return Err(Error::InvalidMatrix(format!(
                "header has {} fields for {p} columns",
                h.len()
            )))
        }
        None => None,
    };
    ObservedMatrix::from_row_major(n, p, data)?.with_labels(row_labels, col_labels)
}

pub fn write_matrix(path: impl AsRef<Path>, a: &ObservedMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_matrix_to(&mut out, a)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_matrix_to<W: Write>(writer: W, a: &ObservedMatrix) -> Result<()> {
    let mut w = csv_writer(writer);
    let row_labels = a.row_labels();
    if let Some(cols) = a.col_labels() {
        let mut header: Vec<&str> = Vec::with_capacity(cols.len() + 1);
        if row_labels.is_some() {
            header.push("");
        }
        header.extend(cols.iter().map(String::as_str));
        w.write_record(&header)?;
    }
    let mut fields: Vec<String> = Vec::with_capacity(a.ncols() + 1);
    for (i, row) in a.values().rows().into_iter().enumerate() {
        fields.clear();
        if let Some(labels) = row_labels {
            fields.push(labels[i].clone());
        }
        fields.extend(row.iter().map(|x| x.to_string()));
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| Error::io("<matrix>", e))
}

pub fn read_assignment(path: impl AsRef<Path>) -> Result<BiclusterAssignment> {
    let path = path.as_ref();
    read_assignment_from(open(path)?)
}

pub fn read_assignment_from<R: Read>(reader: R) -> Result<BiclusterAssignment> {
    let mut data = Vec::new();
    let mut n = 0;
    let mut p = None;
    for rec in csv_reader(reader).records() {
        let rec = rec?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if *p.get_or_insert(rec.len()) != rec.len() {
            return Err(Error::InvalidAssignment(format!(
                "row {} has {} fields",
                n + 1,
                rec.len()
            )));
        }
        for field in rec.iter() {
            data.push(
                field.parse::<u32>().map_err(|_| {
                    Error::InvalidAssignment(format!("not a group index: {field:?}"))
                })?,
            );
        }
        n += 1;
    }
    let p = p.ok_or_else(|| Error::InvalidAssignment("empty assignment file".into()))?;
    let g = Array2::from_shape_vec((n, p), data).expect("rectangular by construction");
    BiclusterAssignment::from_labels(g)
}

pub fn write_assignment(path: impl AsRef<Path>, g: &BiclusterAssignment) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_assignment_to(&mut out, g)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_assignment_to<W: Write>(writer: W, g: &BiclusterAssignment) -> Result<()> {
    let mut w = csv_writer(writer);
    for row in g.group_of().rows() {
        w.write_record(row.iter().map(|k| k.to_string()))?;
    }
    w.flush().map_err(|e| Error::io("<assignment>", e))
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}
