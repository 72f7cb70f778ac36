//! File formats.
//!
//! Datasets are CSV with the header `setting_a,setting_b,counts,duration_s,label`;
//! settings are `H, V, D, A, R, L` or `hwp:<degrees>`. The JSON form is an
//! array of objects with the same field names. Angles in files are degrees.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{format_degrees, CurvePoint};
use crate::source::CountRecord;
use crate::tomography::TomographyResult;

pub const DATASET_HEADER: [&str; 5] = ["setting_a", "setting_b", "counts", "duration_s", "label"];

pub fn write_dataset_csv<W: Write>(records: &[CountRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DATASET_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.setting_a.to_string(),
            r.setting_b.to_string(),
            r.counts.to_string(),
            format!("{}", r.duration),
            r.label.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a dataset CSV. Errors carry the 1-based line number.
pub fn read_dataset_csv<R: Read>(input: R) -> Result<Vec<CountRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 4 || cols[..4] != DATASET_HEADER[..4] || (cols.len() > 4 && cols[4] != "label") {
        return Err(parse_err(1, format!("expected header '{}'", DATASET_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        if row.len() < 4 || row.len() > 5 {
            return Err(parse_err(line, format!("expected 4 or 5 fields, got {}", row.len())));
        }
        let setting_a = row[0].parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        let setting_b = row[1].parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        let counts: u64 = row[2]
            .parse()
            .map_err(|_| parse_err(line, format!("counts '{}' is not a non-negative integer", &row[2])))?;
        let duration: f64 = row[3]
            .parse()
            .map_err(|_| parse_err(line, format!("duration '{}' is not a number", &row[3])))?;
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(parse_err(line, format!("duration must be positive, got {duration}")));
        }
        let label = row.get(4).filter(|s| !s.is_empty()).map(str::to_string);
        out.push(CountRecord {
            setting_a,
            setting_b,
            counts,
            duration,
            label,
        });
    }
    Ok(out)
}

pub fn write_dataset_json<W: Write>(records: &[CountRecord], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

pub fn read_dataset_json<R: Read>(input: R) -> Result<Vec<CountRecord>> {
    let records: Vec<CountRecord> = serde_json::from_reader(input).map_err(|e| parse_err(e.line(), e.to_string()))?;
    for (i, r) in records.iter().enumerate() {
        if !(r.duration > 0.0 && r.duration.is_finite()) {
            return Err(parse_err(0, format!("record {i}: duration must be positive")));
        }
    }
    Ok(records)
}

/// Reads a dataset, choosing JSON when the content starts with `[`.
pub fn read_dataset<R: Read>(mut input: R) -> Result<Vec<CountRecord>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    if text.trim_start().starts_with('[') {
        read_dataset_json(text.as_bytes())
    } else {
        read_dataset_csv(text.as_bytes())
    }
}

/// Writes a fringe as `two_beta_deg,<value_column>`; `value_column` is
/// `probability` for theory curves and `counts` for data.
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], value_column: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["two_beta_deg", value_column]).map_err(csv_err)?;
    for p in points {
        w.write_record([format_degrees(p.two_beta.to_degrees()), format!("{}", p.value)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

const BASIS_LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

/// Element table of a reconstructed density matrix, one row per entry:
/// `row,col,re,im,magnitude`.
pub fn write_density_table_csv<W: Write>(result: &TomographyResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "re", "im", "magnitude"]).map_err(csv_err)?;
    let m = result.rho.matrix();
    for r in 0..4 {
        for c in 0..4 {
            let z = m[(r, c)];
            w.write_record([
                BASIS_LABELS[r].to_string(),
                BASIS_LABELS[c].to_string(),
                format!("{}", z.re),
                format!("{}", z.im),
                format!("{}", z.norm()),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
