//! Field CSV codecs and atomic report writing.
//!
//! Continuous fields: header `coord,re,im`, one row per spatial node of a
//! uniform power-of-two grid on [-L, L). Discrete fields: the same columns
//! with coord = h·n (the step h is supplied out of band). All floats are
//! written with fixed 17-significant-digit scientific formatting so that
//! identical inputs produce byte-identical files.

use std::fs;
use std::path::Path;

use phasegrid::grid::{ContinuousField, Dim, DiscreteField, SpatialWindow, C64};
use phasegrid::{Error, Result};

pub fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// Write a file atomically: stage next to the target, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_continuous(path: &Path, field: &ContinuousField) -> Result<()> {
    let w = field.window();
    if w.dim() != Dim::One {
        return Err(Error::BadParams("field CSV files are one-dimensional".into()));
    }
    let mut out = String::from("coord,re,im\n");
    for (j, v) in field.values().iter().enumerate() {
        out.push_str(&fmt(w.x_node_1d(j)));
        out.push(',');
        out.push_str(&fmt(v.re));
        out.push(',');
        out.push_str(&fmt(v.im));
        out.push('\n');
    }
    write_atomic(path, &out)
}

pub fn write_discrete(path: &Path, field: &DiscreteField) -> Result<()> {
    if field.dim() != Dim::One {
        return Err(Error::BadParams("field CSV files are one-dimensional".into()));
    }
    let h = field.step();
    let mut out = String::from("coord,re,im\n");
    for (i, v) in field.values().iter().enumerate() {
        let n = field.n_min()[0] + i as i64;
        out.push_str(&fmt(h * n as f64));
        out.push(',');
        out.push_str(&fmt(v.re));
        out.push(',');
        out.push_str(&fmt(v.im));
        out.push('\n');
    }
    write_atomic(path, &out)
}

fn parse_rows(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("coord")) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::SpecParse(format!(
                "{}: line {} needs coord,re,im",
                path.display(),
                i + 1
            )));
        }
        let p = |t: &str| -> Result<f64> {
            t.parse().map_err(|_| Error::SpecParse(format!("bad number {t:?}")))
        };
        rows.push((p(cols[0])?, p(cols[1])?, p(cols[2])?));
    }
    if rows.len() < 16 {
        return Err(Error::SpecParse("field file needs at least 16 rows".into()));
    }
    Ok(rows)
}

pub fn read_continuous(path: &Path) -> Result<ContinuousField> {
    let rows = parse_rows(path)?;
    let n = rows.len();
    if !n.is_power_of_two() {
        return Err(Error::SpecParse(format!("row count {n} must be a power of two")));
    }
    let dx = rows[1].0 - rows[0].0;
    let l = -rows[0].0;
    if (dx - 2.0 * l / n as f64).abs() > 1e-9 * dx.abs() {
        return Err(Error::SpecParse("coords must form a uniform grid on [-L, L)".into()));
    }
    for (j, r) in rows.iter().enumerate() {
        let expect = -l + j as f64 * dx;
        if (r.0 - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
            return Err(Error::SpecParse(format!("non-uniform coord at row {}", j + 1)));
        }
    }
    let window = SpatialWindow::new(Dim::One, l, n)?;
    ContinuousField::from_values(window, rows.iter().map(|r| C64::new(r.1, r.2)).collect())
}

pub fn read_discrete(path: &Path, h: f64) -> Result<DiscreteField> {
    let rows = parse_rows(path)?;
    let n_min = (rows[0].0 / h).round() as i64;
    for (i, r) in rows.iter().enumerate() {
        let n = n_min + i as i64;
        if (r.0 - h * n as f64).abs() > 1e-9 * (1.0 + r.0.abs()) {
            return Err(Error::SpecParse(format!(
                "row {} does not sit on the step-{h} grid",
                i + 1
            )));
        }
    }
    DiscreteField::new(
        h,
        Dim::One,
        [n_min, 0],
        [rows.len(), 1],
        rows.iter().map(|r| C64::new(r.1, r.2)).collect(),
    )
}
