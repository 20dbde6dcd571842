//! Output formats: CSV profiles with a JSON sidecar, pretty JSON records,
//! and raw little-endian `f64` dumps with a JSON header.
//!
//! Profile columns are `r,value` on radial grids and `x1,..,xn,r,value` on
//! cartesian grids. Raw dumps are row-major with the last axis fastest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, GridSpec};
use crate::kernels::KernelProfile;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileHeader {
    pub kind: String,
    pub grid: GridSpec,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawHeader {
    pub dtype: String,
    pub byte_order: String,
    pub layout: String,
    pub shape: Vec<usize>,
    pub grid: GridSpec,
    pub kind: String,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn columns(grid: &Grid) -> Vec<String> {
    match grid {
        Grid::Radial(_) => vec!["r".into(), "value".into()],
        Grid::Cartesian(g) => (1..=g.n())
            .map(|a| format!("x{a}"))
            .chain(["r".into(), "value".into()])
            .collect(),
    }
}

/// One CSV row per grid node, plus `<path>.json` describing the columns.
pub fn write_profile(path: &Path, grid: &Grid, values: &[f64], kind: &str) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let cols = columns(grid);
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(&cols).map_err(|e| io_err(path, e))?;
    let radii = grid.radii();
    for (i, (v, r)) in values.iter().zip(&radii).enumerate() {
        let mut row: Vec<String> = match grid {
            Grid::Radial(_) => Vec::new(),
            Grid::Cartesian(g) => g.position(i)[..g.n()]
                .iter()
                .map(|x| format!("{x:e}"))
                .collect(),
        };
        row.push(format!("{r:e}"));
        row.push(format!("{v:e}"));
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    let header = ProfileHeader {
        kind: kind.into(),
        grid: grid.spec(),
        columns: cols,
        rows: values.len(),
    };
    write_json(&sidecar(path), &header)
}

pub fn write_field_profile(path: &Path, field: &Field, kind: &str) -> Result<()> {
    write_profile(path, field.grid(), field.values(), kind)
}

pub fn write_kernel_profile(path: &Path, profile: &KernelProfile) -> Result<()> {
    let grid = Grid::Radial(profile.grid.clone());
    write_profile(path, &grid, &profile.values, &profile.kind.label())
}

/// Values of a profile written by [`write_profile`], in node order.
pub fn read_profile(path: &Path) -> Result<(ProfileHeader, Vec<f64>)> {
    let text = fs::read_to_string(sidecar(path)).map_err(|e| io_err(path, e))?;
    let header: ProfileHeader = serde_json::from_str(&text).map_err(|e| io_err(path, e))?;
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let mut values = Vec::with_capacity(header.rows);
    for rec in r.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let last = rec.get(rec.len() - 1).unwrap_or("");
        values.push(last.parse::<f64>().map_err(|e| io_err(path, e))?);
    }
    Ok((header, values))
}

fn shape(grid: &Grid) -> Vec<usize> {
    match grid {
        Grid::Radial(g) => vec![g.len()],
        Grid::Cartesian(g) => vec![g.spec.points; g.n()],
    }
}

/// `<path>` holds the bytes, `<path>.json` the [`RawHeader`].
pub fn write_raw(path: &Path, field: &Field, kind: &str) -> Result<()> {
    let bytes: Vec<u8> = field
        .values()
        .iter()
        .flat_map(|v| v.to_le_bytes())
        .collect();
    fs::write(path, bytes).map_err(|e| io_err(path, e))?;
    let header = RawHeader {
        dtype: "f64".into(),
        byte_order: "little".into(),
        layout: "row-major".into(),
        shape: shape(field.grid()),
        grid: field.grid().spec(),
        kind: kind.into(),
    };
    write_json(&sidecar(path), &header)
}

pub fn read_raw(path: &Path) -> Result<(RawHeader, Vec<f64>)> {
    let text = fs::read_to_string(sidecar(path)).map_err(|e| io_err(path, e))?;
    let header: RawHeader = serde_json::from_str(&text).map_err(|e| io_err(path, e))?;
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let expected: usize = header.shape.iter().product();
    if bytes.len() != 8 * expected {
        return Err(Error::ShapeMismatch {
            expected: 8 * expected,
            got: bytes.len(),
        });
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight")))
        .collect();
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, CartesianSpec, RadialSpec};

    #[test]
    fn profile_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = make_grid(&GridSpec::Radial(RadialSpec::new(3, 10.0, 48))).unwrap();
        let u = Field::radial(&g, |r| (-r).exp());
        let p = dir.path().join("u.csv");
        write_field_profile(&p, &u, "solution").unwrap();
        let (h, v) = read_profile(&p).unwrap();
        assert_eq!(h.rows, 48);
        assert_eq!(h.columns, ["r", "value"]);
        assert_eq!(v, u.values());
        let lines = fs::read_to_string(&p).unwrap().lines().count();
        assert_eq!(lines, 49);
    }

    #[test]
    fn raw_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = make_grid(&GridSpec::Cartesian(CartesianSpec {
            n: 2,
            points: 8,
            half_length: 1.0,
        }))
        .unwrap();
        let u = Field::from_points(&g, |x| x[0] - 2.0 * x[1]).unwrap();
        let p = dir.path().join("u.bin");
        write_raw(&p, &u, "solution").unwrap();
        assert_eq!(fs::metadata(&p).unwrap().len(), 8 * 64);
        let (h, v) = read_raw(&p).unwrap();
        assert_eq!(h.shape, [8, 8]);
        assert_eq!(v, u.values());
        let q = dir.path().join("c.csv");
        write_field_profile(&q, &u, "solution").unwrap();
        assert_eq!(
            read_profile(&q).unwrap().0.columns,
            ["x1", "x2", "r", "value"]
        );
    }
}
