use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DeloneSet, Point, SetMeta, Window};
use crate::error::{invalid, Result};

/// JSON metadata written next to a point CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetSidecar {
    pub dim: usize,
    pub r_pack: f64,
    #[serde(rename = "R_cov")]
    pub r_cov: f64,
    pub window: Window,
    pub metadata: SetMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<f64>>,
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `set` as `path` (header `x0,...,x{d-1}`, one site per row) plus a
/// JSON sidecar with the same stem.
///
/// Coordinates use the shortest round-trip representation, so reading the
/// files back reproduces the set bit for bit.
pub fn write_point_set(set: &DeloneSet, path: &Path) -> Result<()> {
    let mut csv = (0..set.dim).map(|a| format!("x{a}")).collect::<Vec<_>>().join(",");
    csv.push('\n');
    for p in &set.points {
        let row: Vec<String> = p.coords().iter().map(|c| format!("{c:?}")).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    fs::write(path, csv)?;
    let sidecar = PointSetSidecar {
        dim: set.dim,
        r_pack: set.r_pack,
        r_cov: set.r_cov,
        window: set.window.clone(),
        metadata: set.meta.clone(),
        period: set.period.clone(),
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

pub fn read_point_set(path: &Path) -> Result<DeloneSet> {
    let sidecar: PointSetSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| invalid("point file is empty"))?;
    let expected: Vec<String> = (0..sidecar.dim).map(|a| format!("x{a}")).collect();
    if header.split(',').map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(invalid(format!("header `{header}` does not match dimension {}", sidecar.dim)));
    }
    let mut points = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let coords = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| invalid(format!("row {}: {e}", row + 2)))?;
        if coords.len() != sidecar.dim {
            return Err(invalid(format!("row {} has {} coordinates, expected {}", row + 2, coords.len(), sidecar.dim)));
        }
        points.push(Point(coords));
    }
    let set = DeloneSet::new(points, sidecar.r_pack, sidecar.r_cov, sidecar.window, sidecar.metadata)?;
    match sidecar.period {
        Some(p) => set.with_period(p),
        None => Ok(set),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gen_hardcore_random;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let set = gen_hardcore_random(&Window::cube(2, 0.0, 6.0), 0.7, 1.4, 2, 50_000).unwrap();
        let path = dir.path().join("pts.csv");
        write_point_set(&set, &path).unwrap();
        assert_eq!(read_point_set(&path).unwrap(), set);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let set = gen_hardcore_random(&Window::cube(2, 0.0, 4.0), 0.7, 1.4, 2, 50_000).unwrap();
        let path = dir.path().join("pts.csv");
        write_point_set(&set, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap().replacen("x0,x1", "x0", 1);
        fs::write(&path, text).unwrap();
        assert!(read_point_set(&path).is_err());
    }
}
