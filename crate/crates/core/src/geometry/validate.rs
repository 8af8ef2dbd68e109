use serde::{Deserialize, Serialize};

use super::{dist2, DeloneSet, NeighborIndex, Window, DIST_EPS};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Half the minimum pairwise distance (`+inf` for a single point).
    pub min_pair_half: f64,
    /// Largest nearest-point distance over the center grid (0 when the eroded window is empty).
    pub max_cover_radius_estimate: f64,
    pub grid_step: f64,
    pub centers_checked: usize,
    pub pass: bool,
}

/// Checks both Delone constants of `set` on its finite window.
///
/// Uniform discreteness is checked over all pairs. Relative density is
/// estimated by scanning a grid of centers over the window eroded by
/// `r_cov`, so boundary sites never count against the set.
pub fn validate_delone(set: &DeloneSet, grid_step: f64) -> Result<ValidationReport> {
    if set.is_empty() {
        return Err(invalid("cannot validate an empty point set"));
    }
    if !(grid_step > 0.0) || grid_step > set.r_pack / 2.0 + DIST_EPS {
        return Err(invalid(format!("grid step {grid_step} must lie in (0, r_pack/2 = {}]", set.r_pack / 2.0)));
    }
    let min_pair_half = min_pair_distance(set) / 2.0;

    let index = NeighborIndex::new(set, set.r_cov, false);
    let diag = set.window.lo.iter().zip(&set.window.hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt();
    let mut max_cover: f64 = 0.0;
    let mut centers = 0;
    if let Some(eroded) = set.window.eroded(set.r_cov) {
        for c in grid_centers(&eroded, grid_step) {
            centers += 1;
            let d = index.nearest_distance(&c, diag.max(set.r_cov)).unwrap_or(f64::INFINITY);
            max_cover = max_cover.max(d);
        }
    }
    let pass = min_pair_half >= set.r_pack - DIST_EPS && max_cover <= set.r_cov + DIST_EPS;
    Ok(ValidationReport {
        min_pair_half,
        max_cover_radius_estimate: max_cover,
        grid_step,
        centers_checked: centers,
        pass,
    })
}

pub(crate) fn min_pair_distance(set: &DeloneSet) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            best = best.min(dist2(set.point(i), set.point(j)));
        }
    }
    best.sqrt()
}

/// Grid with spacing at most `step` that includes both endpoints of every axis.
pub(crate) fn grid_centers(window: &Window, step: f64) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = (0..window.dim())
        .map(|a| {
            let len = window.extent(a);
            let n = ((len / step).ceil() as usize).max(1);
            (0..=n).map(|k| window.lo[a] + len * k as f64 / n as f64).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(*c);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_periodic, Point, SetMeta};

    fn z2_with(r: f64, big_r: f64, drop: Option<[f64; 2]>) -> DeloneSet {
        let base = gen_periodic(&[vec![1.0, 0.0], vec![0.0, 1.0]], &Window::cube(2, 0.0, 10.0)).unwrap();
        let points: Vec<Point> =
            base.points.into_iter().filter(|p| drop.map_or(true, |d| p.coords() != d.as_slice())).collect();
        DeloneSet::new(points, r, big_r, Window::cube(2, 0.0, 10.0), SetMeta::new("test")).unwrap()
    }

    #[test]
    fn square_lattice_passes() {
        let rep = validate_delone(&z2_with(0.5, 0.75, None), 0.01).unwrap();
        assert!(rep.pass);
        assert!((rep.min_pair_half - 0.5).abs() < 1e-12);
        assert!((rep.max_cover_radius_estimate - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn hole_fails_covering() {
        let rep = validate_delone(&z2_with(0.5, 0.75, Some([5.0, 5.0])), 0.01).unwrap();
        assert!(!rep.pass);
        assert!((rep.max_cover_radius_estimate - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_set_rejected() {
        let set = DeloneSet::new(vec![], 0.5, 0.75, Window::cube(2, 0.0, 1.0), SetMeta::new("empty")).unwrap();
        assert!(matches!(validate_delone(&set, 0.1), Err(crate::Error::InvalidInput(_))));
    }

    #[test]
    fn coarse_grid_step_rejected() {
        assert!(validate_delone(&z2_with(0.5, 0.75, None), 0.3).is_err());
    }
}
