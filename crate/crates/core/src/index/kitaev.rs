use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{min_image, norm, DeloneSet};
use crate::linalg::matmul;

/// Three disjoint angular sectors of a disk, listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sectors {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

/// Sites within `radius` of `x0`, split by polar angle into `[0, 2π/3)`,
/// `[2π/3, 4π/3)` and `[4π/3, 2π)`. Distances are minimum-image when
/// `periodic` is set and the set has a period.
pub fn angular_sectors(set: &DeloneSet, x0: &[f64], radius: f64, periodic: bool) -> Result<Sectors> {
    if set.dim != 2 || x0.len() != 2 {
        return Err(invalid("angular sectors need a planar point set"));
    }
    if !(radius > 0.0) {
        return Err(invalid("sector radius must be positive"));
    }
    let mut s = Sectors { a: Vec::new(), b: Vec::new(), c: Vec::new() };
    for i in 0..set.len() {
        let d = match (&set.period, periodic) {
            (Some(p), true) => min_image(x0, set.point(i), p),
            _ => vec![set.point(i)[0] - x0[0], set.point(i)[1] - x0[1]],
        };
        if norm(&d) > radius {
            continue;
        }
        let theta = d[1].atan2(d[0]).rem_euclid(2.0 * PI);
        match (3.0 * theta / (2.0 * PI)) as usize {
            0 => s.a.push(i),
            1 => s.b.push(i),
            _ => s.c.push(i),
        }
    }
    Ok(s)
}

/// `C = 12πi Σ_{j∈A, k∈B, l∈C} (P_jk P_kl P_lj - P_jl P_lk P_kj)` with orbital
/// indices summed inside each site block.
///
/// Each triple trace is evaluated starting from whichever set holds the
/// lowest site index, so relabeling the sectors permutes the two terms
/// without changing their floating-point values.
pub fn kitaev_chern(p: &Mat<c64>, block_dim: usize, sectors: &Sectors) -> f64 {
    let rows = |sites: &[usize]| -> Vec<usize> {
        sites.iter().flat_map(|&i| (i * block_dim)..((i + 1) * block_dim)).collect()
    };
    let (a, b, c) = (rows(&sectors.a), rows(&sectors.b), rows(&sectors.c));
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return 0.0;
    }
    let forward = cyclic_trace(p, [&a, &b, &c]);
    let backward = cyclic_trace(p, [&a, &c, &b]);
    let diff = forward - backward;
    // 12πi · diff is real up to rounding
    -12.0 * PI * diff.im
}

fn cyclic_trace(p: &Mat<c64>, sets: [&Vec<usize>; 3]) -> c64 {
    let start = (0..3).min_by_key(|&k| sets[k][0]).unwrap_or(0);
    let (x, y, z) = (sets[start], sets[(start + 1) % 3], sets[(start + 2) % 3]);
    let sub = |r: &[usize], c: &[usize]| Mat::<c64>::from_fn(r.len(), c.len(), |i, j| p[(r[i], c[j])]);
    let xy = sub(x, y);
    let yz = sub(y, z);
    let zx = sub(z, x);
    let prod = matmul(&matmul(&xy, &yz), &zx);
    (0..prod.nrows()).map(|i| prod[(i, i)]).sum()
}
