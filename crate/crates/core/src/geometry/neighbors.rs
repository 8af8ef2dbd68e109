use std::collections::HashMap;

use super::{min_image, within, DeloneSet, LocalPattern, Point};

/// Uniform bucket grid for fixed-radius queries.
///
/// Cells are at least as large as the radius the index was built for, so a
/// query only visits the `3^d` surrounding cells in the common case. Larger
/// radii still work; they just visit more cells.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    coords: Vec<Vec<f64>>,
    origin: Vec<f64>,
    cell: Vec<f64>,
    /// Cells per axis on a torus.
    wrap: Option<Vec<i64>>,
    period: Option<Vec<f64>>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl NeighborIndex {
    /// Builds an index over `set`; `periodic` uses the set's torus metric if it has one.
    pub fn new(set: &DeloneSet, cell: f64, periodic: bool) -> Self {
        let period = if periodic { set.period.clone() } else { None };
        let mut index = NeighborIndex::empty(&set.window.lo, cell, period);
        for (i, p) in set.points.iter().enumerate() {
            index.insert_at(i, p.coords().to_vec());
        }
        index
    }

    pub(crate) fn empty(origin: &[f64], cell: f64, period: Option<Vec<f64>>) -> Self {
        let cell = if cell.is_finite() && cell > 0.0 { cell } else { 1.0 };
        let dim = origin.len();
        let (cell, wrap) = match &period {
            Some(p) => {
                let counts: Vec<i64> = p.iter().map(|len| ((len / cell).floor() as i64).max(1)).collect();
                let sizes = p.iter().zip(&counts).map(|(len, n)| len / *n as f64).collect();
                (sizes, Some(counts))
            }
            None => (vec![cell; dim], None),
        };
        NeighborIndex { coords: Vec::new(), origin: origin.to_vec(), cell, wrap, period, buckets: HashMap::new() }
    }

    fn key(&self, x: &[f64]) -> Vec<i64> {
        let mut k: Vec<i64> =
            x.iter().zip(&self.origin).zip(&self.cell).map(|((c, o), s)| ((c - o) / s).floor() as i64).collect();
        if let Some(n) = &self.wrap {
            for (ki, ni) in k.iter_mut().zip(n) {
                *ki = ki.rem_euclid(*ni);
            }
        }
        k
    }

    /// Appends a point; its index is the current length.
    pub(crate) fn push(&mut self, x: Vec<f64>) -> usize {
        let i = self.coords.len();
        self.insert_at(i, x);
        i
    }

    fn insert_at(&mut self, i: usize, x: Vec<f64>) {
        debug_assert_eq!(i, self.coords.len());
        let k = self.key(&x);
        self.buckets.entry(k).or_default().push(i);
        self.coords.push(x);
    }

    pub(crate) fn coords_of(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn displacement(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        match &self.period {
            Some(p) => min_image(x, y, p),
            None => y.iter().zip(x).map(|(a, b)| a - b).collect(),
        }
    }

    fn candidates(&self, x: &[f64], radius: f64) -> Vec<usize> {
        let dim = x.len();
        let base = self.key(x);
        let reach: Vec<i64> = self.cell.iter().map(|s| (radius / s).ceil() as i64 + 1).collect();
        let mut out = Vec::new();
        let mut offset: Vec<i64> = reach.iter().map(|r| -r).collect();
        let mut seen_keys = std::collections::HashSet::new();
        loop {
            let mut key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(n) = &self.wrap {
                for (ki, ni) in key.iter_mut().zip(n) {
                    *ki = ki.rem_euclid(*ni);
                }
            }
            if seen_keys.insert(key.clone()) {
                if let Some(b) = self.buckets.get(&key) {
                    out.extend_from_slice(b);
                }
            }
            // odometer increment over the offset box
            let mut axis = 0;
            loop {
                if axis == dim {
                    out.sort_unstable();
                    out.dedup();
                    return out;
                }
                offset[axis] += 1;
                if offset[axis] > reach[axis] {
                    offset[axis] = -reach[axis];
                    axis += 1;
                } else {
                    break;
                }
            }
        }
    }

    /// Ascending indices of points within the closed `radius`-ball around `x`.
    pub fn query(&self, x: &[f64], radius: f64) -> Vec<usize> {
        if self.coords.is_empty() {
            return Vec::new();
        }
        self.candidates(x, radius)
            .into_iter()
            .filter(|&j| within(dist2_vec(&self.displacement(x, &self.coords[j])), radius))
            .collect()
    }

    /// Distance from `x` to the nearest indexed point, searching out to `max_radius`.
    pub fn nearest_distance(&self, x: &[f64], max_radius: f64) -> Option<f64> {
        let mut r = self.cell.iter().copied().fold(f64::INFINITY, f64::min);
        loop {
            let best = self
                .candidates(x, r)
                .into_iter()
                .map(|j| dist2_vec(&self.displacement(x, &self.coords[j])).sqrt())
                .fold(f64::INFINITY, f64::min);
            if best <= r {
                return Some(best);
            }
            if r >= max_radius {
                return None;
            }
            r = (2.0 * r).min(max_radius);
        }
    }

    /// Pattern of radius `rho` around indexed point `i`, origin included.
    pub fn local_pattern(&self, set: &DeloneSet, i: usize, rho: f64) -> LocalPattern {
        let x = &self.coords[i];
        let points = self
            .query(x, rho)
            .into_iter()
            .map(|j| if j == i { Point::origin(set.dim) } else { Point(self.displacement(x, &self.coords[j])) })
            .collect();
        LocalPattern { dim: set.dim, radius: rho, points }
    }
}

fn dist2_vec(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum()
}

/// O(n) reference scan used by tests and validators.
#[cfg(test)]
pub(crate) fn brute_force_neighbors(set: &DeloneSet, x: &[f64], radius: f64) -> Vec<usize> {
    (0..set.len()).filter(|&j| within(super::dist2(x, set.point(j)), radius)).collect()
}
