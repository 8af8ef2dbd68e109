//! Finite windows of Delone point patterns.
//!
//! A [`DeloneSet`] is a finite sample of a uniformly discrete, relatively
//! dense pattern together with its packing radius `r_pack` and covering
//! radius `r_cov`. Sites are identified by their index in the point list;
//! coordinates are never used as keys.
//!
//! A set may optionally carry a `period`, turning its window into a flat
//! torus. The torus closure is only used to measure bulk spectra without
//! boundary modes; every index computation works on the open window.

mod generators;
mod io;
mod neighbors;
mod validate;

pub use generators::{
    gen_cut_and_project, gen_hardcore_random, gen_hardcore_random_torus, gen_periodic,
    gen_perturbed_lattice, product_delone, CutProjectModel,
};
pub use io::{read_point_set, write_point_set, PointSetSidecar};
pub use neighbors::NeighborIndex;
pub use validate::{validate_delone, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tolerance used when deciding whether a distance lies on a closed ball.
pub(crate) const DIST_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Closed-ball membership shared by every neighbor query and its oracles.
pub(crate) fn within(d2: f64, radius: f64) -> bool {
    d2.sqrt() <= radius + DIST_EPS
}

/// Minimum-image displacement `b - a` on a torus with the given period.
pub(crate) fn min_image(a: &[f64], b: &[f64], period: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .zip(period)
        .map(|((x, y), p)| {
            let d = y - x;
            d - p * (d / p).round()
        })
        .collect()
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(invalid("window bounds must have equal, nonzero length"));
        }
        if lo.iter().chain(&hi).any(|c| !c.is_finite()) {
            return Err(invalid("window bounds must be finite"));
        }
        Ok(Window { lo, hi })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Window { lo: vec![lo; dim], hi: vec![hi; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| h < l)
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    /// Half of the smallest side length.
    pub fn radius(&self) -> f64 {
        (0..self.dim()).map(|a| 0.5 * self.extent(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (l, h))| *c >= l - DIST_EPS && *c <= h + DIST_EPS)
    }

    /// Distance from `x` to the nearest face of the box (negative outside).
    pub fn depth(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(c, (l, h))| (c - l).min(h - c))
            .fold(f64::INFINITY, f64::min)
    }

    /// Shrinks every face inward by `by`; `None` once the box is empty.
    pub fn eroded(&self, by: f64) -> Option<Window> {
        let lo: Vec<f64> = self.lo.iter().map(|l| l + by).collect();
        let hi: Vec<f64> = self.hi.iter().map(|h| h - by).collect();
        let w = Window { lo, hi };
        (!w.is_empty()).then_some(w)
    }

    pub fn translated(&self, v: &[f64]) -> Window {
        Window {
            lo: self.lo.iter().zip(v).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(v).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn product(&self, other: &Window) -> Window {
        Window {
            lo: self.lo.iter().chain(&other.lo).copied().collect(),
            hi: self.hi.iter().chain(&other.hi).copied().collect(),
        }
    }
}

/// Generator tag, parameters and seed of a point set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SetMeta {
    pub generator: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl SetMeta {
    pub fn new(generator: &str) -> Self {
        SetMeta { generator: generator.to_string(), ..Default::default() }
    }

    pub(crate) fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeloneSet {
    pub dim: usize,
    pub points: Vec<Point>,
    pub r_pack: f64,
    pub r_cov: f64,
    pub window: Window,
    pub meta: SetMeta,
    /// Torus periods per axis when the window closes up on itself.
    #[serde(default)]
    pub period: Option<Vec<f64>>,
}

impl DeloneSet {
    /// Assembles a set from explicit data, checking shapes and `0 < r_pack < r_cov`.
    /// The Delone constants themselves are checked by [`validate_delone`].
    pub fn new(points: Vec<Point>, r_pack: f64, r_cov: f64, window: Window, meta: SetMeta) -> Result<Self> {
        let dim = window.dim();
        if !(r_pack > 0.0 && r_cov > r_pack && r_cov.is_finite()) {
            return Err(invalid(format!("need 0 < r_pack < r_cov, got r_pack={r_pack}, r_cov={r_cov}")));
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim || !p.is_finite() {
                return Err(invalid(format!("point {i} has wrong dimension or non-finite coordinates")));
            }
            if !window.contains(p.coords()) {
                return Err(invalid(format!("point {i} lies outside the window")));
            }
        }
        Ok(DeloneSet { dim, points, r_pack, r_cov, window, meta, period: None })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points[i].coords()
    }

    /// Closes the window into a torus with the given periods.
    ///
    /// Every point must lie in `[lo, lo + period)` and minimum-image distances
    /// must still respect `2 r_pack`.
    pub fn with_period(mut self, period: Vec<f64>) -> Result<Self> {
        if period.len() != self.dim || period.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(invalid("period must be positive per axis"));
        }
        for (i, p) in self.points.iter().enumerate() {
            for (a, c) in p.coords().iter().enumerate() {
                if *c < self.window.lo[a] - DIST_EPS || *c >= self.window.lo[a] + period[a] - DIST_EPS {
                    return Err(invalid(format!("point {i} does not fit in one period along axis {a}")));
                }
            }
        }
        let min = 2.0 * self.r_pack;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d = norm(&min_image(self.point(i), self.point(j), &period));
                if d < min - DIST_EPS {
                    return Err(invalid(format!(
                        "sites {i} and {j} are {d:.6} apart across the seam, below 2 r_pack = {min:.6}"
                    )));
                }
            }
        }
        self.period = Some(period);
        Ok(self)
    }

    /// Forgets the torus closure.
    pub fn open(&self) -> DeloneSet {
        DeloneSet { period: None, ..self.clone() }
    }

    /// Displacement `x_j - x_i`, minimum-image when `periodic` and a period is set.
    pub fn displacement(&self, i: usize, j: usize, periodic: bool) -> Vec<f64> {
        match (&self.period, periodic) {
            (Some(p), true) => min_image(self.point(i), self.point(j), p),
            _ => self.point(j).iter().zip(self.point(i)).map(|(b, a)| b - a).collect(),
        }
    }

    /// Whole-set translation `x -> x + v` (window included). Indices are preserved.
    pub fn translated(&self, v: &[f64]) -> DeloneSet {
        let points = self.points.iter().map(|p| Point(p.0.iter().zip(v).map(|(a, b)| a + b).collect())).collect();
        DeloneSet { points, window: self.window.translated(v), ..self.clone() }
    }

    /// Indices of all points within the closed ball of `radius` around `x`,
    /// in ascending order.
    pub fn neighbors(&self, x: &[f64], radius: f64) -> Result<Vec<usize>> {
        if !(radius >= 0.0) {
            return Err(invalid(format!("neighbor radius must be non-negative, got {radius}")));
        }
        if x.len() != self.dim {
            return Err(invalid("query point has wrong dimension"));
        }
        Ok(NeighborIndex::new(self, radius.max(self.r_pack), false).query(x, radius))
    }

    /// Sites within `rho` of site `i`, translated so that site `i` sits at the origin.
    pub fn local_pattern(&self, i: usize, rho: f64) -> Result<LocalPattern> {
        if i >= self.len() {
            return Err(invalid(format!("site index {i} out of range ({} sites)", self.len())));
        }
        if !(rho > 0.0) {
            return Err(invalid("pattern radius must be positive"));
        }
        let index = NeighborIndex::new(self, rho, false);
        Ok(index.local_pattern(self, i, rho))
    }

    /// Indices of sites at least `margin` away from the window boundary.
    pub fn interior(&self, margin: f64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.window.depth(self.point(i)) >= margin - DIST_EPS).collect()
    }

    /// Site closest to `x` (ties broken by lower index).
    pub fn nearest_site(&self, x: &[f64]) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| {
            dist2(self.point(a), x).partial_cmp(&dist2(self.point(b), x)).unwrap_or(std::cmp::Ordering::Equal)
        })
    }
}

/// Finite pattern around a site, expressed relative to that site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPattern {
    pub dim: usize,
    pub radius: f64,
    pub points: Vec<Point>,
}

impl LocalPattern {
    /// Whether the displacement `a` is (up to rounding) one of the pattern's points.
    pub fn contains(&self, a: &[f64]) -> bool {
        self.points.iter().any(|p| dist2(p.coords(), a) <= DIST_EPS * DIST_EPS)
    }

    /// The same pattern seen from the point at displacement `a`: `ω̃ - a`.
    pub fn recentered(&self, a: &[f64]) -> LocalPattern {
        LocalPattern {
            dim: self.dim,
            radius: self.radius,
            points: self.points.iter().map(|p| Point(p.0.iter().zip(a).map(|(x, y)| x - y).collect())).collect(),
        }
    }

    /// Compares patterns as point sets up to `tol`.
    pub fn approx_eq(&self, other: &LocalPattern, tol: f64) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().all(|p| other.points.iter().any(|q| dist(p.coords(), q.coords()) <= tol))
    }
}
