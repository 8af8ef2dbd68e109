use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::validate::grid_centers;
use super::{norm, DeloneSet, NeighborIndex, Point, SetMeta, Window, DIST_EPS};
use crate::error::{invalid, Error, Result};

const GOLDEN: f64 = 1.618_033_988_749_895;

/// Consecutive rejections after which random sequential adsorption stops.
const RSA_STALL: usize = 2_000;

/// All integer combinations `Σ n_k b_k` of the lattice vectors `basis[k]`
/// that fall inside `window`.
///
/// Points are ordered lexicographically in `(n_0, n_1, ...)`. `r_pack` is half
/// the shortest nonzero lattice vector found in `[-3, 3]^d`; `r_cov` is the
/// covering radius (exact for orthogonal bases, a sampled upper bound otherwise).
pub fn gen_periodic(basis: &[Vec<f64>], window: &Window) -> Result<DeloneSet> {
    let d = window.dim();
    check_basis(basis, d)?;
    let inv = invert(basis).ok_or_else(|| invalid("lattice basis is singular"))?;

    let (r_pack, r_cov) = lattice_radii(basis);
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for corner in 0..(1usize << d) {
        let x: Vec<f64> =
            (0..d).map(|a| if corner >> a & 1 == 1 { window.hi[a] } else { window.lo[a] }).collect();
        let coeff = mat_vec(&inv, &x);
        for k in 0..d {
            lo[k] = lo[k].min(coeff[k].floor() as i64 - 1);
            hi[k] = hi[k].max(coeff[k].ceil() as i64 + 1);
        }
    }
    let mut points = Vec::new();
    if !window.is_empty() {
        let mut n = lo.clone();
        loop {
            let x: Vec<f64> = (0..d).map(|a| (0..d).map(|k| n[k] as f64 * basis[k][a]).sum()).collect();
            if window.contains(&x) {
                points.push(Point(x));
            }
            // odometer with the last coefficient varying fastest
            let mut k = d;
            loop {
                if k == 0 {
                    let meta = SetMeta::new("periodic").with("basis", basis);
                    return DeloneSet::new(points, r_pack, r_cov, window.clone(), meta);
                }
                k -= 1;
                n[k] += 1;
                if n[k] > hi[k] {
                    n[k] = lo[k];
                } else {
                    break;
                }
            }
        }
    }
    DeloneSet::new(points, r_pack, r_cov, window.clone(), SetMeta::new("periodic").with("basis", basis))
}

/// Lattice points each displaced by an independent uniform vector in the `max_disp`-ball.
///
/// The window grows by `max_disp` on every side so no site is lost.
/// `r_pack` shrinks and `r_cov` grows by `max_disp`.
pub fn gen_perturbed_lattice(basis: &[Vec<f64>], window: &Window, max_disp: f64, seed: u64) -> Result<DeloneSet> {
    let lattice = gen_periodic(basis, window)?;
    if !(max_disp >= 0.0) || max_disp >= lattice.r_pack / 2.0 {
        return Err(invalid(format!(
            "displacement {max_disp} must be below r_pack/2 = {} of the lattice",
            lattice.r_pack / 2.0
        )));
    }
    let d = window.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = lattice
        .points
        .iter()
        .map(|p| {
            if max_disp == 0.0 {
                return p.clone();
            }
            let shift = loop {
                let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                if norm(&v) <= 1.0 {
                    break v;
                }
            };
            Point(p.0.iter().zip(&shift).map(|(c, s)| c + max_disp * s).collect())
        })
        .collect();
    let grown = Window {
        lo: window.lo.iter().map(|l| l - max_disp).collect(),
        hi: window.hi.iter().map(|h| h + max_disp).collect(),
    };
    let meta = SetMeta { seed: Some(seed), ..SetMeta::new("perturbed_lattice") }
        .with("basis", basis)
        .with("max_disp", max_disp);
    DeloneSet::new(points, lattice.r_pack - max_disp, lattice.r_cov + max_disp, grown, meta)
}

/// Random hard-core pattern: sequential adsorption followed by fill passes.
///
/// The adsorption phase draws up to `max_attempts` uniform candidates and
/// stops early once candidates keep being rejected. The fill pass then drops a
/// point into every empty `target_r`-ball of the eroded window, which keeps
/// both Delone constants exact. Fill insertions share the attempt budget.
pub fn gen_hardcore_random(
    window: &Window,
    min_dist: f64,
    target_r: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<DeloneSet> {
    hardcore(window, min_dist, target_r, seed, max_attempts, false)
}

/// Like [`gen_hardcore_random`] but hard-core and covering constraints hold on
/// the torus obtained by identifying opposite faces of `window`.
pub fn gen_hardcore_random_torus(
    window: &Window,
    min_dist: f64,
    target_r: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<DeloneSet> {
    hardcore(window, min_dist, target_r, seed, max_attempts, true)
}

fn hardcore(
    window: &Window,
    min_dist: f64,
    target_r: f64,
    seed: u64,
    max_attempts: usize,
    periodic: bool,
) -> Result<DeloneSet> {
    if !(min_dist > 0.0) || !(target_r > min_dist) {
        return Err(invalid(format!("need 0 < min_dist < target_R, got {min_dist} and {target_r}")));
    }
    if window.is_empty() {
        return Err(invalid("window is empty"));
    }
    let d = window.dim();
    let period: Option<Vec<f64>> = periodic.then(|| (0..d).map(|a| window.extent(a)).collect());
    if let Some(p) = &period {
        if p.iter().any(|len| *len <= 2.0 * target_r) {
            return Err(invalid("torus side must exceed 2 target_R"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut index = NeighborIndex::empty(&window.lo, min_dist, period.clone());
    let mut budget = max_attempts;

    let is_free = |index: &NeighborIndex, x: &[f64]| match index.nearest_distance(x, min_dist) {
        Some(dd) => dd >= min_dist,
        None => true,
    };

    let mut stall = 0;
    while budget > 0 && stall < RSA_STALL {
        budget -= 1;
        let x: Vec<f64> = (0..d)
            .map(|a| {
                if window.extent(a) > 0.0 {
                    rng.random_range(window.lo[a]..window.hi[a])
                } else {
                    window.lo[a]
                }
            })
            .collect();
        if is_free(&index, &x) {
            index.push(x);
            stall = 0;
        } else {
            stall += 1;
        }
    }

    // Fill: every grid cell lies within step*sqrt(d)/2 of its center, so inserting
    // wherever the nearest point exceeds `threshold` bounds the true covering radius.
    let region = match &period {
        Some(p) => Some(Window { lo: window.lo.clone(), hi: window.lo.iter().zip(p).map(|(l, q)| l + q).collect() }),
        None => window.eroded(target_r),
    };
    if let Some(region) = region {
        let step = (min_dist / 4.0).min((target_r - min_dist) / (d as f64).sqrt());
        let spacing = (0..d)
            .map(|a| {
                let len = region.extent(a);
                len / ((len / step).ceil().max(1.0))
            })
            .fold(0.0_f64, f64::max);
        let threshold = target_r - spacing * (d as f64).sqrt() / 2.0;
        for mut c in grid_centers(&region, step) {
            if let Some(p) = &period {
                for a in 0..d {
                    if c[a] >= window.lo[a] + p[a] - DIST_EPS {
                        c[a] = window.lo[a];
                    }
                }
            }
            let nearest = index.nearest_distance(&c, 2.0 * target_r).unwrap_or(f64::INFINITY);
            if nearest > threshold {
                if budget == 0 {
                    return Err(Error::GenerationFailed(format!(
                        "attempt budget of {max_attempts} exhausted with {} points placed",
                        index.len()
                    )));
                }
                budget -= 1;
                index.push(c);
            }
        }
    }

    let points: Vec<Point> = (0..index.len()).map(|i| Point(index.coords_of(i).to_vec())).collect();
    let meta = SetMeta { seed: Some(seed), ..SetMeta::new(if periodic { "hardcore_torus" } else { "hardcore" }) }
        .with("min_dist", min_dist)
        .with("target_r", target_r)
        .with("max_attempts", max_attempts);
    let set = DeloneSet::new(points, min_dist / 2.0, target_r, window.clone(), meta)?;
    match period {
        Some(p) => set.with_period(p),
        None => Ok(set),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutProjectModel {
    #[serde(rename = "fibonacci_1d")]
    Fibonacci1d,
    #[serde(rename = "ammann_beenker_2d")]
    AmmannBeenker2d,
}

impl std::str::FromStr for CutProjectModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fibonacci_1d" => Ok(CutProjectModel::Fibonacci1d),
            "ammann_beenker_2d" => Ok(CutProjectModel::AmmannBeenker2d),
            other => Err(invalid(format!("unsupported cut-and-project model `{other}`"))),
        }
    }
}

/// Cut-and-project quasicrystals.
///
/// `Fibonacci1d` projects `ℤ²` along the slope `1/τ` onto the line; its gaps
/// are `1` and `τ`. `AmmannBeenker2d` projects `ℤ⁴` with the eightfold star
/// and an octagonal acceptance window.
pub fn gen_cut_and_project(model: CutProjectModel, window: &Window) -> Result<DeloneSet> {
    match model {
        CutProjectModel::Fibonacci1d => {
            if window.dim() != 1 {
                return Err(invalid("fibonacci_1d needs a one-dimensional window"));
            }
            let points = fibonacci_points(window.lo[0], window.hi[0]).into_iter().map(|x| Point(vec![x])).collect();
            DeloneSet::new(points, 0.5, GOLDEN / 2.0 + 1e-9, window.clone(), SetMeta::new("fibonacci_1d"))
        }
        CutProjectModel::AmmannBeenker2d => {
            if window.dim() != 2 {
                return Err(invalid("ammann_beenker_2d needs a two-dimensional window"));
            }
            let points = ammann_beenker_points(window).into_iter().map(Point).collect();
            let r_pack = (std::f64::consts::PI / 8.0).sin() - 1e-9;
            let r_cov = std::f64::consts::FRAC_1_SQRT_2 + 1e-9;
            DeloneSet::new(points, r_pack, r_cov, window.clone(), SetMeta::new("ammann_beenker_2d"))
        }
    }
}

/// Points `mτ + n` whose internal coordinate `nτ - m` lies in `[-1, τ)`.
fn fibonacci_points(lo: f64, hi: f64) -> Vec<f64> {
    if hi < lo {
        return Vec::new();
    }
    let s = 1.0 + GOLDEN * GOLDEN;
    let m_lo = ((GOLDEN * lo - GOLDEN) / s).floor() as i64 - 2;
    let m_hi = ((GOLDEN * hi + 1.0) / s).ceil() as i64 + 2;
    let n_lo = ((lo - GOLDEN) / s).floor() as i64 - 2;
    let n_hi = ((hi + GOLDEN * GOLDEN) / s).ceil() as i64 + 2;
    let mut out = Vec::new();
    for m in m_lo..=m_hi {
        for n in n_lo..=n_hi {
            let internal = n as f64 * GOLDEN - m as f64;
            let x = m as f64 * GOLDEN + n as f64;
            if (-1.0..GOLDEN).contains(&internal) && x >= lo - DIST_EPS && x <= hi + DIST_EPS {
                out.push(x);
            }
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

fn ammann_beenker_points(window: &Window) -> Vec<Vec<f64>> {
    use std::f64::consts::FRAC_PI_4;
    let star: Vec<[f64; 2]> = (0..4).map(|k| [(k as f64 * FRAC_PI_4).cos(), (k as f64 * FRAC_PI_4).sin()]).collect();
    let perp: Vec<[f64; 2]> =
        (0..4).map(|k| [(3.0 * k as f64 * FRAC_PI_4).cos(), (3.0 * k as f64 * FRAC_PI_4).sin()]).collect();
    // octagon = projection of the unit 4-cube, recentred and nudged off the lattice
    let mut verts = Vec::new();
    for eps in 0..16u32 {
        let mut v = [0.0; 2];
        for k in 0..4 {
            if eps >> k & 1 == 1 {
                v[0] += perp[k][0];
                v[1] += perp[k][1];
            }
        }
        verts.push(v);
    }
    let center = [verts.iter().map(|v| v[0]).sum::<f64>() / 16.0, verts.iter().map(|v| v[1]).sum::<f64>() / 16.0];
    let nudge = [1.234e-3 * 3f64.sqrt(), -2.345e-3 * 2f64.sqrt()];
    let normals: Vec<[f64; 2]> = (0..8).map(|m| [(m as f64 * FRAC_PI_4).cos(), (m as f64 * FRAC_PI_4).sin()]).collect();
    let support: Vec<f64> =
        normals.iter().map(|n| verts.iter().map(|v| n[0] * v[0] + n[1] * v[1]).fold(f64::MIN, f64::max)).collect();
    let inside = |p: [f64; 2]| {
        let q = [p[0] + center[0] - nudge[0], p[1] + center[1] - nudge[1]];
        normals.iter().zip(&support).all(|(n, h)| n[0] * q[0] + n[1] * q[1] < *h)
    };

    let reach = window
        .lo
        .iter()
        .zip(&window.hi)
        .map(|(l, h)| l.abs().max(h.abs()))
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt();
    let bound = (0.5 * (reach + 2.0) + 2.0).ceil() as i64;
    let mut out = Vec::new();
    for n0 in -bound..=bound {
        for n1 in -bound..=bound {
            for n2 in -bound..=bound {
                for n3 in -bound..=bound {
                    let n = [n0 as f64, n1 as f64, n2 as f64, n3 as f64];
                    let x = [
                        (0..4).map(|k| n[k] * star[k][0]).sum::<f64>(),
                        (0..4).map(|k| n[k] * star[k][1]).sum::<f64>(),
                    ];
                    if !window.contains(&x) {
                        continue;
                    }
                    let p = [
                        (0..4).map(|k| n[k] * perp[k][0]).sum::<f64>(),
                        (0..4).map(|k| n[k] * perp[k][1]).sum::<f64>(),
                    ];
                    if inside(p) {
                        out.push(x.to_vec());
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    out
}

/// The product pattern `Λ × L ⊂ ℝ^{m+n}` with `r = min(r_Λ, r_L)` and `R = sqrt(R_Λ² + R_L²)`.
///
/// Site `(i, a)` has index `i * |L| + a`.
pub fn product_delone(first: &DeloneSet, second: &DeloneSet) -> Result<DeloneSet> {
    let mut points = Vec::with_capacity(first.len() * second.len());
    for x in &first.points {
        for a in &second.points {
            points.push(Point(x.0.iter().chain(&a.0).copied().collect()));
        }
    }
    let meta = SetMeta::new("product")
        .with("first", &first.meta)
        .with("second", &second.meta);
    let set = DeloneSet::new(
        points,
        first.r_pack.min(second.r_pack),
        (first.r_cov * first.r_cov + second.r_cov * second.r_cov).sqrt(),
        first.window.product(&second.window),
        meta,
    )?;
    match (&first.period, &second.period) {
        (Some(p), Some(q)) => set.with_period(p.iter().chain(q).copied().collect()),
        _ => Ok(set),
    }
}

fn check_basis(basis: &[Vec<f64>], d: usize) -> Result<()> {
    if basis.len() != d || basis.iter().any(|b| b.len() != d) {
        return Err(invalid(format!("basis must consist of {d} vectors of length {d}")));
    }
    if basis.iter().flatten().any(|c| !c.is_finite()) {
        return Err(invalid("basis entries must be finite"));
    }
    Ok(())
}

/// Inverse of the matrix whose columns are `basis[k]`.
fn invert(basis: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = basis.len();
    // a[row][col] = basis[col][row], augmented with identity
    let mut a: Vec<Vec<f64>> = (0..d)
        .map(|r| (0..2 * d).map(|c| if c < d { basis[c][r] } else if c - d == r { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = basis.iter().flatten().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..d {
        let piv = (col..d).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col];
        for c in 0..2 * d {
            a[col][c] /= p;
        }
        for r in 0..d {
            if r != col {
                let f = a[r][col];
                for c in 0..2 * d {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[d..].to_vec()).collect())
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Packing and covering radius of the infinite lattice.
fn lattice_radii(basis: &[Vec<f64>]) -> (f64, f64) {
    let d = basis.len();
    let combos = |range: i64| -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut n = vec![-range; d];
        loop {
            out.push((0..d).map(|a| (0..d).map(|k| n[k] as f64 * basis[k][a]).sum()).collect());
            let mut k = 0;
            loop {
                if k == d {
                    return out;
                }
                n[k] += 1;
                if n[k] > range {
                    n[k] = -range;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    };
    let shortest = combos(3).iter().map(|v| norm(v)).filter(|l| *l > 1e-12).fold(f64::INFINITY, f64::min);
    let r_pack = shortest / 2.0;

    let orthogonal = (0..d).all(|i| {
        (i + 1..d).all(|j| basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum::<f64>().abs() <= 1e-12)
    });
    let cover = if orthogonal {
        0.5 * basis.iter().map(|b| norm(b).powi(2)).sum::<f64>().sqrt()
    } else {
        let m = if d <= 3 { 16 } else { 6 };
        let nearby = combos(2);
        let mut worst: f64 = 0.0;
        let mut t = vec![0usize; d];
        loop {
            let x: Vec<f64> =
                (0..d).map(|a| (0..d).map(|k| t[k] as f64 / m as f64 * basis[k][a]).sum()).collect();
            let near = nearby.iter().map(|v| super::dist(v, &x)).fold(f64::INFINITY, f64::min);
            worst = worst.max(near);
            let mut k = 0;
            loop {
                if k == d {
                    let cell = 0.5 * basis.iter().map(|b| (norm(b) / m as f64).powi(2)).sum::<f64>().sqrt();
                    return (r_pack, (worst + cell).max(r_pack * (1.0 + 1e-9)));
                }
                t[k] += 1;
                if t[k] > m {
                    t[k] = 0;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    };
    // open balls: the covering radius must strictly exceed the deepest hole
    (r_pack, cover * (1.0 + 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate::min_pair_distance;
    use crate::geometry::validate_delone;

    fn id2() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![0.0, 1.0]]
    }

    #[test]
    fn square_window_counts() {
        assert_eq!(gen_periodic(&id2(), &Window::cube(2, 0.0, 4.0)).unwrap().len(), 25);
        let rect = gen_periodic(&[vec![1.0, 0.0], vec![0.0, 2.0]], &Window::cube(2, 0.0, 4.0)).unwrap();
        assert_eq!(rect.len(), 15);
    }

    #[test]
    fn singular_basis_rejected() {
        let err = gen_periodic(&[vec![1.0, 0.0], vec![0.0, 0.0]], &Window::cube(2, 0.0, 4.0));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn lattice_constants() {
        let set = gen_periodic(&id2(), &Window::cube(2, 0.0, 4.0)).unwrap();
        assert!((set.r_pack - 0.5).abs() < 1e-12);
        assert!((set.r_cov - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        let hex = vec![vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        let tri = gen_periodic(&hex, &Window::cube(2, 0.0, 8.0)).unwrap();
        // deep hole of the triangular lattice sits at the circumcenter, 1/sqrt(3)
        assert!(tri.r_cov >= 1.0 / 3f64.sqrt() - 1e-12 && tri.r_cov < 1.0 / 3f64.sqrt() + 0.06);
        assert!(validate_delone(&tri, 0.1).unwrap().pass);
    }

    #[test]
    fn perturbed_lattice() {
        let w = Window::cube(2, 0.0, 10.0);
        let plain = gen_periodic(&id2(), &w).unwrap();
        let same = gen_perturbed_lattice(&id2(), &w, 0.0, 9).unwrap();
        assert_eq!(plain.points, same.points);
        assert_eq!((plain.r_pack, plain.r_cov), (same.r_pack, same.r_cov));

        let shaken = gen_perturbed_lattice(&id2(), &w, 0.2, 9).unwrap();
        assert!((shaken.r_pack - 0.3).abs() < 1e-12);
        assert!((shaken.r_cov - 0.9071).abs() < 1e-3);
        assert!(validate_delone(&shaken, 0.1).unwrap().pass);
        assert!(min_pair_distance(&shaken) >= 0.6);

        assert!(gen_perturbed_lattice(&id2(), &w, 0.6, 9).is_err());
    }

    #[test]
    fn hardcore_passes_validation() {
        let set = gen_hardcore_random(&Window::cube(2, 0.0, 30.0), 0.8, 1.6, 7, 200_000).unwrap();
        let rep = validate_delone(&set, 0.2).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(min_pair_distance(&set) >= 0.8);
        assert!(set.len() > 500 && set.len() < 1100, "{} points", set.len());
    }

    #[test]
    fn hardcore_edge_cases() {
        let tiny = gen_hardcore_random(&Window::cube(2, 0.0, 0.5), 0.8, 1.6, 1, 1000).unwrap();
        assert_eq!(tiny.len(), 1);
        assert!(validate_delone(&tiny, 0.2).unwrap().pass);
        assert!(matches!(
            gen_hardcore_random(&Window::cube(2, 0.0, 5.0), 1.0, 1.0, 1, 10),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            gen_hardcore_random(&Window::cube(2, 0.0, 20.0), 0.8, 1.6, 1, 5),
            Err(Error::GenerationFailed(_))
        ));
    }

    #[test]
    fn hardcore_close_radii_stay_hardcore() {
        let set = gen_hardcore_random(&Window::cube(2, 0.0, 10.0), 1.0, 1.05, 4, 100_000).unwrap();
        assert!(min_pair_distance(&set) >= 1.0 - 1e-12);
        assert!(validate_delone(&set, 0.05).unwrap().pass);
    }

    #[test]
    fn product_of_lattices() {
        let a = gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 4.0)).unwrap();
        let b = gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 2.0)).unwrap();
        let p = product_delone(&a, &b).unwrap();
        assert_eq!(p.len(), 15);
        assert_eq!(p.point(3 * 1 + 2), &[1.0, 2.0]);
        assert!(validate_delone(&p, 0.1).unwrap().pass);
    }

    #[test]
    fn cut_project_model_tags() {
        assert!("penrose".parse::<CutProjectModel>().is_err());
        let empty = gen_cut_and_project(CutProjectModel::Fibonacci1d, &Window::new(vec![1.0], vec![0.0]).unwrap());
        let empty = empty.unwrap();
        assert!(empty.is_empty());
        assert!(validate_delone(&empty, 0.1).is_err());
    }

    #[test]
    fn ammann_beenker_is_delone() {
        let set = gen_cut_and_project(CutProjectModel::AmmannBeenker2d, &Window::cube(2, -8.0, 8.0)).unwrap();
        let rep = validate_delone(&set, 0.15).unwrap();
        assert!(rep.pass, "{rep:?}");
        // octagon area 2(1+√2) over the covolume 4 of the lifted lattice
        let density = set.len() as f64 / 256.0;
        assert!((density - (1.0 + 2f64.sqrt()) / 2.0).abs() < 0.06, "density {density}");
    }
}
