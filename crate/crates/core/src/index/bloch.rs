use std::f64::consts::PI;
use std::sync::Arc;

use faer::{c64, Mat};

use crate::error::{invalid, Error, Result};
use crate::geometry::{gen_periodic, Window};
use crate::groupoid::HoppingFunction;
use crate::linalg::{Block, ZERO};
use crate::spectral::eig_hermitian;

/// `h(k) = Σ_a T(a) e^{i k·a}` for a kernel placed on the unit lattice `ℤ^d`.
#[derive(Clone, Debug)]
pub struct BlochFamily {
    pub dim: usize,
    pub block_dim: usize,
    pub terms: Vec<(Vec<f64>, Block)>,
}

impl BlochFamily {
    pub fn from_kernel(f: &HoppingFunction) -> Result<Self> {
        let reach = f.pattern_radius.max(f.range).ceil() + 1.0;
        let lattice = gen_periodic(&unit_basis(f.dim), &Window::cube(f.dim, -reach, reach))?;
        let origin = lattice.nearest_site(&vec![0.0; f.dim]).ok_or_else(|| invalid("empty lattice"))?;
        let lattice = Arc::new(lattice);
        let pattern = lattice.local_pattern(origin, f.pattern_radius)?;
        let terms = pattern
            .points
            .iter()
            .map(|a| (a.0.clone(), f.eval(&pattern, &a.0)))
            .filter(|(_, b)| !b.is_zero())
            .collect();
        Ok(BlochFamily { dim: f.dim, block_dim: f.block_dim, terms })
    }

    pub fn at(&self, k: &[f64]) -> Mat<c64> {
        let n = self.block_dim;
        let mut h = Mat::<c64>::zeros(n, n);
        for (a, b) in &self.terms {
            let phase = c64::cis(a.iter().zip(k).map(|(x, y)| x * y).sum());
            for r in 0..n {
                for c in 0..n {
                    h[(r, c)] += b.get(r, c) * phase;
                }
            }
        }
        h
    }
}

fn unit_basis(d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|k| (0..d).map(|a| if a == k { 1.0 } else { 0.0 }).collect()).collect()
}

/// Minimum distance of any grid eigenvalue to `μ` below which the grid counts as gapless.
const GRID_GAP_TOL: f64 = 1e-9;

/// Lattice field-strength Chern number of the bands below `μ` on an `n × n`
/// grid of the Brillouin zone `[0, 2π)²`.
///
/// Links are `U(k, k') = det(V(k)† V(k'))/|det|` for the occupied frame
/// `V(k)`; each plaquette contributes `arg(U₁(k) U₂(k+x̂) conj(U₁(k+ŷ)) conj(U₂(k)))`.
pub fn bloch_chern_fhs(h: impl Fn(&[f64]) -> Mat<c64>, mu: f64, n: usize) -> Result<i64> {
    let raw = fhs_raw(h, mu, n)?;
    let c = raw.round();
    if (raw - c).abs() > 1e-6 {
        return Err(Error::Numerical(format!("field-strength sum {raw} is not an integer")));
    }
    Ok(c as i64)
}

fn fhs_raw(h: impl Fn(&[f64]) -> Mat<c64>, mu: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("FHS grid needs n >= 2"));
    }
    let mut frames: Vec<Mat<c64>> = Vec::with_capacity(n * n);
    let mut occupied = None;
    for i in 0..n {
        for j in 0..n {
            let k = [2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64];
            let spec = eig_hermitian(&h(&k))?;
            if let Some(e) = spec.eigenvalues.iter().find(|e| (*e - mu).abs() <= GRID_GAP_TOL) {
                return Err(Error::GapUndefined { mu, nearest: *e, width: 0.0 });
            }
            let occ = spec.eigenvalues.iter().filter(|e| **e < mu).count();
            if *occupied.get_or_insert(occ) != occ {
                return Err(Error::GapUndefined { mu, nearest: mu, width: 0.0 });
            }
            frames.push(spec.eigenvectors.subcols(0, occ).to_owned());
        }
    }
    let at = |i: usize, j: usize| &frames[(i % n) * n + (j % n)];
    let link = |a: &Mat<c64>, b: &Mat<c64>| {
        let overlap = crate::linalg::matmul(&a.adjoint().to_owned(), b);
        let d = det(&overlap);
        if d.norm() == 0.0 {
            c64::new(1.0, 0.0)
        } else {
            d / d.norm()
        }
    };
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let u1 = link(at(i, j), at(i + 1, j));
            let u2 = link(at(i + 1, j), at(i + 1, j + 1));
            let u3 = link(at(i, j + 1), at(i + 1, j + 1));
            let u4 = link(at(i, j), at(i, j + 1));
            total += (u1 * u2 * u3.conj() * u4.conj()).arg();
        }
    }
    Ok(total / (2.0 * PI))
}

/// Winding number `(1/2π) ∮ d arg det A(k)` of the off-diagonal block
/// `A = P₊ h(k) P₋` of a chiral Bloch family, on an `n`-point grid.
pub fn bloch_winding(h: impl Fn(&[f64]) -> Mat<c64>, grading: &Block, n: usize) -> Result<i64> {
    if n < 3 {
        return Err(invalid("winding grid needs n >= 3"));
    }
    let plus: Vec<usize> = (0..grading.dim()).filter(|&r| grading.get(r, r).re > 0.0).collect();
    let minus: Vec<usize> = (0..grading.dim()).filter(|&r| grading.get(r, r).re < 0.0).collect();
    if plus.len() != minus.len() {
        return Err(invalid("winding needs equally many orbitals of each chirality"));
    }
    let dets: Vec<c64> = (0..=n)
        .map(|m| {
            let hk = h(&[2.0 * PI * m as f64 / n as f64]);
            let a = Mat::<c64>::from_fn(plus.len(), minus.len(), |r, c| hk[(plus[r], minus[c])]);
            det(&a)
        })
        .collect();
    if let Some(d) = dets.iter().find(|d| d.norm() <= GRID_GAP_TOL) {
        return Err(Error::GapUndefined { mu: 0.0, nearest: d.norm(), width: 0.0 });
    }
    let total: f64 = dets.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
    let raw = total / (2.0 * PI);
    if (raw - raw.round()).abs() > 1e-6 {
        return Err(Error::Numerical(format!("winding sum {raw} is not an integer; refine the grid")));
    }
    Ok(raw.round() as i64)
}

/// Determinant by partial-pivot elimination.
fn det(m: &Mat<c64>) -> c64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut d = c64::new(1.0, 0.0);
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&x, &y| a[(x, c)].norm().total_cmp(&a[(y, c)].norm())) else {
            return ZERO;
        };
        if a[(p, c)] == ZERO {
            return ZERO;
        }
        if p != c {
            for k in 0..n {
                let t = a[(p, k)];
                a[(p, k)] = a[(c, k)];
                a[(c, k)] = t;
            }
            d = -d;
        }
        d *= a[(c, c)];
        for r in (c + 1)..n {
            let f = a[(r, c)] / a[(c, c)];
            for k in c..n {
                let v = a[(c, k)];
                a[(r, k)] -= f * v;
            }
        }
    }
    d
}
