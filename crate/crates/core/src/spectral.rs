//! Dense Hermitian spectral computations.
//!
//! All factorizations run single-threaded so that results are bit-identical
//! regardless of how many workers an experiment uses.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::lblt;
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{c64, Mat, Par};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_residual, matmul, max_abs, ONE, ZERO};

/// Eigenvalues within this distance of `μ` count as touching it.
pub const COLLISION_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: Mat<c64>,
    pub source_dim: usize,
}

fn check_hermitian(h: &Mat<c64>) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(invalid("matrix is not square"));
    }
    let res = hermitian_residual(h);
    if res > 1e-10 * max_abs(h).max(1.0) {
        return Err(invalid(format!("matrix is not Hermitian (residual {res:.3e})")));
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// A handful of eigenpairs are spot-checked for residual and orthonormality.
pub fn eig_hermitian(h: &Mat<c64>) -> Result<SpectralData> {
    check_hermitian(h)?;
    let n = h.nrows();
    let mut s = Diag::<c64>::zeros(n);
    let mut u = Mat::<c64>::zeros(n, n);
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<c64>(
        n,
        ComputeEigenvectors::Yes,
        Par::Seq,
        Default::default(),
    ));
    evd::self_adjoint_evd(h.as_ref(), s.as_mut(), Some(u.as_mut()), Par::Seq, MemStack::new(&mut buf), Default::default())
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    let data = SpectralData { eigenvalues: (0..n).map(|i| s[i].re).collect(), eigenvectors: u, source_dim: n };
    spot_check(h, &data)?;
    Ok(data)
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(h: &Mat<c64>) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let n = h.nrows();
    let mut s = Diag::<c64>::zeros(n);
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<c64>(
        n,
        ComputeEigenvectors::No,
        Par::Seq,
        Default::default(),
    ));
    evd::self_adjoint_evd(h.as_ref(), s.as_mut(), None, Par::Seq, MemStack::new(&mut buf), Default::default())
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    Ok((0..n).map(|i| s[i].re).collect())
}

fn spot_check(h: &Mat<c64>, data: &SpectralData) -> Result<()> {
    let n = data.source_dim;
    if n == 0 {
        return Ok(());
    }
    let scale = max_abs(h).max(1.0) * (n as f64).sqrt();
    let picks: Vec<usize> = if n <= 8 { (0..n).collect() } else { (0..8).map(|k| k * (n - 1) / 7).collect() };
    let v = &data.eigenvectors;
    for &k in &picks {
        let lambda = data.eigenvalues[k];
        let mut res: f64 = 0.0;
        for i in 0..n {
            let hv: c64 = (0..n).map(|j| h[(i, j)] * v[(j, k)]).sum();
            res += (hv - v[(i, k)] * lambda).norm_sqr();
        }
        let norm: f64 = (0..n).map(|i| v[(i, k)].norm_sqr()).sum();
        if res.sqrt() > 1e-9 * scale || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("eigenpair {k} failed verification (residual {:.3e})", res.sqrt())));
        }
    }
    Ok(())
}

impl SpectralData {
    /// Largest `‖Hv - λv‖` over all pairs and the orthonormality defect `‖VᴴV - I‖_max`.
    pub fn residuals(&self, h: &Mat<c64>) -> (f64, f64) {
        let n = self.source_dim;
        let hv = matmul(h, &self.eigenvectors);
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let r: f64 = (0..n).map(|i| (hv[(i, k)] - self.eigenvectors[(i, k)] * self.eigenvalues[k]).norm_sqr()).sum();
            worst = worst.max(r.sqrt());
        }
        let gram = matmul(&self.eigenvectors.adjoint().to_owned(), &self.eigenvectors);
        let mut ortho: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                ortho = ortho.max((gram[(i, j)] - target).norm());
            }
        }
        (worst, ortho)
    }
}

/// Spectral gap around `μ`. Missing sides are reported as infinities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub below: f64,
    pub above: f64,
    pub width: f64,
}

impl Gap {
    /// Distance from `μ` to the nearest eigenvalue.
    pub fn distance(&self, mu: f64) -> f64 {
        (mu - self.below).min(self.above - mu)
    }
}

pub fn spectral_gap(eigenvalues: &[f64], mu: f64) -> Result<Gap> {
    let below = eigenvalues.iter().copied().filter(|e| *e < mu).fold(f64::NEG_INFINITY, f64::max);
    let above = eigenvalues.iter().copied().filter(|e| *e >= mu).fold(f64::INFINITY, f64::min);
    if let Some(hit) = eigenvalues.iter().find(|e| (*e - mu).abs() <= COLLISION_TOL) {
        return Err(Error::GapUndefined { mu, nearest: *hit, width: 0.0 });
    }
    Ok(Gap { below, above, width: above - below })
}

/// Midpoint of the widest gap between consecutive eigenvalues.
pub fn largest_gap_mu(eigenvalues: &[f64]) -> Result<f64> {
    eigenvalues
        .windows(2)
        .max_by(|a, b| (a[1] - a[0]).total_cmp(&(b[1] - b[0])))
        .map(|w| 0.5 * (w[0] + w[1]))
        .ok_or_else(|| invalid("need at least two eigenvalues to pick a gap"))
}

#[derive(Clone, Debug)]
pub struct FermiProjection {
    pub matrix: Mat<c64>,
    pub mu: f64,
    pub gap: Gap,
    pub rank: usize,
}

/// `P = Σ_{λ < μ} v vᴴ`.
pub fn fermi_projection(spec: &SpectralData, mu: f64) -> Result<FermiProjection> {
    let gap = spectral_gap(&spec.eigenvalues, mu)?;
    let rank = spec.eigenvalues.iter().filter(|e| **e < mu).count();
    let n = spec.source_dim;
    let occ = spec.eigenvectors.subcols(0, rank).to_owned();
    let matrix = if n == 0 { Mat::zeros(0, 0) } else { matmul(&occ, &occ.adjoint().to_owned()) };
    Ok(FermiProjection { matrix, mu, gap, rank })
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Self {
        Inertia {
            positive: eigenvalues.iter().filter(|e| **e > 0.0).count(),
            negative: eigenvalues.iter().filter(|e| **e < 0.0).count(),
            zero: eigenvalues.iter().filter(|e| **e == 0.0).count(),
        }
    }
}

/// Bunch–Kaufman `P A Pᵀ = L B Lᴴ` of a Hermitian matrix.
pub struct Factorization {
    l: Mat<c64>,
    diag: Diag<c64>,
    subdiag: Diag<c64>,
    fwd: Vec<usize>,
    bwd: Vec<usize>,
}

impl Factorization {
    pub fn new(h: &Mat<c64>) -> Result<Self> {
        check_hermitian(h)?;
        let n = h.nrows();
        let mut l = Mat::<c64>::zeros(n, n);
        l.copy_from_triangular_lower(h.as_ref());
        let mut subdiag = Diag::<c64>::zeros(n);
        let mut fwd = vec![0usize; n];
        let mut bwd = vec![0usize; n];
        let mut buf = MemBuffer::new(lblt::factor::cholesky_in_place_scratch::<usize, c64>(
            n,
            Par::Seq,
            Default::default(),
        ));
        lblt::factor::cholesky_in_place(
            l.as_mut(),
            subdiag.as_mut(),
            &mut fwd,
            &mut bwd,
            Par::Seq,
            MemStack::new(&mut buf),
            Default::default(),
        );
        let mut diag = Diag::<c64>::zeros(n);
        for i in 0..n {
            diag[i] = l[(i, i)];
            l[(i, i)] = ONE;
            for j in (i + 1)..n {
                l[(i, j)] = ZERO;
            }
        }
        Ok(Factorization { l, diag, subdiag, fwd, bwd })
    }

    /// Inertia of `B`, which equals that of the factored matrix by Sylvester's law.
    pub fn inertia(&self) -> Inertia {
        let n = self.l.nrows();
        let mut out = Inertia { positive: 0, negative: 0, zero: 0 };
        let mut i = 0;
        while i < n {
            if self.subdiag[i] != ZERO && i + 1 < n {
                let a = self.diag[i].re;
                let c = self.diag[i + 1].re;
                let det = a * c - self.subdiag[i].norm_sqr();
                if det < 0.0 {
                    out.positive += 1;
                    out.negative += 1;
                } else if det == 0.0 {
                    out.zero += 1;
                    if a + c > 0.0 {
                        out.positive += 1;
                    } else if a + c < 0.0 {
                        out.negative += 1;
                    } else {
                        out.zero += 1;
                    }
                } else if a + c > 0.0 {
                    out.positive += 2;
                } else {
                    out.negative += 2;
                }
                i += 2;
            } else {
                let a = self.diag[i].re;
                if a > 0.0 {
                    out.positive += 1;
                } else if a < 0.0 {
                    out.negative += 1;
                } else {
                    out.zero += 1;
                }
                i += 1;
            }
        }
        out
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, rhs: &mut Mat<c64>) {
        let n = self.l.nrows();
        let perm = faer::perm::PermRef::new_checked(&self.fwd, &self.bwd, n);
        let mut buf = MemBuffer::new(lblt::solve::solve_in_place_scratch::<usize, c64>(n, rhs.ncols(), Par::Seq));
        lblt::solve::solve_in_place_with_conj(
            self.l.as_ref(),
            self.diag.as_ref(),
            self.subdiag.as_ref(),
            faer::Conj::No,
            perm,
            rhs.as_mut(),
            Par::Seq,
            MemStack::new(&mut buf),
        );
    }
}

/// Smallest `|λ|` of a Hermitian matrix from shift-invert Lanczos on its
/// Bunch–Kaufman factorization, with full reorthogonalization and a fixed
/// start vector. Returns 0 when the matrix is singular.
pub fn min_abs_eigenvalue(fact: &Factorization, steps: usize) -> f64 {
    let n = fact.l.nrows();
    if n == 0 {
        return f64::INFINITY;
    }
    if fact.inertia().zero > 0 {
        return 0.0;
    }
    let steps = steps.min(n).max(1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q = Mat::<c64>::from_fn(n, 1, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    normalize(&mut q);
    let mut basis: Vec<Mat<c64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut w = q.clone();
        fact.solve_in_place(&mut w);
        let a = dot(&q, &w).re;
        basis.push(q.clone());
        alpha.push(a);
        // two passes of Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for i in 0..n {
                    w[(i, 0)] -= v[(i, 0)] * c;
                }
            }
        }
        let b = (0..n).map(|i| w[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
        if b <= 1e-12 * a.abs().max(1e-300) || basis.len() == n {
            break;
        }
        beta.push(b);
        q = Mat::from_fn(n, 1, |i, _| w[(i, 0)] / b);
    }
    let k = alpha.len();
    let t = Mat::<c64>::from_fn(k, k, |i, j| {
        if i == j {
            c64::new(alpha[i], 0.0)
        } else if i + 1 == j || j + 1 == i {
            c64::new(beta[i.min(j)], 0.0)
        } else {
            ZERO
        }
    });
    let ritz = eigenvalues(&t).unwrap_or_default();
    let top = ritz.iter().map(|r| r.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        f64::INFINITY
    } else {
        1.0 / top
    }
}

fn dot(a: &Mat<c64>, b: &Mat<c64>) -> c64 {
    (0..a.nrows()).map(|i| a[(i, 0)].conj() * b[(i, 0)]).sum()
}

fn normalize(v: &mut Mat<c64>) {
    let norm = (0..v.nrows()).map(|i| v[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
    for i in 0..v.nrows() {
        v[(i, 0)] /= norm;
    }
}

/// Writes `index,eigenvalue` rows.
pub fn spectrum_csv(eigenvalues: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, e) in eigenvalues.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", crate::output::fmt_f64(*e)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> Mat<c64> {
        Mat::from_fn(values.len(), values.len(), |i, j| if i == j { c64::new(values[i], 0.0) } else { ZERO })
    }

    fn random_hermitian(n: usize, seed: u64) -> Mat<c64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::<c64>::from_fn(n, n, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
    }

    #[test]
    fn diagonal_sorted() {
        assert_eq!(eig_hermitian(&diag(&[3.0, 1.0, 2.0])).unwrap().eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn path_graph_closed_form() {
        let n = 50;
        let h = Mat::<c64>::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { ONE } else { ZERO });
        let ev = eigenvalues(&h).unwrap();
        let mut expect: Vec<f64> =
            (1..=n).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn random_round_trip() {
        let h = random_hermitian(40, 1);
        let spec = eig_hermitian(&h).unwrap();
        let (res, ortho) = spec.residuals(&h);
        assert!(res < 1e-9 && ortho < 1e-9);
        let v = &spec.eigenvectors;
        let lam = Mat::from_fn(40, 40, |i, j| if i == j { c64::new(spec.eigenvalues[i], 0.0) } else { ZERO });
        let back = matmul(&matmul(v, &lam), &v.adjoint().to_owned());
        assert!(crate::linalg::max_abs_diff(&back, &h) < 1e-9);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut h = diag(&[1.0, 2.0]);
        h[(0, 1)] = ONE;
        assert!(matches!(eig_hermitian(&h), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn gaps() {
        let g = spectral_gap(&[-1.0, 1.0], 0.0).unwrap();
        assert_eq!(g.width, 2.0);
        assert!(matches!(spectral_gap(&[-1.0, 1.0], 1.0), Err(Error::GapUndefined { .. })));
        let g = spectral_gap(&[-1.0, 1.0], 5.0).unwrap();
        assert!(g.above.is_infinite() && g.width.is_infinite());
        assert_eq!(largest_gap_mu(&[-3.0, -2.5, 1.0, 1.5]).unwrap(), -0.75);
    }

    #[test]
    fn projection_of_diagonal() {
        let h = diag(&[-1.0, 1.0]);
        let p = fermi_projection(&eig_hermitian(&h).unwrap(), 0.0).unwrap();
        assert_eq!(p.rank, 1);
        assert!(crate::linalg::max_abs_diff(&p.matrix, &diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn projection_properties() {
        let h = random_hermitian(30, 2);
        let spec = eig_hermitian(&h).unwrap();
        let mu = largest_gap_mu(&spec.eigenvalues).unwrap();
        let p = fermi_projection(&spec, mu).unwrap();
        let pp = matmul(&p.matrix, &p.matrix);
        assert!(crate::linalg::max_abs_diff(&pp, &p.matrix) < 1e-9);
        assert!(hermitian_residual(&p.matrix) < 1e-9);
        let comm = crate::linalg::max_abs_diff(&matmul(&p.matrix, &h), &matmul(&h, &p.matrix));
        assert!(comm < 1e-9);
        // P(H - μ)P is negative on the range of P
        let shifted = Mat::from_fn(30, 30, |i, j| h[(i, j)] - if i == j { c64::new(mu, 0.0) } else { ZERO });
        let php = matmul(&matmul(&p.matrix, &shifted), &p.matrix);
        let ev = eigenvalues(&php).unwrap();
        let negative = ev.iter().filter(|e| **e < -1e-9).count();
        assert_eq!(negative, p.rank);
        assert!(ev.iter().all(|e| *e < 1e-9));
    }

    #[test]
    fn inertia_matches_eigenvalues() {
        for seed in 0..5 {
            let h = random_hermitian(60, seed);
            let ev = eigenvalues(&h).unwrap();
            let fact = Factorization::new(&h).unwrap();
            assert_eq!(fact.inertia(), Inertia::from_eigenvalues(&ev));
            let margin = ev.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
            let lanczos = min_abs_eigenvalue(&fact, 60);
            assert!((lanczos - margin).abs() < 1e-8 * margin.max(1.0), "{lanczos} vs {margin}");
        }
    }

    #[test]
    fn factorization_solves() {
        let h = random_hermitian(20, 9);
        let fact = Factorization::new(&h).unwrap();
        let b = Mat::<c64>::from_fn(20, 1, |i, _| c64::new(i as f64, 1.0));
        let mut x = b.clone();
        fact.solve_in_place(&mut x);
        assert!(crate::linalg::max_abs_diff(&matmul(&h, &x), &b) < 1e-9);
    }
}
