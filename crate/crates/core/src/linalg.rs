//! Small dense complex blocks and conversions to `faer` matrices.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

pub use faer::c64 as Complex;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

/// `N×N` complex block stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    n: usize,
    data: Vec<c64>,
}

impl Block {
    pub fn zeros(n: usize) -> Self {
        Block { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![ONE; n])
    }

    pub fn diagonal(d: &[c64]) -> Self {
        let mut b = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            b.data[i * d.len() + i] = *v;
        }
        b
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> c64) -> Self {
        Block { n, data: (0..n * n).map(|k| f(k / n, k % n)).collect() }
    }

    /// Builds a block from its rows.
    pub fn from_rows(rows: &[&[c64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "block rows must be square");
        Block { n, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn scalar(v: c64) -> Self {
        Block { n: 1, data: vec![v] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: c64) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[c64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &Block) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn add(&self, other: &Block) -> Self {
        Block { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Block) -> Self {
        Block { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: c64) -> Self {
        Block { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Block { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| *a == ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Block) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        match self.n {
            0 => 0.0,
            1 => self.data[0].norm(),
            _ => {
                let m = Mat::<c64>::from_fn(self.n, self.n, |i, j| self.get(i, j));
                match m.singular_values() {
                    Ok(s) => s.into_iter().fold(0.0, f64::max),
                    // fall back to the Frobenius bound, which still dominates the norm
                    Err(_) => self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt(),
                }
            }
        }
    }

    /// Entries flattened as `[re, im, re, im, ...]` in row-major order.
    pub fn to_real_flat(&self) -> Vec<f64> {
        self.data.iter().flat_map(|a| [a.re, a.im]).collect()
    }

    pub fn from_real_flat(n: usize, flat: &[f64]) -> Option<Self> {
        (flat.len() == 2 * n * n)
            .then(|| Block { n, data: flat.chunks(2).map(|c| c64::new(c[0], c[1])).collect() })
    }
}

/// Serializes as the real-flattened list.
impl Serialize for Block {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_real_flat().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let flat = Vec::<f64>::deserialize(d)?;
        let n = ((flat.len() / 2) as f64).sqrt().round() as usize;
        Block::from_real_flat(n, &flat).ok_or_else(|| serde::de::Error::custom("block length is not 2 n^2"))
    }
}

/// Pauli matrices.
pub fn sigma_x() -> Block {
    Block::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn sigma_y() -> Block {
    Block::from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn sigma_z() -> Block {
    Block::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_residual(m: &Mat<c64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Dense product using a single thread so that results never depend on the pool.
pub fn matmul(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let mut out = Mat::<c64>::zeros(a.nrows(), b.ncols());
    faer::linalg::matmul::matmul(out.as_mut(), faer::Accum::Replace, a.as_ref(), b.as_ref(), ONE, faer::Par::Seq);
    out
}

/// Largest row sum of entry moduli, an upper bound for the operator norm of a Hermitian matrix.
pub fn row_sum_norm(m: &Mat<c64>) -> f64 {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let x = sigma_x();
        let y = sigma_y();
        let z = sigma_z();
        assert_eq!(x.mul(&y), z.scale(I));
        assert_eq!(x.mul(&x), Block::identity(2));
        assert!((y.op_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_of_rank_one() {
        let b = Block::from_fn(3, |i, j| c64::new((i + 1) as f64 * (j + 1) as f64, 0.0));
        // |u|^2 for u = (1,2,3)
        assert!((b.op_norm() - 14.0).abs() < 1e-12);
    }

    #[test]
    fn flat_round_trip() {
        let b = Block::from_fn(2, |i, j| c64::new(i as f64, j as f64 - 0.5));
        assert_eq!(Block::from_real_flat(2, &b.to_real_flat()).unwrap(), b);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<Block>(&json).unwrap(), b);
    }
}
