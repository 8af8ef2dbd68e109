//! Standard representation of the real Clifford algebra `Cl_{p,q}` on the
//! exterior algebra `Λℝ^{p+q}`.
//!
//! Basis vectors are subsets of `{0, .., p+q-1}` in graded-lexicographic
//! order: by size first, then lexicographically. Exterior multiplication by
//! `e_j` sends `e_S` to `(-1)^{#{s ∈ S : s < j}} e_{S ∪ {j}}` (or zero).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest supported `p + q`; the representation has dimension `2^{p+q}`.
pub const MAX_GENERATORS: usize = 12;

/// Dense real square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        RealMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        RealMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        RealMatrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Entrywise max-norm distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffordRep {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
    /// Basis subsets in graded-lexicographic order.
    pub basis: Vec<Vec<usize>>,
    /// Symmetric generators squaring to `+1`.
    pub gamma: Vec<RealMatrix>,
    /// Antisymmetric generators squaring to `-1`.
    pub rho: Vec<RealMatrix>,
    pub grading: RealMatrix,
}

fn graded_lex_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (0..1u32 << n)
        .map(|mask| (0..n).filter(|j| mask >> j & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Exterior multiplication by `e_j` in the subset basis.
fn wedge(basis: &[Vec<usize>], j: usize) -> RealMatrix {
    let pos: std::collections::HashMap<&[usize], usize> =
        basis.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect();
    let mut m = RealMatrix::zeros(basis.len());
    for (col, s) in basis.iter().enumerate() {
        if s.contains(&j) {
            continue;
        }
        let below = s.iter().filter(|&&x| x < j).count();
        let mut t = s.clone();
        t.insert(below, j);
        let row = pos[t.as_slice()];
        m.set(row, col, if below % 2 == 0 { 1.0 } else { -1.0 });
    }
    m
}

pub fn build_rep(p: usize, q: usize) -> Result<CliffordRep> {
    let n = p + q;
    if n == 0 || n > MAX_GENERATORS {
        return Err(invalid(format!("need 1 <= p + q <= {MAX_GENERATORS}, got {n}")));
    }
    let basis = graded_lex_subsets(n);
    let dim = basis.len();
    let lambdas: Vec<RealMatrix> = (0..n).map(|j| wedge(&basis, j)).collect();
    let gamma = lambdas[..p].iter().map(|l| l.add(&l.transpose())).collect();
    let rho = lambdas[p..].iter().map(|l| l.add(&l.transpose().scale(-1.0))).collect();
    let mut grading = RealMatrix::zeros(dim);
    for (k, s) in basis.iter().enumerate() {
        grading.set(k, k, if s.len() % 2 == 0 { 1.0 } else { -1.0 });
    }
    Ok(CliffordRep { p, q, dim, basis, gamma, rho, grading })
}

pub fn grading_operator(rep: &CliffordRep) -> RealMatrix {
    rep.grading.clone()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub max_residual: f64,
    pub relations_checked: usize,
}

impl CliffordRep {
    /// All generators, `γ` first.
    pub fn generators(&self) -> impl Iterator<Item = &RealMatrix> {
        self.gamma.iter().chain(&self.rho)
    }

    /// `Σ_j x_j γ^j` for a vector with `p` entries.
    pub fn gamma_combination(&self, x: &[f64]) -> RealMatrix {
        x.iter().zip(&self.gamma).fold(RealMatrix::zeros(self.dim), |acc, (c, g)| acc.add(&g.scale(*c)))
    }
}

/// Checks squares, (anti)symmetry, pairwise anticommutation and oddness.
pub fn verify_relations(rep: &CliffordRep) -> RelationReport {
    let id = RealMatrix::identity(rep.dim);
    let minus_id = id.scale(-1.0);
    let zero = RealMatrix::zeros(rep.dim);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut check = |lhs: &RealMatrix, rhs: &RealMatrix| {
        worst = worst.max(lhs.max_abs_diff(rhs));
        count += 1;
    };
    for g in &rep.gamma {
        check(&g.mul(g), &id);
        check(&g.transpose(), g);
    }
    for r in &rep.rho {
        check(&r.mul(r), &minus_id);
        check(&r.transpose(), &r.scale(-1.0));
    }
    let gens: Vec<&RealMatrix> = rep.generators().collect();
    for a in 0..gens.len() {
        for b in (a + 1)..gens.len() {
            check(&gens[a].mul(gens[b]).add(&gens[b].mul(gens[a])), &zero);
        }
        check(&rep.grading.mul(gens[a]).add(&gens[a].mul(&rep.grading)), &zero);
    }
    check(&rep.grading.mul(&rep.grading), &id);
    RelationReport { max_residual: worst, relations_checked: count }
}

/// Dimension of the real algebra generated by the representation, computed as
/// the rank of the `2^{p+q}` ordered monomials flattened to vectors.
pub fn spanning_rank(rep: &CliffordRep) -> usize {
    let gens: Vec<&RealMatrix> = rep.generators().collect();
    let rows: Vec<Vec<f64>> = (0..1u32 << gens.len())
        .map(|mask| {
            (0..gens.len())
                .filter(|j| mask >> j & 1 == 1)
                .fold(RealMatrix::identity(rep.dim), |acc, j| acc.mul(gens[j]))
                .data
        })
        .collect();
    rank(rows)
}

fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[piv][c].abs() < 1e-9 {
            continue;
        }
        rows.swap(r, piv);
        for k in 0..rows.len() {
            if k != r {
                let f = rows[k][c] / rows[r][c];
                if f != 0.0 {
                    for j in c..cols {
                        rows[k][j] -= f * rows[r][j];
                    }
                }
            }
        }
        r += 1;
    }
    r
}
