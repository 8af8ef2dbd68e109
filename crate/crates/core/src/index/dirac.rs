use std::sync::Arc;

use faer::{c64, Mat};

use crate::clifford::{build_rep, CliffordRep};
use crate::error::{invalid, Result};
use crate::geometry::DeloneSet;

/// `D = Σ_j (X_j - x₀_j) ⊗ γ^j` on `ℓ²(sites) ⊗ ℂ^N ⊗ Λℝ^d`.
#[derive(Clone, Debug)]
pub struct PositionDirac {
    pub sites: Arc<DeloneSet>,
    pub x0: Vec<f64>,
    pub block_dim: usize,
    pub clifford: CliffordRep,
}

pub fn position_dirac(sites: Arc<DeloneSet>, x0: &[f64], block_dim: usize) -> Result<PositionDirac> {
    if x0.len() != sites.dim || x0.iter().any(|c| !c.is_finite()) {
        return Err(invalid("base point must be finite and match the dimension"));
    }
    if block_dim == 0 {
        return Err(invalid("block size must be positive"));
    }
    let clifford = build_rep(sites.dim, 0)?;
    Ok(PositionDirac { sites, x0: x0.to_vec(), block_dim, clifford })
}

impl PositionDirac {
    pub fn spinor_dim(&self) -> usize {
        self.clifford.dim
    }

    pub fn dim(&self) -> usize {
        self.sites.len() * self.block_dim * self.spinor_dim()
    }

    /// `x_i - x₀`.
    pub fn offset(&self, i: usize) -> Vec<f64> {
        self.sites.point(i).iter().zip(&self.x0).map(|(a, b)| a - b).collect()
    }

    /// Dense matrix with row index `(i·N + r)·2^d + s` for site `i`, orbital `r`, spinor `s`.
    pub fn to_dense(&self) -> Mat<c64> {
        let (n, s) = (self.block_dim, self.spinor_dim());
        let mut m = Mat::<c64>::zeros(self.dim(), self.dim());
        for i in 0..self.sites.len() {
            let fiber = self.clifford.gamma_combination(&self.offset(i));
            for r in 0..n {
                let base = (i * n + r) * s;
                for a in 0..s {
                    for b in 0..s {
                        m[(base + a, base + b)] = c64::new(fiber.get(a, b), 0.0);
                    }
                }
            }
        }
        m
    }

    /// `max_i ‖(Σ_j a_j γ^j)² - |a|² 1‖_max` with `a = x_i - x₀`; `D` is site-diagonal
    /// so this is the full `D² - Σ_j (X_j - x₀_j)² ⊗ 1` defect.
    pub fn square_defect(&self) -> f64 {
        (0..self.sites.len())
            .map(|i| {
                let a = self.offset(i);
                let fiber = self.clifford.gamma_combination(&a);
                let r2: f64 = a.iter().map(|c| c * c).sum();
                fiber.mul(&fiber).max_abs_diff(&crate::clifford::RealMatrix::identity(self.spinor_dim()).scale(r2))
            })
            .fold(0.0, f64::max)
    }
}
