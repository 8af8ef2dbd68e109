//! Coarse-geometric predicates on block operators: propagation, Schur norms,
//! position commutators, covering isometries and controlled perturbations.
//!
//! Local compactness is automatic here since every block is finite
//! dimensional, so it is not tested separately.

use std::sync::Arc;

use faer::c64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{norm, DeloneSet, NeighborIndex};
use crate::groupoid::BlockOperator;
use crate::linalg::Block;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportStats {
    pub propagation: f64,
    pub nnz_blocks: usize,
    /// `sup_i Σ_j ‖T_ij‖`.
    pub schur_row: f64,
    /// `sup_j Σ_i ‖T_ij‖`.
    pub schur_col: f64,
}

impl SupportStats {
    /// `max(schur_row, schur_col)`, an upper bound for `‖T‖`.
    pub fn schur_bound(&self) -> f64 {
        self.schur_row.max(self.schur_col)
    }
}

pub fn support_stats(t: &BlockOperator) -> SupportStats {
    let n = t.len_sites();
    let mut rows = vec![0.0; n];
    let mut cols = vec![0.0; n];
    let mut propagation: f64 = 0.0;
    for (&(i, j), b) in t.iter() {
        let norm_b = b.op_norm();
        rows[i] += norm_b;
        cols[j] += norm_b;
        propagation = propagation.max(t.distance(i, j));
    }
    SupportStats {
        propagation,
        nnz_blocks: t.nnz_blocks(),
        schur_row: rows.into_iter().fold(0.0, f64::max),
        schur_col: cols.into_iter().fold(0.0, f64::max),
    }
}

pub fn is_controlled(t: &BlockOperator, radius: f64) -> bool {
    support_stats(t).propagation <= radius + crate::geometry::DIST_EPS
}

/// `[T, X_j]`, whose blocks are `(y_j - x_j) T_{x,y}`.
pub fn position_commutator(t: &BlockOperator, axis: usize) -> Result<BlockOperator> {
    if axis >= t.sites.dim {
        return Err(invalid(format!("axis {axis} out of range for dimension {}", t.sites.dim)));
    }
    let mut out = BlockOperator::zero(t.sites.clone(), t.block_dim, t.periodic);
    for (&(i, j), b) in t.iter() {
        let d = t.displacement(i, j)[axis];
        out.insert(i, j, b.scale_re(d));
    }
    out.hermitian = false;
    Ok(out)
}

/// `V T V*` for the isometry `V|x⟩ = |ι(x)⟩` given by an index injection
/// `ι: X → Y` whose image sites coincide with the source sites.
pub fn covering_embed(t: &BlockOperator, target: Arc<DeloneSet>, injection: &[usize]) -> Result<BlockOperator> {
    if injection.len() != t.len_sites() {
        return Err(invalid("injection must assign a target site to every source site"));
    }
    let mut seen = vec![false; target.len()];
    for (i, &k) in injection.iter().enumerate() {
        if k >= target.len() {
            return Err(invalid(format!("site {i} maps outside the target set")));
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(invalid(format!("injection is not injective at target site {k}")));
        }
        if norm(&t.sites.point(i).iter().zip(target.point(k)).map(|(a, b)| a - b).collect::<Vec<_>>()) > 1e-12 {
            return Err(invalid(format!("site {i} and its image {k} are not at distance 0")));
        }
    }
    let mut out = BlockOperator::zero(target, t.block_dim, false);
    for (&(i, j), b) in t.iter() {
        out.insert(injection[i], injection[j], b.clone());
    }
    out.hermitian = t.hermitian;
    Ok(out)
}

/// Sublattice symmetry imposed on random perturbations.
#[derive(Clone, Debug, PartialEq)]
pub enum Symmetry {
    None,
    /// Anticommutes with the on-site grading `Γ`.
    Chiral(Block),
}

/// Seeded Hermitian perturbation supported on pairs within `range`.
///
/// Each block starts from independent complex Gaussians, is symmetrized
/// (Hermitian on the diagonal, `V_ji = V_ij†` off it), projected onto the
/// odd part `(B - ΓBΓ)/2` in the chiral case, and rescaled to operator norm
/// `strength · u` with `u` uniform in `[0, 1)`. Pairs are visited in
/// ascending `(i, j)` order so the result depends only on the seed.
pub fn random_perturbation(
    sites: &Arc<DeloneSet>,
    range: f64,
    strength: f64,
    block_dim: usize,
    symmetry: &Symmetry,
    seed: u64,
    periodic: bool,
) -> Result<BlockOperator> {
    if !(strength >= 0.0) || !(range >= 0.0) {
        return Err(invalid("perturbation strength and range must be non-negative"));
    }
    if let Symmetry::Chiral(g) = symmetry {
        if g.dim() != block_dim {
            return Err(invalid("grading must match the block size"));
        }
    }
    let mut out = BlockOperator::zero(sites.clone(), block_dim, periodic && sites.period.is_some());
    if strength == 0.0 {
        return Ok(out);
    }
    let index = NeighborIndex::new(sites, range.max(sites.r_pack), out.periodic);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new(0.0, 1.0).map_err(|e| invalid(e.to_string()))?;
    for i in 0..sites.len() {
        for j in index.query(sites.point(i), range) {
            if j < i {
                continue;
            }
            let g = Block::from_fn(block_dim, |_, _| {
                c64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let mut b = if i == j { g.add(&g.adjoint()).scale_re(0.5) } else { g };
            if let Symmetry::Chiral(gamma) = symmetry {
                b = b.sub(&gamma.mul(&b).mul(gamma)).scale_re(0.5);
            }
            let u: f64 = unit.sample(&mut rng);
            let norm_b = b.op_norm();
            if norm_b == 0.0 {
                continue;
            }
            let b = b.scale_re(strength * u / norm_b);
            if i != j {
                out.insert(j, i, b.adjoint());
            }
            out.insert(i, j, b);
        }
    }
    out.hermitian = true;
    Ok(out)
}

/// Partial sums `2^d Σ_{|x - c| <= ρ} (1 + |x - c|²)^{-s/2}` for increasing radii.
pub fn summability_partial_sums(set: &DeloneSet, center: &[f64], s: f64, radii: &[f64]) -> Vec<f64> {
    let pref = 2f64.powi(set.dim as i32);
    radii
        .iter()
        .map(|rho| {
            pref * (0..set.len())
                .map(|i| norm(&set.point(i).iter().zip(center).map(|(a, b)| a - b).collect::<Vec<_>>()))
                .filter(|r| r <= rho)
                .map(|r| (1.0 + r * r).powf(-s / 2.0))
                .sum::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::geometry::{gen_hardcore_random, gen_periodic, Window};
    use crate::groupoid::{builtin_model, represent};
    use crate::linalg::ONE;

    fn z(dim: usize, n: f64) -> Arc<DeloneSet> {
        let basis: Vec<Vec<f64>> = (0..dim).map(|k| (0..dim).map(|a| if a == k { 1.0 } else { 0.0 }).collect()).collect();
        Arc::new(gen_periodic(&basis, &Window::cube(dim, 0.0, n)).unwrap())
    }

    #[test]
    fn identity_and_zero_stats() {
        let s = support_stats(&BlockOperator::identity(z(2, 3.0), 2));
        assert_eq!((s.propagation, s.schur_row, s.schur_col), (0.0, 1.0, 1.0));
        let s = support_stats(&BlockOperator::zero(z(2, 3.0), 2, false));
        assert_eq!((s.propagation, s.nnz_blocks), (0.0, 0));
    }

    #[test]
    fn laplacian_stats() {
        let f = builtin_model("nn_laplacian", 2, &BTreeMap::new()).unwrap();
        let h = represent(&f, &z(2, 6.0)).unwrap();
        let s = support_stats(&h);
        assert_eq!(s.propagation, 1.0);
        assert_eq!(s.schur_row, 4.0);
        assert!(is_controlled(&h, 1.0));
        assert!(!is_controlled(&h, 0.5));
    }

    #[test]
    fn commutator_entries() {
        let chain = z(1, 6.0);
        assert_eq!(position_commutator(&BlockOperator::identity(chain.clone(), 1), 0).unwrap().nnz_blocks(), 0);
        let mut shift = BlockOperator::zero(chain.clone(), 1, false);
        for i in 0..6 {
            shift.insert(i, i + 1, Block::scalar(ONE));
        }
        let c = position_commutator(&shift, 0).unwrap();
        assert_eq!(c.nnz_blocks(), 6);
        assert!(c.iter().all(|(_, b)| *b == Block::scalar(ONE)));
        assert!(position_commutator(&shift, 1).is_err());
    }

    #[test]
    fn embedding_rejects_collisions() {
        let x = z(1, 2.0);
        let t = BlockOperator::identity(x.clone(), 1);
        assert!(covering_embed(&t, x.clone(), &[0, 0, 1]).is_err());
        assert!(covering_embed(&t, x.clone(), &[1, 0, 2]).is_err());
        let e = covering_embed(&t, x.clone(), &[0, 1, 2]).unwrap();
        assert_eq!(support_stats(&e), support_stats(&t));
    }

    #[test]
    fn perturbations_are_controlled() {
        let sites = Arc::new(gen_hardcore_random(&Window::cube(2, 0.0, 8.0), 0.8, 1.6, 1, 50_000).unwrap());
        assert_eq!(
            random_perturbation(&sites, 2.0, 0.0, 2, &Symmetry::None, 1, false).unwrap().nnz_blocks(),
            0
        );
        for seed in 0..20 {
            let v = random_perturbation(&sites, 2.0, 0.3, 2, &Symmetry::None, seed, false).unwrap();
            assert_eq!(v.hermiticity_defect().0, 0.0);
            assert!(is_controlled(&v, 2.0));
            assert!(v.iter().all(|(_, b)| b.op_norm() <= 0.3 + 1e-12));
        }
        let gamma = Block::diagonal(&[ONE, -ONE]);
        let v = random_perturbation(&sites, 2.0, 0.3, 2, &Symmetry::Chiral(gamma.clone()), 5, false).unwrap();
        assert!(v.iter().all(|(_, b)| gamma.mul(b).mul(&gamma) == b.scale_re(-1.0)));
    }

    #[test]
    fn summability_shells_decay() {
        let set = z(2, 40.0);
        let radii: Vec<f64> = (1..=8).map(|k| 2.0 * k as f64).collect();
        let sums = summability_partial_sums(&set, &[20.0, 20.0], 3.0, &radii);
        let diffs: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(diffs.iter().all(|d| *d > 0.0));
        assert!(diffs.windows(2).all(|w| w[1] < w[0]));
    }
}
