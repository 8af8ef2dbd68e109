use std::sync::Arc;

use rayon::prelude::*;

use super::kernel::HoppingFunction;
use super::operator::BlockOperator;
use crate::error::{invalid, Result};
use crate::geometry::{norm, DeloneSet, NeighborIndex};
use crate::linalg::Block;

/// Tolerance of the post-hoc involution check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Localized representation `⟨x|π_ω(f)|y⟩ = f(ω - x, y - x)` on the open window.
pub fn represent(f: &HoppingFunction, omega: &Arc<DeloneSet>) -> Result<BlockOperator> {
    build(f, omega, false)
}

/// Same on the torus closure of `omega`, which must carry a period longer than
/// twice the kernel's range and pattern radius.
pub fn represent_periodic(f: &HoppingFunction, omega: &Arc<DeloneSet>) -> Result<BlockOperator> {
    let period = omega.period.as_ref().ok_or_else(|| invalid("point set has no torus period"))?;
    let reach = f.range.max(f.pattern_radius);
    if period.iter().any(|p| *p <= 2.0 * reach) {
        return Err(invalid(format!("torus period {period:?} must exceed twice the kernel reach {reach}")));
    }
    build(f, omega, true)
}

fn build(f: &HoppingFunction, omega: &Arc<DeloneSet>, periodic: bool) -> Result<BlockOperator> {
    if f.dim != omega.dim {
        return Err(invalid(format!("kernel dimension {} does not match point set dimension {}", f.dim, omega.dim)));
    }
    let index = NeighborIndex::new(omega, f.pattern_radius.max(omega.r_pack), periodic);
    let rows: Vec<Vec<(usize, Block)>> = (0..omega.len())
        .into_par_iter()
        .map(|i| {
            let pattern = index.local_pattern(omega, i, f.pattern_radius);
            index
                .query(omega.point(i), f.range)
                .into_iter()
                .filter_map(|j| {
                    let a = omega.displacement(i, j, periodic);
                    let b = f.eval(&pattern, &a);
                    (!b.is_zero()).then_some((j, b))
                })
                .collect()
        })
        .collect();
    let mut op = BlockOperator::zero(omega.clone(), f.block_dim, periodic);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, b) in row {
            op.insert(i, j, b);
        }
    }
    op.hermitian = false;
    let scale = op.iter().map(|(_, b)| b.max_abs()).fold(1.0, f64::max);
    op.into_hermitian(HERMITIAN_TOL * scale)
}

/// Largest block deviation between `π_ω(f)` and `π_{ω-v}(f)` under the site
/// bijection `x ↦ x - v`, over pairs of sites farther than `R_f + ρ_f` from
/// the window boundary.
pub fn covariance_check(f: &HoppingFunction, omega: &Arc<DeloneSet>, v: &[f64]) -> Result<f64> {
    if v.len() != omega.dim {
        return Err(invalid("translation has the wrong dimension"));
    }
    let base = represent(f, omega)?;
    let minus: Vec<f64> = v.iter().map(|c| -c).collect();
    let shifted = represent(f, &Arc::new(omega.translated(&minus)))?;
    let margin = f.range + f.pattern_radius;
    let inner: Vec<bool> = (0..omega.len()).map(|i| omega.window.depth(omega.point(i)) >= margin).collect();
    let mut worst: f64 = 0.0;
    for i in (0..omega.len()).filter(|&i| inner[i]) {
        for j in (0..omega.len()).filter(|&j| inner[j]) {
            if norm(&omega.displacement(i, j, false)) > f.range + 1e-6 {
                continue;
            }
            worst = worst.max(base.block(i, j).max_abs_diff(&shifted.block(i, j)));
        }
    }
    Ok(worst)
}
