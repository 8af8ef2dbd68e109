use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{norm, LocalPattern, DIST_EPS};
use crate::linalg::Block;

pub type KernelFn = dyn Fn(&LocalPattern, &[f64]) -> Block + Send + Sync;

/// Model name and parameters, echoed into reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelTag {
    pub name: String,
    pub params: std::collections::BTreeMap<String, f64>,
}

/// Finite-range, pattern-equivariant hopping kernel `f(ω̃, a)`.
///
/// [`HoppingFunction::eval`] enforces the support condition: the block is
/// zero unless `|a| <= range` and `a` is a point of the pattern.
#[derive(Clone)]
pub struct HoppingFunction {
    pub dim: usize,
    pub range: f64,
    pub pattern_radius: f64,
    pub block_dim: usize,
    pub tag: ModelTag,
    /// On-site chiral grading `Γ` for models with sublattice symmetry.
    pub grading: Option<Block>,
    kernel: Arc<KernelFn>,
}

impl fmt::Debug for HoppingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoppingFunction")
            .field("dim", &self.dim)
            .field("range", &self.range)
            .field("pattern_radius", &self.pattern_radius)
            .field("block_dim", &self.block_dim)
            .field("tag", &self.tag)
            .finish_non_exhaustive()
    }
}

impl HoppingFunction {
    pub fn new(
        dim: usize,
        range: f64,
        pattern_radius: f64,
        block_dim: usize,
        tag: ModelTag,
        kernel: impl Fn(&LocalPattern, &[f64]) -> Block + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 || block_dim == 0 {
            return Err(invalid("kernel dimension and block size must be positive"));
        }
        if !(range >= 0.0 && range.is_finite()) {
            return Err(invalid(format!("kernel range must be finite and non-negative, got {range}")));
        }
        // the support test `a ∈ ω̃` needs every admissible displacement inside the pattern
        if !(pattern_radius >= range && pattern_radius > 0.0) {
            return Err(invalid(format!("pattern radius {pattern_radius} must cover the range {range}")));
        }
        Ok(HoppingFunction { dim, range, pattern_radius, block_dim, tag, grading: None, kernel: Arc::new(kernel) })
    }

    pub fn with_grading(mut self, grading: Block) -> Result<Self> {
        if grading.dim() != self.block_dim {
            return Err(invalid("grading must match the block size"));
        }
        self.grading = Some(grading);
        Ok(self)
    }

    /// `f(ω̃, a)` with the support condition applied.
    pub fn eval(&self, pattern: &LocalPattern, a: &[f64]) -> Block {
        if norm(a) > self.range + DIST_EPS || !pattern.contains(a) {
            return Block::zeros(self.block_dim);
        }
        let b = (self.kernel)(pattern, a);
        debug_assert_eq!(b.dim(), self.block_dim);
        b
    }

    /// The kernel without the support condition; for probing only.
    pub fn raw(&self, pattern: &LocalPattern, a: &[f64]) -> Block {
        (self.kernel)(pattern, a)
    }

    pub(crate) fn kernel_arc(&self) -> Arc<KernelFn> {
        self.kernel.clone()
    }
}
