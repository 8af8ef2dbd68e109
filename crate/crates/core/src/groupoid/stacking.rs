use std::sync::Arc;

use super::kernel::{HoppingFunction, ModelTag};
use super::operator::BlockOperator;
use crate::error::Result;
use crate::geometry::{product_delone, DeloneSet, LocalPattern, Point, DIST_EPS};

/// `T ⊗ 1` on `Λ × L`: the block at `((x, a), (y, b))` is `T_{x,y} δ_{a,b}`.
///
/// Site `(i, a)` of the product has index `i · |L| + a`.
pub fn stack_operator(t: &BlockOperator, layers: &DeloneSet) -> Result<BlockOperator> {
    let product = Arc::new(product_delone(&t.sites, layers)?);
    let m = layers.len();
    let mut out = BlockOperator::zero(product, t.block_dim, false);
    for (&(i, j), b) in t.iter() {
        for a in 0..m {
            out.insert(i * m + a, j * m + a, b.clone());
        }
    }
    out.hermitian = t.hermitian;
    Ok(out)
}

/// The kernel `f ⊗ 1` on `ℝ^{d+extra}`: it vanishes unless the last `extra`
/// displacement components are zero, and otherwise sees only the slice of the
/// pattern through the origin's layer.
pub fn stack_kernel(f: &HoppingFunction, extra: usize) -> Result<HoppingFunction> {
    let d = f.dim;
    let kernel = f.kernel_arc();
    let n = f.block_dim;
    let mut params = f.tag.params.clone();
    params.insert("stacked_dims".to_string(), extra as f64);
    let tag = ModelTag { name: format!("{}_stacked", f.tag.name), params };
    let radius = f.pattern_radius;
    let stacked = HoppingFunction::new(d + extra, f.range, f.pattern_radius, n, tag, move |pattern, a| {
        if a[d..].iter().any(|c| c.abs() > DIST_EPS) {
            return crate::linalg::Block::zeros(n);
        }
        let slice = LocalPattern {
            dim: d,
            radius,
            points: pattern
                .points
                .iter()
                .filter(|p| p.0[d..].iter().all(|c| c.abs() <= DIST_EPS))
                .map(|p| Point(p.0[..d].to_vec()))
                .collect(),
        };
        kernel(&slice, &a[..d])
    })?;
    match &f.grading {
        Some(g) => stacked.with_grading(g.clone()),
        None => Ok(stacked),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::geometry::{gen_cut_and_project, gen_periodic, CutProjectModel, Window};
    use crate::groupoid::{builtin_model, represent};
    use crate::linalg::Block;
    use crate::spectral::eigenvalues;

    #[test]
    fn identity_stacks_to_identity() {
        let lam = Arc::new(gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 4.0)).unwrap());
        let l = gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 2.0)).unwrap();
        let s = stack_operator(&BlockOperator::identity(lam, 2), &l).unwrap();
        assert_eq!(s.nnz_blocks(), 15);
        assert!(s.iter().all(|(&(i, j), b)| i == j && *b == Block::identity(2)));
    }

    #[test]
    fn stacked_spectrum_repeats() {
        let f = builtin_model("chiral_ssh_1d", 1, &BTreeMap::new()).unwrap();
        let lam = Arc::new(gen_cut_and_project(CutProjectModel::Fibonacci1d, &Window::cube(1, 0.0, 12.0)).unwrap());
        let l = gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 3.0)).unwrap();
        let h = represent(&f, &lam).unwrap();
        let s = stack_operator(&h, &l).unwrap();
        let one = eigenvalues(&h.to_dense()).unwrap();
        let many = eigenvalues(&s.to_dense()).unwrap();
        let mut expect: Vec<f64> = one.iter().flat_map(|e| std::iter::repeat(*e).take(4)).collect();
        expect.sort_by(f64::total_cmp);
        assert!(many.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn stacking_commutes_with_representation() {
        let f = builtin_model("chiral_ssh_1d", 1, &BTreeMap::from([("t2_long".to_string(), 0.7)])).unwrap();
        let lam = gen_cut_and_project(CutProjectModel::Fibonacci1d, &Window::cube(1, 0.0, 15.0)).unwrap();
        let l = gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 4.0)).unwrap();
        let direct = represent(&stack_kernel(&f, 1).unwrap(), &Arc::new(product_delone(&lam, &l).unwrap())).unwrap();
        let stacked = stack_operator(&represent(&f, &Arc::new(lam)).unwrap(), &l).unwrap();
        assert_eq!(direct.nnz_blocks(), stacked.nnz_blocks());
        for (&(i, j), b) in stacked.iter() {
            assert_eq!(direct.get(i, j), Some(b));
        }
    }
}
