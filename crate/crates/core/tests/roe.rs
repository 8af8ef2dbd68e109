mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::*;
use delone_topo::geometry::{DeloneSet, Point, SetMeta, Window};
use delone_topo::groupoid::{builtin_model, represent, BlockOperator};
use delone_topo::linalg::{Block, ONE};
use delone_topo::roe::*;
use delone_topo::spectral::eigenvalues;

/// `ℤ² ∩ [0, n-1]²` together with the half-shifted copy, shifted sites listed first.
fn centered_union(n: usize) -> (Arc<DeloneSet>, Vec<usize>) {
    let base = lattice(2, n);
    let shifted: Vec<Point> = base.points.iter().map(|p| Point(vec![p.0[0] + 0.5, p.0[1] + 0.5])).collect();
    let offset = shifted.len();
    let mut points = shifted;
    points.extend(base.points.iter().cloned());
    let window = Window::cube(2, 0.0, n as f64 - 0.5);
    let set = DeloneSet::new(points, 0.35, 1.0, window, SetMeta::new("union")).unwrap();
    (Arc::new(set), (0..base.len()).map(|i| offset + i).collect())
}

#[test]
fn covering_isometry_preserves_everything() {
    let f = builtin_model("chern_2band_2d", 2, &BTreeMap::new()).unwrap();
    let h = represent(&f, &Arc::new(lattice(2, 8))).unwrap();
    let (union, injection) = centered_union(8);
    let e = covering_embed(&h, union.clone(), &injection).unwrap();
    assert_eq!(support_stats(&e), support_stats(&h));
    let before = eigenvalues(&h.to_dense()).unwrap();
    let after = eigenvalues(&e.to_dense()).unwrap();
    let zeros = after.len() - before.len();
    let mut nonzero: Vec<f64> = after.clone();
    nonzero.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    assert!(nonzero[..zeros].iter().all(|v| v.abs() < 1e-12));
    assert!(max_dev(&sorted(nonzero[zeros..].to_vec()), &before) < 1e-9);
}

#[test]
fn propagation_and_schur_norms() {
    let f = builtin_model("chern_2band_2d", 2, &BTreeMap::new()).unwrap();
    let set = amorphous(2, 10.0, 8);
    let h = represent(&f, &set).unwrap();
    let s = support_stats(&h);
    assert!(s.propagation <= f.range);
    assert!(is_controlled(&h, f.range));
    // the Schur bound dominates the operator norm
    let ev = eigenvalues(&h.to_dense()).unwrap();
    let norm = ev[0].abs().max(ev[ev.len() - 1].abs());
    assert!(norm <= s.schur_bound() + 1e-12);
    assert_eq!(s.schur_row, s.schur_col);
}

#[test]
fn commutator_of_on_site_term_vanishes() {
    let set = Arc::new(lattice(2, 4));
    let t = BlockOperator::on_site(set, &Block::diagonal(&[ONE, -ONE]));
    for axis in 0..2 {
        assert_eq!(position_commutator(&t, axis).unwrap().nnz_blocks(), 0);
    }
}

#[test]
fn perturbations_are_reproducible() {
    let set = amorphous(2, 8.0, 3);
    let a = random_perturbation(&set, 2.0, 0.5, 2, &Symmetry::None, 42, false).unwrap();
    let b = random_perturbation(&set, 2.0, 0.5, 2, &Symmetry::None, 42, false).unwrap();
    let c = random_perturbation(&set, 2.0, 0.5, 2, &Symmetry::None, 43, false).unwrap();
    assert_eq!(a.to_dense(), b.to_dense());
    assert_ne!(a.to_dense(), c.to_dense());
    assert!(random_perturbation(&set, -1.0, 0.5, 2, &Symmetry::None, 1, false).is_err());
}

#[test]
fn summability_converges_above_dimension() {
    let set = lattice(2, 61);
    let radii = [10.0, 20.0, 30.0];
    let s3 = summability_partial_sums(&set, &[30.0, 30.0], 3.0, &radii);
    let s1 = summability_partial_sums(&set, &[30.0, 30.0], 1.0, &radii);
    // tail increments shrink for s > d and grow for s < d
    assert!(s3[2] - s3[1] < s3[1] - s3[0]);
    assert!(s1[2] - s1[1] > 0.9 * (s1[1] - s1[0]));
}
