//! Controlled perturbations, position commutators and a covering isometry.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_periodic, DeloneSet, Point, SetMeta, Window};
use delone_topo::groupoid::{builtin_model, represent};
use delone_topo::roe::*;

fn main() -> delone_topo::Result<()> {
    let basis = [vec![1.0, 0.0], vec![0.0, 1.0]];
    let set = Arc::new(gen_periodic(&basis, &Window::cube(2, 0.0, 7.0))?);
    let v = random_perturbation(&set, 2.0, 0.3, 2, &Symmetry::None, 9, false)?;
    let s = support_stats(&v);
    println!("perturbation: propagation {:.3}, Schur bound {:.3}, controlled at 2: {}", s.propagation, s.schur_bound(), is_controlled(&v, 2.0));

    let f = builtin_model("chern_2band_2d", 2, &BTreeMap::new())?;
    let h = represent(&f, &set)?;
    let c = position_commutator(&h, 0)?;
    println!("[H, X_0]: {} blocks, Schur bound {:.3}", c.nnz_blocks(), support_stats(&c).schur_bound());

    // embed into the union with the half-shifted copy
    let mut points: Vec<Point> = set.points.iter().map(|p| Point(vec![p.0[0] + 0.5, p.0[1] + 0.5])).collect();
    let offset = points.len();
    points.extend(set.points.iter().cloned());
    let union = Arc::new(DeloneSet::new(points, 0.35, 1.0, Window::cube(2, 0.0, 7.5), SetMeta::new("union"))?);
    let injection: Vec<usize> = (0..set.len()).map(|i| offset + i).collect();
    let e = covering_embed(&h, union, &injection)?;
    println!("before embedding: {:?}", support_stats(&h));
    println!("after embedding:  {:?}", support_stats(&e));
    Ok(())
}
