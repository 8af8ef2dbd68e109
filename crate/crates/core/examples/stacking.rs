//! Stacks an SSH chain along a Fibonacci chain; the layered spectrum repeats and the 2D index vanishes.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_cut_and_project, gen_periodic, CutProjectModel, Window};
use delone_topo::groupoid::{builtin_model, represent, stack_operator};
use delone_topo::index::{kappa_stability, LocalizerOptions, Pairing};
use delone_topo::spectral::eigenvalues;

fn main() -> delone_topo::Result<()> {
    let chain = Arc::new(gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 29.0))?);
    let layers = gen_cut_and_project(CutProjectModel::Fibonacci1d, &Window::cube(1, 0.0, 8.0))?;
    let f = builtin_model("chiral_ssh_1d", 1, &BTreeMap::new())?;
    let h = represent(&f, &chain)?;
    let stacked = stack_operator(&h, &layers)?;
    let one = eigenvalues(&h.to_dense())?;
    let mut layered: Vec<f64> = one.iter().flat_map(|e| std::iter::repeat_n(*e, layers.len())).collect();
    layered.sort_by(f64::total_cmp);
    let two = eigenvalues(&stacked.to_dense())?;
    let dev = two.iter().zip(&layered).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("{} chain sites x {} layers, spectrum deviation {dev:.1e}", chain.len(), layers.len());
    let x0 = stacked.sites.window.center();
    let sweep = kappa_stability(&stacked, &Pairing::Even, 0.0, &x0, &[0.05, 0.1, 0.2], None, &LocalizerOptions::default())?;
    println!("stacked even index {:?} (plateau {})", sweep.index, sweep.plateau);
    Ok(())
}
