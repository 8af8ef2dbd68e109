//! The Chern localizer index under a few random controlled perturbations.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_periodic, Window};
use delone_topo::groupoid::{builtin_model, represent};
use delone_topo::index::{localizer_index, LocalizerOptions, Pairing};
use delone_topo::roe::{random_perturbation, support_stats, Symmetry};

fn main() -> delone_topo::Result<()> {
    let basis = [vec![1.0, 0.0], vec![0.0, 1.0]];
    let set = Arc::new(gen_periodic(&basis, &Window::cube(2, 0.0, 13.0))?);
    let f = builtin_model("chern_2band_2d", 2, &BTreeMap::new())?;
    let h = represent(&f, &set)?;
    let x0 = set.window.center();
    let opts = LocalizerOptions::default();
    let base = localizer_index(&h, &Pairing::Even, 0.0, &x0, 0.1, None, &opts)?;
    println!("unperturbed: index {:?}, margin {:.4}", base.index, base.margin);
    for seed in 0..5 {
        let v = random_perturbation(&set, 2.0, 1.0, 2, &Symmetry::None, seed, false)?;
        // rescale so the Schur bound, hence the operator norm, is at most 0.2
        let v = v.scale(0.2 / support_stats(&v).schur_bound());
        let r = localizer_index(&h.add(&v)?, &Pairing::Even, 0.0, &x0, 0.1, None, &opts)?;
        println!("seed {seed}: index {:?}, margin {:.4}", r.index, r.margin);
    }
    Ok(())
}
