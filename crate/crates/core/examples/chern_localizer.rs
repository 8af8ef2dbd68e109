//! Even localizer index of a Chern insulator on a lattice and on an amorphous set.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_hardcore_random_torus, gen_periodic, DeloneSet, Window};
use delone_topo::groupoid::{builtin_model, represent, represent_periodic};
use delone_topo::index::{kappa_stability, LocalizerOptions, Pairing};
use delone_topo::spectral::{eigenvalues, spectral_gap};

fn report(name: &str, set: DeloneSet) -> delone_topo::Result<()> {
    let f = builtin_model("chern_2band_2d", 2, &BTreeMap::new())?;
    let torus = Arc::new(set);
    let gap = spectral_gap(&eigenvalues(&represent_periodic(&f, &torus)?.to_dense())?, 0.0)?;
    let open = Arc::new(torus.open());
    let h = represent(&f, &open)?;
    let x0 = open.window.center();
    let sweep = kappa_stability(&h, &Pairing::Even, 0.0, &x0, &[0.05, 0.1, 0.2], Some(&gap), &LocalizerOptions::default())?;
    println!("{name}: {} sites, gap {:.3}", open.len(), gap.width);
    for r in &sweep.results {
        println!("  kappa {:.2}: index {:?}, margin {:.4}", r.kappa, r.index, r.margin);
    }
    println!("  plateau {} -> index {:?}", sweep.plateau, sweep.index);
    Ok(())
}

fn main() -> delone_topo::Result<()> {
    let basis = [vec![1.0, 0.0], vec![0.0, 1.0]];
    report("square 14x14", gen_periodic(&basis, &Window::cube(2, 0.0, 13.0))?.with_period(vec![14.0; 2])?)?;
    report("amorphous", gen_hardcore_random_torus(&Window::cube(2, 0.0, 15.0), 0.8, 1.6, 2, 1_000_000)?)
}
