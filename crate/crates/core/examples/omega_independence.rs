//! The index computed with the pattern re-centred at several sites.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_hardcore_random, Window};
use delone_topo::groupoid::{builtin_model, represent};
use delone_topo::index::{localizer_index, LocalizerOptions, Pairing};

fn main() -> delone_topo::Result<()> {
    let set = gen_hardcore_random(&Window::cube(2, 0.0, 18.0), 0.8, 1.6, 6, 1_000_000)?;
    let f = builtin_model("chern_2band_2d", 2, &BTreeMap::new())?;
    let mut sites = set.interior(6.0);
    sites.truncate(4);
    for s in sites {
        let shift: Vec<f64> = set.point(s).iter().map(|c| -c).collect();
        let omega = Arc::new(set.translated(&shift));
        let h = represent(&f, &omega)?;
        let r = localizer_index(&h, &Pairing::Even, 0.0, &[0.0, 0.0], 0.1, None, &LocalizerOptions::default())?;
        println!("site {s} at {:?}: index {:?}, margin {:.4}", set.point(s), r.index, r.margin);
    }
    Ok(())
}
