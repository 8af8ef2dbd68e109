//! Spectrum, gap and Fermi projection of a Chern insulator, with the real-space Chern number.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_periodic, Window};
use delone_topo::groupoid::{builtin_model, represent_periodic};
use delone_topo::index::{angular_sectors, kitaev_chern};
use delone_topo::spectral::{eig_hermitian, fermi_projection, spectral_gap};

fn main() -> delone_topo::Result<()> {
    let n = 16;
    let basis = [vec![1.0, 0.0], vec![0.0, 1.0]];
    let set = gen_periodic(&basis, &Window::cube(2, 0.0, n as f64 - 1.0))?.with_period(vec![n as f64; 2])?;
    let set = Arc::new(set);
    for m in [1.0, -1.0, 3.0] {
        let f = builtin_model("chern_2band_2d", 2, &BTreeMap::from([("M".to_string(), m)]))?;
        let spec = eig_hermitian(&represent_periodic(&f, &set)?.to_dense())?;
        let gap = spectral_gap(&spec.eigenvalues, 0.0)?;
        let p = fermi_projection(&spec, 0.0)?;
        let sectors = angular_sectors(&set, &[7.5, 7.5], 5.0, true)?;
        let c = kitaev_chern(&p.matrix, 2, &sectors);
        println!("M = {m:4}: gap [{:.3}, {:.3}], rank P = {}, real-space Chern {c:.6}", gap.below, gap.above, p.rank);
    }
    Ok(())
}
