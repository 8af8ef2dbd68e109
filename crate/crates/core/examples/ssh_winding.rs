//! Odd localizer index of the SSH chain against the Bloch winding number.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_periodic, Window};
use delone_topo::groupoid::{builtin_model, represent};
use delone_topo::index::{bloch_winding, kappa_stability, BlochFamily, LocalizerOptions, Pairing};

fn main() -> delone_topo::Result<()> {
    let chain = Arc::new(gen_periodic(&[vec![1.0]], &Window::cube(1, 0.0, 59.0))?);
    for (t1, t2) in [(0.5, 1.0), (1.0, 0.5), (0.2, 1.0)] {
        let params = BTreeMap::from([("t1".to_string(), t1), ("t2".to_string(), t2)]);
        let f = builtin_model("chiral_ssh_1d", 1, &params)?;
        let grading = f.grading.clone().expect("SSH is graded");
        let family = BlochFamily::from_kernel(&f)?;
        let winding = bloch_winding(|k| family.at(k), &grading, 128)?;
        let h = represent(&f, &chain)?;
        let pairing = Pairing::Odd { grading };
        let sweep = kappa_stability(&h, &pairing, 0.0, &[29.5], &[0.05, 0.1, 0.2], None, &LocalizerOptions::default())?;
        println!("t1 = {t1}, t2 = {t2}: localizer {:?} (plateau {}), Bloch winding {winding}", sweep.index, sweep.plateau);
    }
    Ok(())
}
