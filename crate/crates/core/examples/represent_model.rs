//! Represents a pattern-equivariant model on an amorphous set and inspects its matrix elements.
use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_hardcore_random, Window};
use delone_topo::groupoid::{builtin_model, covariance_check, represent, BUILTIN_MODELS};
use delone_topo::roe::support_stats;

fn main() -> delone_topo::Result<()> {
    println!("built-in models: {}", BUILTIN_MODELS.join(", "));
    let set = Arc::new(gen_hardcore_random(&Window::cube(2, 0.0, 10.0), 0.8, 1.6, 4, 1_000_000)?);
    let f = builtin_model("chern_2band_2d", 2, &BTreeMap::from([("M".to_string(), 1.0)]))?;
    let h = represent(&f, &set)?;
    let stats = support_stats(&h);
    println!("{} sites, N = {}, {} nonzero blocks", set.len(), h.block_dim, stats.nnz_blocks);
    println!("propagation {:.3} (kernel range {}), Schur bound {:.3}", stats.propagation, f.range, stats.schur_bound());
    println!("hermiticity defect {}", h.hermiticity_defect().0);
    let shift = set.point(7).to_vec();
    println!("translation covariance defect {}", covariance_check(&f, &set, &shift)?);
    Ok(())
}
