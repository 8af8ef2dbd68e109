//! Generates each kind of point set and checks the Delone radii.
use delone_topo::geometry::*;

fn main() -> delone_topo::Result<()> {
    let square = Window::cube(2, 0.0, 12.0);
    let sets = [
        ("square lattice", gen_periodic(&[vec![1.0, 0.0], vec![0.0, 1.0]], &square)?),
        ("perturbed lattice", gen_perturbed_lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]], &square, 0.2, 1)?),
        ("hard-core random", gen_hardcore_random(&square, 0.8, 1.6, 1, 1_000_000)?),
        ("Ammann-Beenker", gen_cut_and_project(CutProjectModel::AmmannBeenker2d, &Window::cube(2, -6.0, 6.0))?),
        ("Fibonacci", gen_cut_and_project(CutProjectModel::Fibonacci1d, &Window::cube(1, 0.0, 100.0))?),
    ];
    for (name, set) in &sets {
        let report = validate_delone(set, set.r_pack / 2.0)?;
        println!(
            "{name:>18}: {:4} points, r_pack {:.3}, r_cov {:.3}, closest half-pair {:.3}, cover estimate {:.3}, ok {}",
            set.len(),
            set.r_pack,
            set.r_cov,
            report.min_pair_half,
            report.max_cover_radius_estimate,
            report.pass
        );
    }
    Ok(())
}
