mod common;

use common::*;
use delone_topo::geometry::*;
use proptest::prelude::*;

fn min_half_distance(set: &DeloneSet) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            let d2: f64 = set.point(i).iter().zip(set.point(j)).map(|(a, b)| (a - b).powi(2)).sum();
            best = best.min(d2.sqrt());
        }
    }
    best / 2.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbed_lattices_keep_their_constants(seed in 0u64..1000, delta in 0.0f64..0.24) {
        let set = gen_perturbed_lattice(&unit_basis(2), &Window::cube(2, 0.0, 7.0), delta, seed).unwrap();
        prop_assert_eq!(set.len(), 64);
        prop_assert!(min_half_distance(&set) >= set.r_pack - 1e-12);
        let report = validate_delone(&set, set.r_pack / 2.0).unwrap();
        prop_assert!(report.pass);
    }

    #[test]
    fn hardcore_patterns_validate(seed in 0u64..1000, min_dist in 0.6f64..1.0) {
        let set = gen_hardcore_random(&Window::cube(2, 0.0, 8.0), min_dist, 2.0 * min_dist, seed, 200_000).unwrap();
        prop_assert!(min_half_distance(&set) >= min_dist / 2.0 - 1e-12);
        prop_assert!(validate_delone(&set, set.r_pack / 2.0).unwrap().pass);
    }

    #[test]
    fn generation_is_reproducible(seed in 0u64..1000) {
        let w = Window::cube(2, 0.0, 6.0);
        prop_assert_eq!(
            gen_hardcore_random(&w, 0.8, 1.6, seed, 100_000).unwrap(),
            gen_hardcore_random(&w, 0.8, 1.6, seed, 100_000).unwrap()
        );
    }
}

#[test]
fn fibonacci_gaps_and_density() {
    let set = gen_cut_and_project(CutProjectModel::Fibonacci1d, &Window::cube(1, 0.0, 400.0)).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    for w in set.points.windows(2) {
        let gap = w[1].0[0] - w[0].0[0];
        assert!((gap - 1.0).abs() < 1e-9 || (gap - golden).abs() < 1e-9, "gap {gap}");
    }
    let density = set.len() as f64 / 400.0;
    assert!((density - 1.0 / (3.0 - golden)).abs() < 0.01, "{density}");
}

#[test]
fn ammann_beenker_is_delone() {
    let set = gen_cut_and_project(CutProjectModel::AmmannBeenker2d, &Window::cube(2, -8.0, 8.0)).unwrap();
    assert!(min_half_distance(&set) >= set.r_pack);
    assert!(validate_delone(&set, set.r_pack / 2.0).unwrap().pass);
}

#[test]
fn torus_patterns_close_up() {
    let w = Window::cube(2, 0.0, 12.0);
    let set = gen_hardcore_random_torus(&w, 0.8, 1.6, 9, 500_000).unwrap();
    assert_eq!(set.period, Some(vec![12.0, 12.0]));
    // hard core across the seam
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            let d: f64 = set
                .point(i)
                .iter()
                .zip(set.point(j))
                .map(|(a, b)| {
                    let x = (a - b).rem_euclid(12.0);
                    x.min(12.0 - x).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(d >= 0.8 - 1e-12);
        }
    }
}

#[test]
fn product_indexing() {
    let a = lattice(1, 4);
    let b = gen_cut_and_project(CutProjectModel::Fibonacci1d, &Window::cube(1, 0.0, 5.0)).unwrap();
    let p = product_delone(&a, &b).unwrap();
    assert_eq!(p.len(), a.len() * b.len());
    for i in 0..a.len() {
        for k in 0..b.len() {
            assert_eq!(p.point(i * b.len() + k), &[a.point(i)[0], b.point(k)[0]]);
        }
    }
}

#[test]
fn point_set_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let set = amorphous(2, 6.0, 4).as_ref().clone().with_period(vec![6.0, 6.0]);
    let set = set.unwrap_or_else(|_| amorphous(2, 6.0, 4).as_ref().clone());
    let path = dir.path().join("pts.csv");
    write_point_set(&set, &path).unwrap();
    assert_eq!(read_point_set(&path).unwrap(), set);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(gen_periodic(&[vec![1.0, 0.0], vec![2.0, 0.0]], &Window::cube(2, 0.0, 3.0)).is_err());
    assert!(gen_hardcore_random(&Window::cube(2, 0.0, 3.0), 1.0, 0.9, 0, 100).is_err());
    assert!(Window::new(vec![0.0], vec![1.0, 2.0]).is_err());
    assert!(gen_perturbed_lattice(&unit_basis(1), &Window::cube(1, 0.0, 5.0), 0.6, 0).is_err());
}
