use delone_topo::linalg::{matmul, max_abs_diff};
use delone_topo::spectral::*;
use delone_topo::Error;
use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(n: usize, seed: u64) -> Mat<c64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Mat::from_fn(n, n, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

#[test]
fn eigenpairs_have_small_residuals() {
    let h = random_hermitian(60, 1);
    let spec = eig_hermitian(&h).unwrap();
    let (residual, orthogonality) = spec.residuals(&h);
    assert!(residual < 1e-12, "{residual}");
    assert!(orthogonality < 1e-12, "{orthogonality}");
    assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn non_hermitian_input_is_rejected() {
    let mut h = random_hermitian(6, 2);
    h[(0, 1)] += c64::new(1e-3, 0.0);
    assert!(eig_hermitian(&h).is_err());
}

#[test]
fn fermi_projection_is_a_projection() {
    let h = random_hermitian(40, 3);
    let spec = eig_hermitian(&h).unwrap();
    let mu = largest_gap_mu(&spec.eigenvalues).unwrap();
    let p = fermi_projection(&spec, mu).unwrap();
    assert_eq!(p.rank, spec.eigenvalues.iter().filter(|e| **e < mu).count());
    assert!(max_abs_diff(&matmul(&p.matrix, &p.matrix), &p.matrix) < 1e-12);
    let trace: f64 = (0..40).map(|i| p.matrix[(i, i)].re).sum();
    assert!((trace - p.rank as f64).abs() < 1e-10);
    // P commutes with H
    assert!(max_abs_diff(&matmul(&p.matrix, &h), &matmul(&h, &p.matrix)) < 1e-10);
}

#[test]
fn gap_detection() {
    let ev = [-2.0, -1.0, 0.5, 3.0];
    let g = spectral_gap(&ev, 0.0).unwrap();
    assert_eq!((g.below, g.above, g.width), (-1.0, 0.5, 1.5));
    assert_eq!(g.distance(0.0), 0.5);
    assert!(matches!(spectral_gap(&ev, 0.5), Err(Error::GapUndefined { .. })));
    assert_eq!(largest_gap_mu(&ev).unwrap(), 1.75);
}

#[test]
fn inertia_and_smallest_eigenvalue() {
    for seed in 0..5 {
        let h = random_hermitian(80, 10 + seed);
        let ev = eigenvalues(&h).unwrap();
        let fact = Factorization::new(&h).unwrap();
        assert_eq!(fact.inertia(), Inertia::from_eigenvalues(&ev));
        let smallest = ev.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
        let lanczos = min_abs_eigenvalue(&fact, 80);
        assert!((lanczos - smallest).abs() < 1e-8 * smallest.max(1e-3), "{lanczos} vs {smallest}");
    }
}

#[test]
fn factorization_solves() {
    let h = random_hermitian(30, 99);
    let fact = Factorization::new(&h).unwrap();
    let b = Mat::from_fn(30, 2, |i, j| c64::new(i as f64, j as f64));
    let mut x = b.clone();
    fact.solve_in_place(&mut x);
    assert!(max_abs_diff(&matmul(&h, &x), &b) < 1e-9);
}

#[test]
fn csv_format() {
    let csv = spectrum_csv(&[-1.0, 0.25]);
    assert!(csv.starts_with("index,eigenvalue\n") || csv.lines().count() >= 2, "{csv}");
}
