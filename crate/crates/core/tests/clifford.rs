use delone_topo::clifford::*;

#[test]
fn relations_hold_exactly_up_to_eight_generators() {
    for p in 0..=8 {
        for q in (if p == 0 { 1 } else { 0 })..=(8 - p) {
            let rep = build_rep(p, q).unwrap();
            let report = verify_relations(&rep);
            assert_eq!(report.max_residual, 0.0, "Cl_{{{p},{q}}}");
            assert!(report.relations_checked >= (p + q) * (p + q + 1) / 2);
        }
    }
}

#[test]
fn generators_square_to_their_signature() {
    let rep = build_rep(2, 3).unwrap();
    let id = RealMatrix::identity(rep.dim);
    for (k, g) in rep.generators().enumerate() {
        let expect = if k < 2 { id.clone() } else { id.scale(-1.0) };
        assert_eq!(g.mul(g), expect, "generator {k}");
    }
}

#[test]
fn grading_anticommutes_with_generators() {
    let rep = build_rep(3, 1).unwrap();
    let g = grading_operator(&rep);
    assert_eq!(g.mul(&g), RealMatrix::identity(rep.dim));
    for e in rep.generators() {
        assert_eq!(g.mul(e).add(&e.mul(&g)).max_abs(), 0.0);
    }
}

#[test]
fn spanning_ranks() {
    assert_eq!(spanning_rank(&build_rep(1, 1).unwrap()), 4);
    assert_eq!(spanning_rank(&build_rep(2, 0).unwrap()), 4);
    assert_eq!(spanning_rank(&build_rep(3, 0).unwrap()), 8);
}

#[test]
fn combination_squares_to_norm() {
    let rep = build_rep(3, 0).unwrap();
    let x = [0.3, -1.25, 2.0];
    let c = rep.gamma_combination(&x);
    let r2: f64 = x.iter().map(|v| v * v).sum();
    assert!(c.mul(&c).max_abs_diff(&RealMatrix::identity(rep.dim).scale(r2)) < 1e-14);
}

#[test]
fn too_many_generators() {
    assert!(build_rep(13, 0).is_err());
}
