#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use delone_topo::geometry::{gen_hardcore_random, gen_periodic, DeloneSet, Window};

pub fn unit_basis(d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|a| (0..d).map(|b| if a == b { 1.0 } else { 0.0 }).collect()).collect()
}

/// `ℤ^d ∩ [0, n-1]^d`.
pub fn lattice(d: usize, n: usize) -> DeloneSet {
    gen_periodic(&unit_basis(d), &Window::cube(d, 0.0, n as f64 - 1.0)).unwrap()
}

/// Same patch closed into a torus of period `n`.
pub fn torus(d: usize, n: usize) -> DeloneSet {
    lattice(d, n).with_period(vec![n as f64; d]).unwrap()
}

pub fn amorphous(d: usize, side: f64, seed: u64) -> Arc<DeloneSet> {
    Arc::new(gen_hardcore_random(&Window::cube(d, 0.0, side), 0.8, 1.6, seed, 1_000_000).unwrap())
}

pub fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
