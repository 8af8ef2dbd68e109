use std::collections::BTreeMap;

use faer::c64;

use super::kernel::{HoppingFunction, ModelTag};
use crate::error::{invalid, Result};
use crate::geometry::{norm, LocalPattern, DIST_EPS};
use crate::linalg::{sigma_x, sigma_y, sigma_z, Block, ONE, ZERO};

pub const BUILTIN_MODELS: [&str; 4] = ["nn_laplacian", "dimer_chain_1d", "chiral_ssh_1d", "chern_2band_2d"];

/// Reads parameters against a list of `(name, default)` pairs, rejecting unknown names.
fn resolve(model: &str, given: &BTreeMap<String, f64>, known: &[(&str, f64)]) -> Result<BTreeMap<String, f64>> {
    if let Some(bad) = given.keys().find(|k| !known.iter().any(|(n, _)| n == k)) {
        let names: Vec<&str> = known.iter().map(|(n, _)| *n).collect();
        return Err(invalid(format!("model `{model}` has no parameter `{bad}` (expected one of {names:?})")));
    }
    let mut out = BTreeMap::new();
    for (name, default) in known {
        let v = given.get(*name).copied().unwrap_or(*default);
        if !v.is_finite() {
            return Err(invalid(format!("parameter `{name}` must be finite")));
        }
        out.insert(name.to_string(), v);
    }
    Ok(out)
}

/// Built-in models.
///
/// * `nn_laplacian` (any `dim`): `t · 1_N` for `|a| = 1`. Parameters `t = 1`, `orbitals = 1`.
/// * `dimer_chain_1d`: two orbitals `(A, B)` per site with on-site block
///   `[[m, t1], [t1, -m]]` and hopping `t2` from `B` to the `A` orbital of the
///   nearest right neighbor. Parameters `t1 = 0.5`, `t2 = 1`, `m = 0`, `range = 2`.
/// * `chiral_ssh_1d`: the chiral (`m = 0`) member of the above. The inter-site
///   hopping is `t2` across short gaps and `t2_long` across gaps longer than
///   `split`; on a chain with two gap lengths this is the gap-class
///   dimerization. Parameters `t1 = 0.5`, `t2 = 1`, `t2_long = t2`, `split = 1.3`,
///   `range = 2`. Grading `Γ = diag(1, -1)`.
/// * `chern_2band_2d`: on-site `M σ_z` and for `0 < |a| <= range`
///   `t(|a|)/2 · [-σ_z + i(cos φ σ_x + sin φ σ_y)]`, `φ = arg(a₁ + i a₂)`,
///   with `t(r) = t e^{-2(r-1)} c(r)/c(1)`, `c(r) = (1 - (r/range)²)²`.
///   On `ℤ²` with `range < √2` this reduces to the two-band model
///   `h(k) = -sin k₁ σ_x - sin k₂ σ_y + (M - t cos k₁ - t cos k₂) σ_z`.
///   Parameters `M = 1`, `t = 1`, `range = 2.2`.
pub fn builtin_model(name: &str, dim: usize, params: &BTreeMap<String, f64>) -> Result<HoppingFunction> {
    match name {
        "nn_laplacian" => {
            let p = resolve(name, params, &[("t", 1.0), ("orbitals", 1.0)])?;
            let t = p["t"];
            let orbitals = p["orbitals"];
            if orbitals < 1.0 || orbitals.fract() != 0.0 || orbitals > 64.0 {
                return Err(invalid("`orbitals` must be an integer in 1..=64"));
            }
            let n = orbitals as usize;
            HoppingFunction::new(dim, 1.0, 1.0, n, tag(name, p), move |_, a| {
                if (norm(a) - 1.0).abs() <= DIST_EPS {
                    Block::identity(n).scale_re(t)
                } else {
                    Block::zeros(n)
                }
            })
        }
        "dimer_chain_1d" | "chiral_ssh_1d" => {
            check_dim(name, dim, 1)?;
            let chiral = name == "chiral_ssh_1d";
            let p = if chiral {
                let t2 = params.get("t2").copied().unwrap_or(1.0);
                resolve(name, params, &[("t1", 0.5), ("t2", 1.0), ("t2_long", t2), ("split", 1.3), ("range", 2.0)])?
            } else {
                resolve(name, params, &[("t1", 0.5), ("t2", 1.0), ("m", 0.0), ("range", 2.0)])?
            };
            let (t1, t2) = (p["t1"], p["t2"]);
            let t2_long = p.get("t2_long").copied().unwrap_or(t2);
            let split = p.get("split").copied().unwrap_or(f64::INFINITY);
            let m = p.get("m").copied().unwrap_or(0.0);
            let range = p["range"];
            if !(range > 0.0) {
                return Err(invalid("`range` must be positive"));
            }
            let f = HoppingFunction::new(1, range, range, 2, tag(name, p.clone()), move |pattern, a| {
                chain_block(pattern, a[0], t1, t2, t2_long, split, m)
            })?;
            if chiral {
                f.with_grading(Block::diagonal(&[ONE, -ONE]))
            } else {
                Ok(f)
            }
        }
        "chern_2band_2d" => {
            check_dim(name, dim, 2)?;
            let p = resolve(name, params, &[("M", 1.0), ("t", 1.0), ("range", 2.2)])?;
            let (mass, t, range) = (p["M"], p["t"], p["range"]);
            if !(range > 1.0) {
                return Err(invalid("`range` must exceed 1"));
            }
            let c1 = cutoff(1.0, range);
            HoppingFunction::new(2, range, range, 2, tag(name, p), move |_, a| {
                let r = norm(a);
                if r <= DIST_EPS {
                    return sigma_z().scale_re(mass);
                }
                if r >= range {
                    return Block::zeros(2);
                }
                let amp = t * (-2.0 * (r - 1.0)).exp() * cutoff(r, range) / c1;
                // cos φ and sin φ as a/|a|, which flips sign bit-exactly under a -> -a
                let planar = sigma_x().scale_re(a[0] / r).add(&sigma_y().scale_re(a[1] / r));
                sigma_z().scale_re(-1.0).add(&planar.scale(c64::new(0.0, 1.0))).scale_re(amp / 2.0)
            })
        }
        other => Err(invalid(format!("unknown model `{other}` (built-ins: {})", BUILTIN_MODELS.join(", ")))),
    }
}

fn tag(name: &str, params: BTreeMap<String, f64>) -> ModelTag {
    ModelTag { name: name.to_string(), params }
}

fn check_dim(name: &str, dim: usize, want: usize) -> Result<()> {
    if dim != want {
        return Err(invalid(format!("model `{name}` lives in dimension {want}, not {dim}")));
    }
    Ok(())
}

fn cutoff(r: f64, range: f64) -> f64 {
    let s = 1.0 - (r / range).powi(2);
    s * s
}

/// Block of the two-orbital chain for displacement `a`, seen from a site whose
/// pattern is `pattern`. Only the on-site term and the two nearest neighbors
/// carry weight.
fn chain_block(pattern: &LocalPattern, a: f64, t1: f64, t2: f64, t2_long: f64, split: f64, m: f64) -> Block {
    if a.abs() <= DIST_EPS {
        return Block::from_rows(&[&[c64::new(m, 0.0), c64::new(t1, 0.0)], &[c64::new(t1, 0.0), c64::new(-m, 0.0)]]);
    }
    let xs = pattern.points.iter().map(|p| p.0[0]);
    let right = xs.clone().filter(|x| *x > DIST_EPS).fold(f64::INFINITY, f64::min);
    let left = xs.filter(|x| *x < -DIST_EPS).fold(f64::NEG_INFINITY, f64::max);
    let hop = |gap: f64| c64::new(if gap > split { t2_long } else { t2 }, 0.0);
    if (a - right).abs() <= DIST_EPS {
        // ⟨x, B| H |x + a, A⟩
        Block::from_rows(&[&[ZERO, ZERO], &[hop(a), ZERO]])
    } else if (a - left).abs() <= DIST_EPS {
        Block::from_rows(&[&[ZERO, hop(-a)], &[ZERO, ZERO]])
    } else {
        Block::zeros(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, DIST_EPS};

    fn pattern(points: &[&[f64]], radius: f64) -> LocalPattern {
        LocalPattern { dim: points[0].len(), radius, points: points.iter().map(|p| Point(p.to_vec())).collect() }
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(builtin_model("haldane", 2, &BTreeMap::new()).is_err());
        let bad = BTreeMap::from([("kapa".to_string(), 1.0)]);
        assert!(builtin_model("chern_2band_2d", 2, &bad).is_err());
        assert!(builtin_model("chern_2band_2d", 1, &BTreeMap::new()).is_err());
    }

    #[test]
    fn laplacian_entries() {
        let f = builtin_model("nn_laplacian", 2, &BTreeMap::new()).unwrap();
        let p = pattern(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]], 1.5);
        assert_eq!(f.eval(&p, &[1.0, 0.0]), Block::identity(1));
        assert!(f.eval(&p, &[1.0, 1.0]).is_zero());
        assert!(f.eval(&p, &[0.0, 0.0]).is_zero());
    }

    #[test]
    fn chern_kernel_involution() {
        let f = builtin_model("chern_2band_2d", 2, &BTreeMap::new()).unwrap();
        let p = pattern(&[&[0.0, 0.0], &[0.7, 1.1]], 2.2);
        let q = p.recentered(&[0.7, 1.1]);
        let fwd = f.eval(&p, &[0.7, 1.1]);
        let back = f.eval(&q, &[-0.7, -1.1]);
        assert!(fwd.max_abs_diff(&back.adjoint()) < 1e-15);
        assert!(!fwd.is_zero());
    }

    #[test]
    fn support_condition_on_random_probes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for name in BUILTIN_MODELS {
            let dim = if name == "chern_2band_2d" || name == "nn_laplacian" { 2 } else { 1 };
            let f = builtin_model(name, dim, &BTreeMap::new()).unwrap();
            for _ in 0..1000 {
                let len = f.range + 1e-6 + rng.random_range(0.0..3.0);
                let dir: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = norm(&dir).max(DIST_EPS);
                let a: Vec<f64> = dir.iter().map(|c| c / n * len).collect();
                let p = LocalPattern { dim, radius: len + 1.0, points: vec![Point::origin(dim), Point(a.clone())] };
                assert!(f.eval(&p, &a).is_zero(), "{name}");
            }
        }
    }
}
