use std::collections::BTreeMap;

use faer::{c64, Mat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::groupoid::BlockOperator;
use crate::linalg::{Block, ZERO};
use crate::roe::support_stats;
use crate::spectral::{eigenvalues, min_abs_eigenvalue, Factorization, Gap, Inertia, COLLISION_TOL};

/// Relative default for the margin threshold: `margin_min = 1e-3 · ‖H‖`.
pub const DEFAULT_MARGIN_FRACTION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexStatus {
    Ok,
    Unreliable,
    GapClosed,
}

/// How the signature and the margin of the localizer are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Full Hermitian eigensolve.
    Eig,
    /// Bunch–Kaufman inertia for the signature, shift-invert Lanczos for the margin.
    Inertia,
    /// `Eig` up to [`AUTO_EIG_LIMIT`] rows, `Inertia` above.
    #[default]
    Auto,
}

pub const AUTO_EIG_LIMIT: usize = 1200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizerOptions {
    /// Absolute margin threshold; `None` means `1e-3` times the Schur bound of `H`.
    pub margin_min: Option<f64>,
    pub solver: Solver,
    pub lanczos_steps: usize,
}

impl Default for LocalizerOptions {
    fn default() -> Self {
        LocalizerOptions { margin_min: None, solver: Solver::Auto, lanczos_steps: 80 }
    }
}

/// Which pairing to evaluate.
#[derive(Clone, Debug, PartialEq)]
pub enum Pairing {
    /// Class A in two dimensions.
    Even,
    /// Class AIII in one dimension, with the on-site chiral grading.
    Odd { grading: Block },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub index: Option<i64>,
    pub half_signature: f64,
    /// Smallest `|λ|` of the localizer.
    pub margin: f64,
    pub margin_min: f64,
    pub kappa: f64,
    pub x0: Vec<f64>,
    pub mu: f64,
    pub oracles: BTreeMap<String, f64>,
    pub status: IndexStatus,
    pub localizer_dim: usize,
}

impl IndexResult {
    pub fn is_valid(&self) -> bool {
        self.status == IndexStatus::Ok
    }

    /// The integer, or `LocalizerUnreliable` when the margin was too small.
    pub fn require(&self) -> Result<i64> {
        self.index.ok_or(Error::LocalizerUnreliable { margin: self.margin, threshold: self.margin_min })
    }
}

/// `κ = 0.1 · gap / radius`.
pub fn default_kappa(gap_width: f64, window_radius: f64) -> f64 {
    0.1 * gap_width / window_radius
}

fn check_gap(gap: Option<&Gap>, mu: f64) -> Result<()> {
    if let Some(g) = gap {
        if !(g.below < mu && mu < g.above) || g.distance(mu) <= COLLISION_TOL {
            let nearest = if mu - g.below < g.above - mu { g.below } else { g.above };
            return Err(Error::GapUndefined { mu, nearest, width: g.width });
        }
    }
    Ok(())
}

/// `½ sig L_κ` for the even or odd localizer of `h` at `(μ, x₀)`.
///
/// `gap`, when given, is the bulk gap of `h` around `μ`; a closed gap is an
/// error. A margin at or below the threshold yields `status = unreliable`
/// and no integer.
pub fn localizer_index(
    h: &BlockOperator,
    pairing: &Pairing,
    mu: f64,
    x0: &[f64],
    kappa: f64,
    gap: Option<&Gap>,
    opts: &LocalizerOptions,
) -> Result<IndexResult> {
    if h.periodic {
        return Err(invalid("localizer needs an open-window operator"));
    }
    if x0.len() != h.sites.dim {
        return Err(invalid("base point has the wrong dimension"));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid(format!("kappa must be positive, got {kappa}")));
    }
    check_gap(gap, mu)?;
    let localizer = localizer_matrix(h, pairing, mu, x0, kappa)?;
    let margin_min = opts.margin_min.unwrap_or_else(|| DEFAULT_MARGIN_FRACTION * support_stats(h).schur_bound());
    let n = localizer.nrows();
    let use_eig = match opts.solver {
        Solver::Eig => true,
        Solver::Inertia => false,
        Solver::Auto => n <= AUTO_EIG_LIMIT,
    };
    let (inertia, margin) = if n == 0 {
        (Inertia { positive: 0, negative: 0, zero: 0 }, f64::INFINITY)
    } else if use_eig {
        let ev = eigenvalues(&localizer)?;
        (Inertia::from_eigenvalues(&ev), ev.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min))
    } else {
        let fact = Factorization::new(&localizer)?;
        (fact.inertia(), min_abs_eigenvalue(&fact, opts.lanczos_steps))
    };
    let half_signature = inertia.signature() as f64 / 2.0;
    let integral = (half_signature - half_signature.round()).abs() <= 0.01;
    let ok = margin > margin_min && inertia.zero == 0 && integral;
    Ok(IndexResult {
        index: ok.then(|| half_signature.round() as i64),
        half_signature,
        margin,
        margin_min,
        kappa,
        x0: x0.to_vec(),
        mu,
        oracles: BTreeMap::new(),
        status: if ok { IndexStatus::Ok } else { IndexStatus::Unreliable },
        localizer_dim: n,
    })
}

/// Dense localizer `L_κ` for the given pairing.
pub fn localizer_matrix(h: &BlockOperator, pairing: &Pairing, mu: f64, x0: &[f64], kappa: f64) -> Result<Mat<c64>> {
    match pairing {
        Pairing::Even => {
            if h.sites.dim != 2 {
                return Err(invalid("the even localizer is implemented for d = 2"));
            }
            Ok(even_localizer(h, mu, x0, kappa))
        }
        Pairing::Odd { grading } => {
            if h.sites.dim != 1 {
                return Err(invalid("the odd localizer is implemented for d = 1"));
            }
            if mu != 0.0 {
                return Err(invalid("chiral pairing requires mu = 0"));
            }
            odd_localizer(h, grading, x0, kappa)
        }
    }
}

/// `[[H - μ, κ D₋], [κ D₋†, -(H - μ)]]` with `D₋ = (X₁ - x₀₁) - i (X₂ - x₀₂)`.
fn even_localizer(h: &BlockOperator, mu: f64, x0: &[f64], kappa: f64) -> Mat<c64> {
    let hd = h.to_dense();
    let m = hd.nrows();
    let nb = h.block_dim;
    let mut l = Mat::<c64>::zeros(2 * m, 2 * m);
    for j in 0..m {
        for i in 0..m {
            let v = hd[(i, j)];
            l[(i, j)] = v;
            l[(m + i, m + j)] = -v;
        }
    }
    for i in 0..h.sites.len() {
        let p = h.sites.point(i);
        let d = c64::new(kappa * (p[0] - x0[0]), -kappa * (p[1] - x0[1]));
        for r in 0..nb {
            let k = i * nb + r;
            l[(k, k)] -= c64::new(mu, 0.0);
            l[(m + k, m + k)] += c64::new(mu, 0.0);
            l[(k, m + k)] = d;
            l[(m + k, k)] = d.conj();
        }
    }
    l
}

/// `[[κ(X - x₀), A], [A†, -κ(X - x₀)]]` in the chiral basis `H = [[0, A], [A†, 0]]`.
fn odd_localizer(h: &BlockOperator, grading: &Block, x0: &[f64], kappa: f64) -> Result<Mat<c64>> {
    let nb = h.block_dim;
    if grading.dim() != nb {
        return Err(invalid("grading must match the block size"));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for r in 0..nb {
        for c in 0..nb {
            if r != c && grading.get(r, c) != ZERO {
                return Err(invalid("grading must be diagonal"));
            }
        }
        match grading.get(r, r).re {
            v if v == 1.0 => plus.push(r),
            v if v == -1.0 => minus.push(r),
            _ => return Err(invalid("grading entries must be ±1")),
        }
    }
    for (&(i, j), b) in h.iter() {
        if grading.mul(b).mul(grading) != b.scale_re(-1.0) {
            return Err(Error::SymmetryViolation(format!("block ({i}, {j}) does not anticommute with the grading")));
        }
    }
    let sites = h.sites.len();
    let (np, nm) = (sites * plus.len(), sites * minus.len());
    let mut l = Mat::<c64>::zeros(np + nm, np + nm);
    for i in 0..sites {
        let x = kappa * (h.sites.point(i)[0] - x0[0]);
        for k in 0..plus.len() {
            l[(i * plus.len() + k, i * plus.len() + k)] = c64::new(x, 0.0);
        }
        for k in 0..minus.len() {
            l[(np + i * minus.len() + k, np + i * minus.len() + k)] = c64::new(-x, 0.0);
        }
    }
    for (&(i, j), b) in h.iter() {
        for (kp, &rp) in plus.iter().enumerate() {
            for (km, &rm) in minus.iter().enumerate() {
                let row = i * plus.len() + kp;
                let col = np + j * minus.len() + km;
                // plus-row/minus-column entries of H form A; the mirrored ones form A†
                let v = b.get(rp, rm);
                if v != ZERO {
                    l[(row, col)] = v;
                    l[(col, row)] = v.conj();
                }
            }
        }
    }
    Ok(l)
}

/// One localizer evaluation per `κ`, run on the current rayon pool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaSweep {
    pub results: Vec<IndexResult>,
    /// Set iff at least one result is valid and all valid ones agree.
    pub plateau: bool,
    pub index: Option<i64>,
}

pub fn kappa_stability(
    h: &BlockOperator,
    pairing: &Pairing,
    mu: f64,
    x0: &[f64],
    kappas: &[f64],
    gap: Option<&Gap>,
    opts: &LocalizerOptions,
) -> Result<KappaSweep> {
    if kappas.is_empty() {
        return Err(invalid("kappa list is empty"));
    }
    let results: Vec<IndexResult> = kappas
        .par_iter()
        .map(|&k| localizer_index(h, pairing, mu, x0, k, gap, opts))
        .collect::<Result<_>>()?;
    let valid: Vec<i64> = results.iter().filter_map(|r| r.index).collect();
    let plateau = !valid.is_empty() && valid.iter().all(|v| *v == valid[0]);
    Ok(KappaSweep { index: plateau.then(|| valid[0]), plateau, results })
}
