use std::collections::BTreeMap;
use std::sync::Arc;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{norm, DeloneSet};
use crate::linalg::Block;

/// Operator on `ℓ²(sites) ⊗ ℂ^N` stored as sparse site blocks `T_{x,y}`.
///
/// Only nonzero blocks are stored. When `periodic` is set, displacements
/// between sites are measured on the torus closure of `sites`.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    pub sites: Arc<DeloneSet>,
    pub block_dim: usize,
    entries: BTreeMap<(usize, usize), Block>,
    pub hermitian: bool,
    pub periodic: bool,
}

impl BlockOperator {
    pub fn zero(sites: Arc<DeloneSet>, block_dim: usize, periodic: bool) -> Self {
        BlockOperator { sites, block_dim, entries: BTreeMap::new(), hermitian: true, periodic }
    }

    pub fn identity(sites: Arc<DeloneSet>, block_dim: usize) -> Self {
        let mut op = Self::zero(sites.clone(), block_dim, false);
        for i in 0..sites.len() {
            op.insert(i, i, Block::identity(block_dim));
        }
        op
    }

    /// `B ⊗ 1` placed on every site.
    pub fn on_site(sites: Arc<DeloneSet>, block: &Block) -> Self {
        let mut op = Self::zero(sites.clone(), block.dim(), false);
        for i in 0..sites.len() {
            op.insert(i, i, block.clone());
        }
        op.hermitian = block.max_abs_diff(&block.adjoint()) == 0.0;
        op
    }

    pub fn len_sites(&self) -> usize {
        self.sites.len()
    }

    /// Hilbert-space dimension `|sites| · N`.
    pub fn dim(&self) -> usize {
        self.sites.len() * self.block_dim
    }

    /// Stores `block` at `(i, j)`; zero blocks remove the entry.
    pub fn insert(&mut self, i: usize, j: usize, block: Block) {
        assert_eq!(block.dim(), self.block_dim, "block size mismatch");
        assert!(i < self.sites.len() && j < self.sites.len(), "site index out of range");
        if block.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), block);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Block> {
        self.entries.get(&(i, j))
    }

    /// Block at `(i, j)`, zero if absent.
    pub fn block(&self, i: usize, j: usize) -> Block {
        self.get(i, j).cloned().unwrap_or_else(|| Block::zeros(self.block_dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Block)> {
        self.entries.iter()
    }

    pub fn nnz_blocks(&self) -> usize {
        self.entries.len()
    }

    /// `x_j - x_i` in the operator's metric.
    pub fn displacement(&self, i: usize, j: usize) -> Vec<f64> {
        self.sites.displacement(i, j, self.periodic)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        norm(&self.displacement(i, j))
    }

    fn same_space(&self, other: &BlockOperator) -> Result<()> {
        let same_sites = Arc::ptr_eq(&self.sites, &other.sites) || self.sites.points == other.sites.points;
        if !same_sites || self.block_dim != other.block_dim || self.periodic != other.periodic {
            return Err(invalid("operators act on different spaces"));
        }
        Ok(())
    }

    pub fn add(&self, other: &BlockOperator) -> Result<BlockOperator> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (&(i, j), b) in &other.entries {
            let sum = match out.entries.get(&(i, j)) {
                Some(a) => a.add(b),
                None => b.clone(),
            };
            out.insert(i, j, sum);
        }
        out.hermitian = self.hermitian && other.hermitian;
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> BlockOperator {
        let mut out = self.clone();
        out.entries = self.entries.iter().map(|(k, b)| (*k, b.scale_re(s))).filter(|(_, b)| !b.is_zero()).collect();
        out
    }

    pub fn adjoint(&self) -> BlockOperator {
        let mut out = BlockOperator::zero(self.sites.clone(), self.block_dim, self.periodic);
        for (&(i, j), b) in &self.entries {
            out.entries.insert((j, i), b.adjoint());
        }
        out.hermitian = self.hermitian;
        out
    }

    /// Worst `‖T_{ij} - T_{ji}†‖_max` over stored pairs, with its location.
    pub fn hermiticity_defect(&self) -> (f64, (usize, usize)) {
        let mut worst = (0.0, (0, 0));
        for (&(i, j), b) in &self.entries {
            let r = b.max_abs_diff(&self.block(j, i).adjoint());
            if r > worst.0 {
                worst = (r, (i, j));
            }
        }
        worst
    }

    /// Verifies `T_{ji} = T_{ij}†` within `tol` and then makes it exact by
    /// copying the upper triangle onto the lower one.
    pub fn into_hermitian(mut self, tol: f64) -> Result<BlockOperator> {
        let (residual, (row, col)) = self.hermiticity_defect();
        if residual > tol {
            return Err(Error::KernelNotSelfAdjoint { row, col, residual });
        }
        let upper: Vec<((usize, usize), Block)> =
            self.entries.iter().filter(|((i, j), _)| i <= j).map(|(k, b)| (*k, b.clone())).collect();
        for ((i, j), b) in upper {
            if i == j {
                self.insert(i, i, b.add(&b.adjoint()).scale_re(0.5));
            } else {
                self.insert(j, i, b.adjoint());
            }
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Dense matrix in site ⊗ internal order.
    pub fn to_dense(&self) -> Mat<c64> {
        let n = self.block_dim;
        let mut m = Mat::<c64>::zeros(self.dim(), self.dim());
        for (&(i, j), b) in &self.entries {
            for r in 0..n {
                for c in 0..n {
                    m[(i * n + r, j * n + c)] = b.get(r, c);
                }
            }
        }
        m
    }

    /// Same blocks, displacements measured in the open window; entries that
    /// only exist through the torus seam (open distance above `max_range`) are dropped.
    pub fn opened(&self, max_range: f64) -> BlockOperator {
        let mut out = BlockOperator::zero(self.sites.clone(), self.block_dim, false);
        out.hermitian = self.hermitian;
        for (&(i, j), b) in &self.entries {
            let d = norm(&self.sites.displacement(i, j, false));
            if d <= max_range + crate::geometry::DIST_EPS {
                out.entries.insert((i, j), b.clone());
            }
        }
        out
    }

    /// Operator on a different site list with the same block structure.
    pub fn with_sites(&self, sites: Arc<DeloneSet>) -> Result<BlockOperator> {
        if sites.len() != self.sites.len() {
            return Err(invalid("replacement site list has a different length"));
        }
        Ok(BlockOperator { sites, ..self.clone() })
    }

    pub fn export(&self, sites_ref: &str) -> OperatorExport {
        OperatorExport {
            sites_ref: sites_ref.to_string(),
            n: self.block_dim,
            triplets: self.entries.iter().map(|(&(i, j), b)| (i, j, b.to_real_flat())).collect(),
        }
    }
}

/// JSON form `{sites_ref, N, triplets: [[i, j, [re, im, ...]], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorExport {
    pub sites_ref: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub triplets: Vec<(usize, usize, Vec<f64>)>,
}

impl OperatorExport {
    pub fn into_operator(self, sites: Arc<DeloneSet>) -> Result<BlockOperator> {
        let mut op = BlockOperator::zero(sites.clone(), self.n, false);
        for (i, j, flat) in self.triplets {
            if i >= sites.len() || j >= sites.len() {
                return Err(invalid(format!("triplet ({i}, {j}) is out of range")));
            }
            let b = Block::from_real_flat(self.n, &flat)
                .ok_or_else(|| invalid(format!("triplet ({i}, {j}) has the wrong length")))?;
            op.insert(i, j, b);
        }
        op.hermitian = op.hermiticity_defect().0 == 0.0;
        Ok(op)
    }
}
