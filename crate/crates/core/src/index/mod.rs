//! Position Dirac operators and integer index pairings.
//!
//! The pairing of a gapped Hamiltonian with the position Dirac operator is
//! computed as the half-signature of the finite-volume spectral localizer.
//! Kitaev's real-space formula and Bloch-space oracles (lattice field
//! strength, winding of `det A(k)`) serve as independent checks.

mod bloch;
mod dirac;
mod kitaev;
mod localizer;

pub use bloch::{bloch_chern_fhs, bloch_winding, BlochFamily};
pub use dirac::{position_dirac, PositionDirac};
pub use kitaev::{angular_sectors, kitaev_chern, Sectors};
pub use localizer::{
    default_kappa, kappa_stability, localizer_index, localizer_matrix, IndexResult, IndexStatus, KappaSweep, LocalizerOptions,
    Pairing, Solver, AUTO_EIG_LIMIT, DEFAULT_MARGIN_FRACTION,
};
