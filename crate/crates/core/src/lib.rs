pub mod clifford;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod groupoid;
pub mod index;
pub mod linalg;
pub mod output;
pub mod roe;
pub mod spectral;

pub use error::{Error, Result};
