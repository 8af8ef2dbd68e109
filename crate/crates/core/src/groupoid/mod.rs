//! Localized regular representation of pattern-equivariant kernels.
//!
//! A [`HoppingFunction`] `f(ω̃, a)` is turned into a [`BlockOperator`] on a
//! concrete point set `ω` through `⟨x|π_ω(f)|y⟩ = f(ω - x, y - x)`.

mod kernel;
mod models;
mod operator;
mod represent;
mod stacking;

pub use kernel::{HoppingFunction, KernelFn, ModelTag};
pub use models::{builtin_model, BUILTIN_MODELS};
pub use operator::{BlockOperator, OperatorExport};
pub use represent::{covariance_check, represent, represent_periodic, HERMITIAN_TOL};
pub use stacking::{stack_kernel, stack_operator};
