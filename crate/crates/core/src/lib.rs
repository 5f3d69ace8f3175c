//! Boundary-driven Lindbladians on finite bipartite systems.
//!
//! The crate builds generators `L = -i[H, ·] + D` whose dissipator acts on
//! one subsystem only, computes their stationary states and decides
//! uniqueness by several independent routes:
//!
//! - [`tensor`]: dense complex linear algebra (kron, partial traces, kernels)
//! - [`model`]: Hamiltonian splitting, jump sets and Liouvillian assembly
//! - [`steady`]: stationary states, the mean ergodic projector, product checks
//! - [`uniqueness`]: commutant tests, product closure, ergodic decomposition
//! - [`chain`]: the boundary-driven XX spin chain

pub mod chain;
pub mod error;
pub mod model;
pub mod random;
pub mod steady;
pub mod tensor;
pub mod uniqueness;

pub use error::{Error, Result};
pub use model::{
    apply_dissipator, assemble_liouvillian, cptp_check, decompose_hamiltonian, lift_local, reset_dissipator_jumps,
    CptpReport, HamiltonianDecomposition, JumpSet, Liouvillian,
};
pub use tensor::{kron, partial_trace, ComplexMatrix, CompositeDims, Subsystem, C64};

/// Default cap on the total Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 64;

/// Environment variable overriding [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "LINDBLADLAB_DIM_CAP";

/// Current dimension cap: `LINDBLADLAB_DIM_CAP` if set to a positive
/// integer, else [`DEFAULT_DIM_CAP`].
pub fn dim_cap() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_DIM_CAP)
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(Error::DimensionCap { dim, cap })
    } else {
        Ok(())
    }
}
