//! Dense states, reduced states and the linear algebra underneath them.

pub(crate) mod density;
pub mod linalg;
mod mask;
mod state;
mod takagi;

use std::sync::OnceLock;

pub use density::{
    partial_trace, subsystem_purity, wootters_tilde, wootters_tilde_density, wootters_tilde_state,
    DensityOperator, Reducible, Tilde,
};
pub use linalg::{
    fidelity, hermitian_eig, max_singular_value, pure_trace_distance, svd, trace_distance, trace_norm, Svd,
};
pub use mask::SubsystemMask;
pub use state::{tensor_product, StateFile, StateVector};
pub use takagi::{takagi_factorization, Takagi};

pub type C64 = num_complex::Complex64;

/// Default qubit limit for dense storage.
pub const DEFAULT_CAPACITY: usize = 20;
/// Hard ceiling accepted from `ENTLOC_CAPACITY`.
pub const MAX_CAPACITY: usize = 24;

static CAPACITY: OnceLock<usize> = OnceLock::new();

/// Largest register size accepted by constructors. Read once from the
/// `ENTLOC_CAPACITY` environment variable, clamped to [`MAX_CAPACITY`].
pub fn capacity() -> usize {
    *CAPACITY.get_or_init(|| {
        std::env::var("ENTLOC_CAPACITY")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map(|v| v.min(MAX_CAPACITY))
            .unwrap_or(DEFAULT_CAPACITY)
    })
}

pub(crate) fn check_capacity(n_qubits: usize) -> crate::error::Result<()> {
    let limit = capacity();
    if n_qubits > limit {
        return Err(crate::error::Error::Capacity { requested: n_qubits, limit });
    }
    Ok(())
}
