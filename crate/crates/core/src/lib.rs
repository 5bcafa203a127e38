//! Localizable multipartite entanglement (LME) and multipartite entanglement
//! of assistance (MEA) for small multi-qubit pure states.
//!
//! Qubit 0 is always the most significant bit of a basis index. The measured
//! subsystem is called `A`, the kept subsystem `B`.

pub mod error;
pub mod graph_states;
pub mod haar;
pub mod io;
pub mod localization;
pub mod measures;
pub mod quantum_core;
pub mod spin_chain;
pub mod swarm;

pub use error::{Error, Result};
pub use localization::{Ensemble, GlobalBasis, LocalBasisParams};
pub use measures::MeasureKind;
pub use quantum_core::{DensityOperator, StateVector, SubsystemMask, C64};
pub use swarm::{BoxBounds, PsoConfig};
