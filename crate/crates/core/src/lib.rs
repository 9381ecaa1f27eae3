//! Entanglement-dimensionality certification from quantum Fisher information.
//!
//! The crate evaluates quantum Fisher information matrices of qudit states,
//! Schmidt-number witnesses built from their block structure, variance bounds
//! for collective spin observables, dimensionality vectors of multipartite
//! states and the corresponding multiparameter precision limits.

pub mod basis;
pub mod bounds;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod multipartite;
pub mod qfim;
pub mod random;
pub mod spin;
pub mod state_file;
pub mod states;
pub mod witnesses;

pub use basis::{gellmann_basis, BasisSet};
pub use error::{Error, Result};
pub use qfim::{covariance_matrix, qfi, qfim, qfim_blocks, trace_norm, QfimBlocks};
pub use spin::spin_operators;
pub use states::{
    ghz_state, mes_state, partial_trace, rho_s, schmidt_decompose, seven_qubit_state, Bipartition, DensityMatrix,
    PureState, SchmidtDecomposition,
};
