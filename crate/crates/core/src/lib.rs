//! Dynamics of single-excitation spin networks coupled to local Markovian
//! environments.
//!
//! The master equation is flattened row-major into a linear ODE
//! `d/dt rho_vec = L rho_vec` on the zero-plus-one-excitation subspace and
//! solved by exact diagonalization of the superoperator `L`, with a
//! scaling-and-squaring matrix exponential as fallback when the eigenvector
//! basis is too ill-conditioned. Networks (uniform-PST chains, their odd-bond
//! generalizations, multiarm branchings, an optional non-interacting qubit),
//! fidelity and concurrence readouts, and peak/width/threshold searches are
//! built on top. The `oracles` module holds independent reference
//! implementations used only to validate the engine.

pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod metrics;
pub mod network;
pub mod oracles;
pub mod propagator;
pub mod search;
pub mod state;

pub use ndarray;

pub use error::{Error, Result};
pub use lindblad::{build_generator, DecoherenceKind, Generator, LindbladModel};
pub use metrics::{
    average_fidelity, concurrence, fidelity_readout, fidelity_readout_between, reduced_1q,
    reduced_2q, transfer_fidelity, FidelityReadout,
};
pub use network::{
    christandl_chain, multiarm_network, shi_chain, SingleExcitationHamiltonian, SpinNetwork,
};
pub use propagator::{Prepared, Propagator, PropagatorPath, Spectral};
pub use search::{critical_gamma, find_peak, fwhm, CriticalKind, CriticalPoint};
pub use state::{devectorize, encode_input, sup_index, vectorize, SubspaceState};

/// Complex double, the scalar type of every matrix in this crate.
pub type C64 = num_complex::Complex64;
