//! Independent references the engine is checked against: analytic curves,
//! a spectral construction of the chain eigensystem, a Runge-Kutta
//! integrator, and a brute-force evolution in the full many-qubit space.
//!
//! Nothing here reuses the engine's generator assembly or its matrix
//! exponential, so agreement is evidence rather than tautology.

pub mod brute;
pub mod closed_form;
pub mod eigensystem;
pub mod rk4;

pub use brute::brute_force_evolve;
pub use eigensystem::{christandl_eigensystem, transfer_amplitude_spectral};
pub use rk4::rk4_evolve;
