//! Time evolution by exact diagonalization of the superoperator.
//!
//! The generator L is decomposed once as L = M E M^-1; the propagator at any
//! time is then U(t) = M exp(E t) M^-1 with a diagonal exponential. When M is
//! too ill-conditioned to invert reliably the propagator falls back to a
//! scaling-and-squaring matrix exponential of L t per time point.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::lindblad::Generator;
use crate::linalg::{eig, expm, inverse, one_norm};
use crate::state::SubspaceState;
use crate::C64;

/// Default bound on cond_1(M) above which diagonalization is not trusted.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e12;

/// Eigendecomposition of the generator, eigenvectors in columns.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub values: Array1<C64>,
    pub vectors: Array2<C64>,
    pub inverse: Array2<C64>,
    /// cond_1 of the eigenvector matrix.
    pub condition: f64,
}

/// Which evaluation strategy the propagator settled on.
#[derive(Debug, Clone)]
pub enum PropagatorPath {
    Diagonalized(Spectral),
    MatrixExponential,
}

/// Evaluates U(t) and applies it to states.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: Array2<C64>,
    subspace_dim: usize,
    path: PropagatorPath,
}

enum PreparedData {
    /// M^-1 rho0_vec, so rho_vec(t) = M (exp(E t) .* y).
    Diag(Array1<C64>),
    /// rho0_vec itself, multiplied by a fresh exponential per time point.
    Exp(Array1<C64>),
}

/// A fixed initial state pushed through the eigenbasis once, so that each
/// time point costs O(d^2) instead of a full matrix product.
pub struct Prepared<'a> {
    prop: &'a Propagator,
    data: PreparedData,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("time {t} is not finite")))
    }
}

impl Propagator {
    /// Diagonalize with the default condition guard.
    pub fn new(generator: &Generator) -> Result<Propagator> {
        Propagator::with_condition_limit(generator, DEFAULT_CONDITION_LIMIT)
    }

    /// Diagonalize, falling back to matrix exponentials when cond_1 of the
    /// eigenvector matrix reaches `limit`.
    pub fn with_condition_limit(generator: &Generator, limit: f64) -> Result<Propagator> {
        if !(limit > 0.0) {
            return Err(Error::Argument(format!("condition limit {limit} must be > 0")));
        }
        let full = generator.full().clone();
        let path = match eig(&full) {
            Ok((values, vectors)) => match inverse(&vectors) {
                Ok(inv) => {
                    let condition = one_norm(&vectors) * one_norm(&inv);
                    if condition < limit {
                        PropagatorPath::Diagonalized(Spectral {
                            values,
                            vectors,
                            inverse: inv,
                            condition,
                        })
                    } else {
                        PropagatorPath::MatrixExponential
                    }
                }
                Err(_) => PropagatorPath::MatrixExponential,
            },
            Err(_) => PropagatorPath::MatrixExponential,
        };
        Ok(Propagator {
            generator: full,
            subspace_dim: generator.subspace_dim(),
            path,
        })
    }

    pub fn path(&self) -> &PropagatorPath {
        &self.path
    }

    pub fn spectral(&self) -> Option<&Spectral> {
        match &self.path {
            PropagatorPath::Diagonalized(s) => Some(s),
            PropagatorPath::MatrixExponential => None,
        }
    }

    pub fn subspace_dim(&self) -> usize {
        self.subspace_dim
    }

    /// The full propagator matrix U(t) on the vectorized space.
    pub fn matrix(&self, t: f64) -> Result<Array2<C64>> {
        check_time(t)?;
        match &self.path {
            PropagatorPath::Diagonalized(s) => {
                let mut scaled = s.vectors.clone();
                for (k, col) in scaled.columns_mut().into_iter().enumerate() {
                    let e = (s.values[k] * t).exp();
                    let mut col = col;
                    col.mapv_inplace(|z| z * e);
                }
                Ok(scaled.dot(&s.inverse))
            }
            PropagatorPath::MatrixExponential => {
                expm(&self.generator.mapv(|z| z * t))
            }
        }
    }

    /// One entry of U(t). O(d^2) on the diagonalized path.
    pub fn element(&self, row: usize, col: usize, t: f64) -> Result<C64> {
        check_time(t)?;
        let s2 = self.generator.nrows();
        if row >= s2 || col >= s2 {
            return Err(Error::Index(format!("({row}, {col}) out of {s2}x{s2}")));
        }
        match &self.path {
            PropagatorPath::Diagonalized(s) => {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..s2 {
                    acc += s.vectors[[row, k]] * (s.values[k] * t).exp() * s.inverse[[k, col]];
                }
                Ok(acc)
            }
            PropagatorPath::MatrixExponential => Ok(self.matrix(t)?[[row, col]]),
        }
    }

    /// Push one state to time t.
    pub fn evolve(&self, state: &SubspaceState, t: f64) -> Result<SubspaceState> {
        self.prepare(state)?.at(t)
    }

    /// Factor out the state-dependent work for a scan over times.
    pub fn prepare(&self, state: &SubspaceState) -> Result<Prepared<'_>> {
        if state.dim() != self.subspace_dim {
            return Err(Error::Shape(format!(
                "state dimension {} != propagator dimension {}",
                state.dim(),
                self.subspace_dim
            )));
        }
        let rho0 = state.vector();
        let data = match &self.path {
            PropagatorPath::Diagonalized(s) => PreparedData::Diag(s.inverse.dot(&rho0)),
            PropagatorPath::MatrixExponential => PreparedData::Exp(rho0),
        };
        Ok(Prepared { prop: self, data })
    }
}

impl Prepared<'_> {
    fn vector_at(&self, t: f64) -> Result<Array1<C64>> {
        check_time(t)?;
        match (&self.data, &self.prop.path) {
            (PreparedData::Diag(y), PropagatorPath::Diagonalized(s)) => {
                let z = Array1::from_iter(
                    y.iter().zip(s.values.iter()).map(|(yk, ek)| yk * (ek * t).exp()),
                );
                Ok(s.vectors.dot(&z))
            }
            (PreparedData::Exp(rho0), _) => Ok(self.prop.matrix(t)?.dot(rho0)),
            _ => Err(Error::Numeric("prepared data does not match path".into())),
        }
    }

    /// The state at time t.
    pub fn at(&self, t: f64) -> Result<SubspaceState> {
        SubspaceState::from_vector(&self.vector_at(t)?)
    }

    /// One component of the vectorized state at time t. O(d^2) on the
    /// diagonalized path.
    pub fn component(&self, index: usize, t: f64) -> Result<C64> {
        check_time(t)?;
        let s2 = self.prop.generator.nrows();
        if index >= s2 {
            return Err(Error::Index(format!("component {index} out of {s2}")));
        }
        match (&self.data, &self.prop.path) {
            (PreparedData::Diag(y), PropagatorPath::Diagonalized(s)) => {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..s2 {
                    acc += s.vectors[[index, k]] * (s.values[k] * t).exp() * y[k];
                }
                Ok(acc)
            }
            _ => Ok(self.vector_at(t)?[index]),
        }
    }
}
