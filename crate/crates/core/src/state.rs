//! Density matrices on the zero-plus-one-excitation subspace and their
//! row-major vectorized form.
//!
//! Basis order is fixed everywhere: the N single-excitation site states first
//! (then the non-interacting qubit's excitation state, when present), and the
//! all-ground "vacuum" state LAST. The flattening convention is row-major:
//! entry (i, j) of a d x d matrix lands at vector position i*d + j (0-based),
//! so the vacuum population sits at the final vector position.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::C64;

/// Vector position of matrix entry (i, j) under row-major flattening.
#[inline]
pub fn sup_index(i: usize, j: usize, d: usize) -> usize {
    i * d + j
}

/// Flatten a square matrix row-major into a length d^2 vector.
pub fn vectorize(rho: &Array2<C64>) -> Result<Array1<C64>> {
    let (r, c) = rho.dim();
    if r != c {
        return Err(Error::Shape(format!("vectorize needs a square matrix, got {r}x{c}")));
    }
    let mut v = Array1::zeros(r * c);
    for i in 0..r {
        for j in 0..c {
            v[sup_index(i, j, c)] = rho[[i, j]];
        }
    }
    Ok(v)
}

/// Rebuild the d x d matrix from its row-major flattening; the length must be
/// a perfect square.
pub fn devectorize(v: &Array1<C64>) -> Result<Array2<C64>> {
    let len = v.len();
    let d = (len as f64).sqrt().round() as usize;
    if d * d != len {
        return Err(Error::Shape(format!("devectorize: length {len} is not a perfect square")));
    }
    let mut rho = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            rho[[i, j]] = v[sup_index(i, j, d)];
        }
    }
    Ok(rho)
}

/// Density matrix restricted to the zero-plus-one-excitation subspace.
///
/// The matrix is d x d with the vacuum at index d-1. Physical inputs are
/// Hermitian, unit trace, positive semidefinite; evolution preserves these up
/// to roundoff, which [`SubspaceState::trace`] and
/// [`SubspaceState::hermiticity_error`] let callers audit.
#[derive(Debug, Clone)]
pub struct SubspaceState {
    rho: Array2<C64>,
}

impl SubspaceState {
    /// Wrap an existing d x d matrix (d >= 2: at least one site plus vacuum).
    pub fn from_density(rho: Array2<C64>) -> Result<Self> {
        let (r, c) = rho.dim();
        if r != c {
            return Err(Error::Shape(format!("state matrix must be square, got {r}x{c}")));
        }
        if r < 2 {
            return Err(Error::Shape("state needs at least one site plus vacuum".into()));
        }
        Ok(Self { rho })
    }

    /// Rebuild from a row-major flattened vector.
    pub fn from_vector(v: &Array1<C64>) -> Result<Self> {
        Self::from_density(devectorize(v)?)
    }

    /// Pure state from subspace amplitudes: rho = |psi><psi| with
    /// psi = sum of amp * |index>. Indices must be in range and distinct.
    pub fn from_amplitudes(d: usize, amps: &[(usize, C64)]) -> Result<Self> {
        if d < 2 {
            return Err(Error::Shape("state needs at least one site plus vacuum".into()));
        }
        let mut psi = Array1::<C64>::zeros(d);
        for &(idx, a) in amps {
            if idx >= d {
                return Err(Error::Index(format!("amplitude index {idx} out of range for dim {d}")));
            }
            psi[idx] += a;
        }
        let mut rho = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                rho[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        Self::from_density(rho)
    }

    /// The vacuum state (all spins down).
    pub fn vacuum(d: usize) -> Result<Self> {
        Self::from_amplitudes(d, &[(d - 1, C64::new(1.0, 0.0))])
    }

    /// Subspace dimension d.
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// The density matrix.
    pub fn density(&self) -> &Array2<C64> {
        &self.rho
    }

    /// Row-major flattened form.
    pub fn vector(&self) -> Array1<C64> {
        vectorize(&self.rho).expect("stored matrix is square")
    }

    /// Trace (complex; imaginary part is roundoff for physical states).
    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.rho[[i, i]]).sum()
    }

    /// Deviation from Hermiticity, `max |rho - rho^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        crate::linalg::hermiticity_error(&self.rho)
    }
}

/// Encode the Bloch-sphere input cos(theta/2)|vac> + e^{i phi} sin(theta/2)|m>
/// on an N-site network (no non-interacting qubit), with m a 1-based site.
///
/// The resulting flattened state has exactly four nonzero entries: the site-m
/// population sin^2(theta/2), the vacuum population cos^2(theta/2), and the
/// site-vacuum coherence pair (e^{+-i phi} sin theta)/2.
pub fn encode_input(n_sites: usize, m: usize, theta: f64, phi: f64) -> Result<SubspaceState> {
    if n_sites < 1 {
        return Err(Error::Argument("need at least one site".into()));
    }
    if m < 1 || m > n_sites {
        return Err(Error::Index(format!("input site {m} out of 1..={n_sites}")));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Argument(format!("theta {theta} outside [0, pi]")));
    }
    if !(0.0..std::f64::consts::TAU).contains(&phi) {
        return Err(Error::Argument(format!("phi {phi} outside [0, 2 pi)")));
    }
    let d = n_sites + 1;
    let site_amp = C64::from_polar((theta / 2.0).sin(), phi);
    let vac_amp = C64::new((theta / 2.0).cos(), 0.0);
    SubspaceState::from_amplitudes(d, &[(m - 1, site_amp), (d - 1, vac_amp)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn index_rule_row_major() {
        // for d=3, 1-based position 6 holds rho_{2,3}
        assert_eq!(sup_index(1, 2, 3), 5);
        let mut rho = Array2::<C64>::zeros((3, 3));
        rho[[1, 2]] = C64::new(0.25, -0.5);
        let v = vectorize(&rho).unwrap();
        assert_eq!(v[5], C64::new(0.25, -0.5));
    }

    #[test]
    fn identity_flattens_to_diagonal_positions() {
        let rho = Array2::<C64>::eye(2).mapv(|z| z * C64::new(0.5, 0.0));
        let v = vectorize(&rho).unwrap();
        let want = [0.5, 0.0, 0.0, 0.5];
        for (k, w) in want.iter().enumerate() {
            assert_abs_diff_eq!(v[k].re, *w, epsilon = 0.0);
            assert_abs_diff_eq!(v[k].im, 0.0, epsilon = 0.0);
        }
    }

    #[test]
    fn roundtrip_exact() {
        let mut rho = Array2::<C64>::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                rho[[i, j]] = C64::new(i as f64 + 0.1, j as f64 - 0.7);
            }
        }
        let back = devectorize(&vectorize(&rho).unwrap()).unwrap();
        assert_eq!(rho, back);
    }

    #[test]
    fn devectorize_rejects_non_square_length() {
        let v = Array1::<C64>::zeros(5);
        assert!(devectorize(&v).is_err());
    }

    #[test]
    fn vectorize_rejects_rectangular() {
        let rho = Array2::<C64>::zeros((2, 3));
        assert!(vectorize(&rho).is_err());
    }

    #[test]
    fn encode_equator_input_n2() {
        // N=2, m=1, theta=pi/2, phi=0: entries 0.5 at 1-based positions 1, 3, 7, 9
        let s = encode_input(2, 1, FRAC_PI_2, 0.0).unwrap();
        let v = s.vector();
        for (pos1, want) in [(1usize, 0.5), (3, 0.5), (7, 0.5), (9, 0.5)] {
            assert_abs_diff_eq!(v[pos1 - 1].re, want, epsilon = 1e-15);
            assert_abs_diff_eq!(v[pos1 - 1].im, 0.0, epsilon = 1e-15);
        }
        let total: f64 = v.iter().map(|z| z.norm()).sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn encode_pure_excitation() {
        // theta=pi puts everything on the site population
        let s = encode_input(5, 3, PI, 0.0).unwrap();
        let v = s.vector();
        assert_abs_diff_eq!(v[sup_index(2, 2, 6)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[sup_index(5, 5, 6)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn encode_vacuum_input() {
        let s = encode_input(4, 2, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(s.density()[[4, 4]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn encode_validates_ranges() {
        assert!(encode_input(3, 0, 1.0, 0.0).is_err());
        assert!(encode_input(3, 4, 1.0, 0.0).is_err());
        assert!(encode_input(3, 1, -0.1, 0.0).is_err());
        assert!(encode_input(3, 1, 1.0, 7.0).is_err());
    }

    #[test]
    fn phase_lands_on_coherence() {
        let phi = 1.2345;
        let s = encode_input(2, 1, FRAC_PI_2, phi).unwrap();
        // rho_{m,vac} = e^{i phi} sin(theta)/2
        let z = s.density()[[0, 2]];
        assert_abs_diff_eq!(z.re, 0.5 * phi.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.5 * phi.sin(), epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn prop_roundtrip(seed in 0u64..1000) {
            let d = 2 + (seed % 4) as usize;
            let mut rho = Array2::<C64>::zeros((d, d));
            let mut x = seed as f64 + 0.5;
            for i in 0..d {
                for j in 0..d {
                    x = (x * 1103.515245 + 12.345) % 97.0;
                    rho[[i, j]] = C64::new(x, -x / 3.0);
                }
            }
            let back = devectorize(&vectorize(&rho).unwrap()).unwrap();
            prop_assert_eq!(rho, back);
        }

        #[test]
        fn prop_encode_unit_trace(theta in 0.0..PI, phi in 0.0..6.28, m in 1usize..6, n in 6usize..9) {
            let s = encode_input(n, m, theta, phi).unwrap();
            prop_assert!((s.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(s.hermiticity_error() < 1e-15);
        }
    }
}
