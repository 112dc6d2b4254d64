//! Exact eigensystem of the uniform-transfer chain from its three-term
//! recursion. Energies are equally spaced and the eigenvector components
//! follow a polynomial recurrence, so no numerical diagonalization is needed.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

/// Beyond this length the leading coefficient 2^-((N-1)/2) loses too much
/// headroom for the recursion to stay trustworthy.
pub const MAX_SPECTRAL_N: usize = 60;

/// Energies E_k = -(N - 2k + 1) lambda and orthonormal eigenvectors of the
/// interacting block, row k holding the components of eigenvector k over
/// sites 1..N (all 1-based in the formulas, 0-based in the arrays).
pub fn christandl_eigensystem(n: usize, lambda: f64) -> Result<(Vec<f64>, Array2<f64>)> {
    if !(2..=MAX_SPECTRAL_N).contains(&n) {
        return Err(Error::Argument(format!(
            "spectral construction supports 2..={MAX_SPECTRAL_N} sites, got {n}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Argument(format!("coupling scale {lambda} must be positive")));
    }
    let energies: Vec<f64> = (1..=n).map(|k| -((n as f64) - 2.0 * k as f64 + 1.0) * lambda).collect();

    let mut c = Array2::<f64>::zeros((n, n));
    let fill_row = |c: &mut Array2<f64>, k: usize| {
        // scaled energy E_k / lambda
        let e = -((n as f64) - 2.0 * (k + 1) as f64 + 1.0);
        for m in 1..n {
            let nn = m + 1; // 1-based site of the component being filled
            let prev2 = if nn >= 3 {
                (((nn - 2) * (n - nn + 2)) as f64).sqrt() * c[[k, m - 2]]
            } else {
                0.0
            };
            c[[k, m]] = (e * c[[k, m - 1]] - prev2) / (((nn - 1) * (n - nn + 1)) as f64).sqrt();
        }
    };

    c[[0, 0]] = 2.0f64.powi(-(n as i32 - 1)).sqrt();
    fill_row(&mut c, 0);
    for k in 1..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[[k, 0]] = sign * c[[0, k]];
        fill_row(&mut c, k);
    }
    Ok((energies, c))
}

/// End-to-end amplitude sum_k c_k1 c_kN exp(-i E_k t) built from the
/// spectral data above.
pub fn transfer_amplitude_spectral(n: usize, lambda: f64, t: f64) -> Result<C64> {
    let (energies, c) = christandl_eigensystem(n, lambda)?;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let w = c[[k, 0]] * c[[k, n - 1]];
        acc += C64::from_polar(w, -energies[k] * t);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::christandl_chain;
    use crate::oracles::closed_form;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn energies_are_equally_spaced() {
        let (e, _) = christandl_eigensystem(6, 0.7).unwrap();
        for k in 0..6 {
            assert_abs_diff_eq!(e[k], -(5.0 - 2.0 * k as f64) * 0.7, epsilon = 1e-14);
        }
    }

    #[test]
    fn rows_are_orthonormal() {
        for n in [2usize, 3, 5, 9, 14] {
            let (_, c) = christandl_eigensystem(n, 1.0).unwrap();
            for k in 0..n {
                for l in 0..n {
                    let dot: f64 = (0..n).map(|m| c[[k, m]] * c[[l, m]]).sum();
                    let want = if k == l { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(dot, want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rows_solve_the_eigenproblem() {
        for n in [3usize, 4, 7, 11] {
            let net = christandl_chain(n, 1.3).unwrap();
            let h = net.hamiltonian();
            let (e, c) = christandl_eigensystem(n, 1.3).unwrap();
            for k in 0..n {
                for row in 0..n {
                    let mut hv = 0.0;
                    for m in 0..n {
                        hv += h.matrix()[[row, m]].re * c[[k, m]];
                    }
                    assert_abs_diff_eq!(hv, e[k] * c[[k, row]], epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn mirror_symmetry_alternates_with_k() {
        for n in [3usize, 6, 10] {
            let (_, c) = christandl_eigensystem(n, 1.0).unwrap();
            for k in 0..n {
                let sign = if (n + k + 1) % 2 == 0 { 1.0 } else { -1.0 };
                for m in 0..n {
                    assert_abs_diff_eq!(c[[k, n - 1 - m]], sign * c[[k, m]], epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn spectral_amplitude_matches_trigonometric_form() {
        for n in [2usize, 3, 5, 8] {
            for &t in &[0.0, 0.31, 1.0, FRAC_PI_2, 2.9] {
                let a = transfer_amplitude_spectral(n, 1.0, t).unwrap();
                let b = closed_form::transfer_amplitude(n, 1.0, t).unwrap();
                assert!((a - b).norm() < 1e-12, "n={n} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn perfect_arrival_at_large_n() {
        for n in [20usize, 30, 45, 60] {
            let a = transfer_amplitude_spectral(n, 1.0, FRAC_PI_2).unwrap();
            assert!(
                (a.norm() - 1.0).abs() < 1e-9,
                "n={n}: |amplitude| = {}",
                a.norm()
            );
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(christandl_eigensystem(1, 1.0).is_err());
        assert!(christandl_eigensystem(61, 1.0).is_err());
        assert!(christandl_eigensystem(5, -1.0).is_err());
    }
}
