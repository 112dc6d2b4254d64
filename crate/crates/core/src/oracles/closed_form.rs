//! Analytic expressions for uniform-transfer chains and their decorated
//! variants, written directly from trigonometric identities. No matrices are
//! built here.

use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Argument(format!("chain length {n} < 2")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("coupling scale {lambda} must be positive")))
    }
}

/// First arrival time pi / (2 lambda) of the uniform-transfer chain.
pub fn arrival_time(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(PI / (2.0 * lambda))
}

/// k-th arrival time (2k - 1) pi / (2 lambda), k >= 1.
pub fn arrival_time_k(lambda: f64, k: usize) -> Result<f64> {
    check_lambda(lambda)?;
    if k == 0 {
        return Err(Error::Argument("arrival index starts at 1".into()));
    }
    Ok((2 * k - 1) as f64 * PI / (2.0 * lambda))
}

/// Re[i^(N-1)]: +1 for N = 4r+1, 0 for even N, -1 for N = 4r-1. This is the
/// residual phase factor the receiver sees after transfer.
pub fn cos_alpha(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(match (n - 1) % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    })
}

/// End-to-end amplitude of the closed chain, (-i sin(lambda t))^(N-1).
pub fn transfer_amplitude(n: usize, lambda: f64, t: f64) -> Result<C64> {
    check_n(n)?;
    check_lambda(lambda)?;
    Ok(C64::new(0.0, -(lambda * t).sin()).powu((n - 1) as u32))
}

/// Excitation-transfer probability under uniform damping:
/// exp(-gamma t) sin^(2(N-1))(lambda t).
pub fn transfer_fidelity_dissipative(n: usize, lambda: f64, gamma: f64, t: f64) -> Result<f64> {
    check_n(n)?;
    check_lambda(lambda)?;
    Ok((-gamma * t).exp() * (lambda * t).sin().powi(2 * (n as i32 - 1)))
}

/// Input-averaged transfer fidelity under uniform damping.
pub fn average_fidelity_dissipative(n: usize, lambda: f64, gamma: f64, t: f64) -> Result<f64> {
    let f = transfer_fidelity_dissipative(n, lambda, gamma, t)?;
    let coh = (-gamma * t / 2.0).exp() * (lambda * t).sin().powi(n as i32 - 1);
    Ok(0.5 + f / 6.0 + cos_alpha(n)? * coh / 3.0)
}

/// The same average when the receiver undoes the arrival phase, so the
/// coherence enters by modulus.
pub fn phase_corrected_average_dissipative(
    n: usize,
    lambda: f64,
    gamma: f64,
    t: f64,
) -> Result<f64> {
    let f = transfer_fidelity_dissipative(n, lambda, gamma, t)?;
    let coh = (-gamma * t / 2.0).exp() * (lambda * t).sin().powi(n as i32 - 1).abs();
    Ok(0.5 + f / 6.0 + coh / 3.0)
}

/// Transfer probability for the two-site member of the odd-bond-boosted
/// family: exp(-gamma t) sin^2((2k+1) lambda t).
pub fn shi_transfer_fidelity_two_sites(k: usize, lambda: f64, gamma: f64, t: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let w = (2 * k + 1) as f64 * lambda;
    Ok((-gamma * t).exp() * (w * t).sin().powi(2))
}

/// Earliest arrival times of the boosted two-site chain:
/// pi / ((4k+2) lambda) + pi r / ((2k+1) lambda), r = 0, 1, ...
pub fn shi_arrival_time_two_sites(k: usize, lambda: f64, r: usize) -> Result<f64> {
    check_lambda(lambda)?;
    let w = (2 * k + 1) as f64 * lambda;
    Ok(PI / (2.0 * w) + PI * r as f64 / w)
}

/// Concurrence between a detached reference qubit and the chain end, for a
/// Bell pair shared between the reference and the sender, under damping:
/// exp(-gamma t) |sin(lambda t)|^(N-1).
pub fn bell_concurrence_dissipative(n: usize, lambda: f64, gamma: f64, t: f64) -> Result<f64> {
    check_n(n)?;
    check_lambda(lambda)?;
    Ok((-gamma * t).exp() * (lambda * t).sin().abs().powi(n as i32 - 1))
}

/// Pairwise concurrence between any two arm ends of the branched network
/// under damping: 2 exp(-gamma t) sin^(2(Nb-1))(lambda t) / NA with
/// Nb = N1 + N2 + 1 the backbone length.
pub fn multiarm_end_concurrence_dissipative(
    n1: usize,
    n2: usize,
    n_arms: usize,
    lambda: f64,
    gamma: f64,
    t: f64,
) -> Result<f64> {
    if n1 < 1 || n2 < 1 || n_arms < 1 {
        return Err(Error::Argument(format!(
            "multiarm needs n1, n2, arms >= 1, got ({n1}, {n2}, {n_arms})"
        )));
    }
    check_lambda(lambda)?;
    let nb = n1 + n2 + 1;
    Ok(2.0 * (-gamma * t).exp() * (lambda * t).sin().powi(2 * (nb as i32 - 1)) / n_arms as f64)
}

/// Long-time transfer probability under pure dephasing: the excitation
/// spreads evenly, 1/N.
pub fn dephasing_stationary_transfer(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(1.0 / n as f64)
}

/// Long-time input-averaged fidelity under pure dephasing: 1/(6N) + 1/2.
pub fn dephasing_stationary_average(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(1.0 / (6.0 * n as f64) + 0.5)
}

/// Damping rate at which the averaged fidelity at first arrival drops to the
/// classical benchmark 2/3. Solving
/// 1/2 + exp(-g t0)/6 + cos_alpha exp(-g t0 / 2)/3 = 2/3 for g gives
/// g = -(2 / t0) ln(sqrt(1 + cos_alpha^2) - cos_alpha); no positive solution
/// exists when the arrival phase is inverted (cos_alpha < 0).
pub fn critical_gamma_dissipative(n: usize, lambda: f64) -> Result<Option<f64>> {
    let ca = cos_alpha(n)?;
    let t0 = arrival_time(lambda)?;
    if ca < 0.0 {
        return Ok(None);
    }
    let x = (1.0 + ca * ca).sqrt() - ca;
    Ok(Some(-2.0 * x.ln() / t0))
}

/// Peak time of the damped two-site transfer curve, arctan(2 lambda / gamma) / lambda.
pub fn peak_time_two_sites(lambda: f64, gamma: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(gamma > 0.0) {
        return Err(Error::Argument(format!("rate {gamma} must be positive here")));
    }
    Ok((2.0 * lambda / gamma).atan() / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn phase_pattern_by_length() {
        for (n, want) in [(2, 0.0), (3, -1.0), (4, 0.0), (5, 1.0), (6, 0.0), (7, -1.0), (9, 1.0)] {
            assert_eq!(cos_alpha(n).unwrap(), want);
        }
    }

    #[test]
    fn amplitude_small_chains() {
        let t = 0.8;
        let a2 = transfer_amplitude(2, 1.0, t).unwrap();
        assert_abs_diff_eq!((a2 - C64::new(0.0, -t.sin())).norm(), 0.0, epsilon = 1e-15);
        let a3 = transfer_amplitude(3, 1.0, t).unwrap();
        assert_abs_diff_eq!((a3 - C64::new(-t.sin().powi(2), 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn transfer_probability_at_arrival() {
        let t0 = arrival_time(1.0).unwrap();
        assert_abs_diff_eq!(t0, FRAC_PI_2, epsilon = 1e-15);
        let f = transfer_fidelity_dissipative(7, 1.0, 0.1, t0).unwrap();
        assert_abs_diff_eq!(f, 0.8546359991532334, epsilon = 1e-15);
        assert_abs_diff_eq!(f, (-0.1 * t0).exp(), epsilon = 1e-15);
    }

    #[test]
    fn later_arrivals() {
        assert_abs_diff_eq!(arrival_time_k(1.0, 1).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(arrival_time_k(0.5, 2).unwrap(), 3.0 * PI, epsilon = 1e-15);
        assert!(arrival_time_k(1.0, 0).is_err());
    }

    #[test]
    fn average_fidelity_frozen_five_sites() {
        let t0 = arrival_time(1.0).unwrap();
        let f = average_fidelity_dissipative(5, 1.0, 0.1, t0).unwrap();
        assert_abs_diff_eq!(f, 0.9505944166509575, epsilon = 1e-15);
    }

    #[test]
    fn average_fidelity_three_patterns_at_arrival() {
        let g = 0.2;
        let t0 = arrival_time(1.0).unwrap();
        let e1 = (-g * t0).exp();
        let eh = (-g * t0 / 2.0).exp();
        assert_abs_diff_eq!(
            average_fidelity_dissipative(9, 1.0, g, t0).unwrap(),
            0.5 + e1 / 6.0 + eh / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            average_fidelity_dissipative(6, 1.0, g, t0).unwrap(),
            0.5 + e1 / 6.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            average_fidelity_dissipative(7, 1.0, g, t0).unwrap(),
            0.5 + e1 / 6.0 - eh / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            phase_corrected_average_dissipative(7, 1.0, g, t0).unwrap(),
            0.5 + e1 / 6.0 + eh / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn boosted_two_site_chain() {
        let k = 1;
        let t = shi_arrival_time_two_sites(k, 1.0, 0).unwrap();
        assert_abs_diff_eq!(t, PI / 6.0, epsilon = 1e-15);
        let f = shi_transfer_fidelity_two_sites(k, 1.0, 0.4, t).unwrap();
        assert_abs_diff_eq!(f, (-0.4 * t).exp(), epsilon = 1e-15);
        let t2 = shi_arrival_time_two_sites(k, 1.0, 1).unwrap();
        let f2 = shi_transfer_fidelity_two_sites(k, 1.0, 0.4, t2).unwrap();
        assert_abs_diff_eq!(f2, (-0.4 * t2).exp(), epsilon = 1e-14);
    }

    #[test]
    fn bell_concurrence_is_length_independent_at_arrival() {
        let t0 = arrival_time(1.0).unwrap();
        for n in [2usize, 5, 12, 30] {
            let c = bell_concurrence_dissipative(n, 1.0, 0.3, t0).unwrap();
            assert_abs_diff_eq!(c, (-0.3 * t0).exp(), epsilon = 1e-13);
        }
    }

    #[test]
    fn multiarm_concurrence_frozen_three_arms() {
        let t0 = arrival_time(1.0).unwrap();
        let c = multiarm_end_concurrence_dissipative(4, 2, 3, 1.0, 0.3, t0).unwrap();
        assert_abs_diff_eq!(c, 0.4161522890990465, epsilon = 1e-15);
        let c1 = multiarm_end_concurrence_dissipative(4, 2, 1, 1.0, 0.0, t0).unwrap();
        assert_abs_diff_eq!(c1, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn dephasing_long_time_levels() {
        assert_abs_diff_eq!(dephasing_stationary_transfer(5).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(
            dephasing_stationary_average(5).unwrap(),
            0.5333333333333333,
            epsilon = 1e-15
        );
    }

    #[test]
    fn critical_rate_frozen_and_pattern() {
        let g = critical_gamma_dissipative(5, 1.0).unwrap().unwrap();
        assert_abs_diff_eq!(g, 1.1221997046783603, epsilon = 1e-13);
        assert_abs_diff_eq!(
            g,
            4.0 * (1.0 + 2.0f64.sqrt()).ln() / PI,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(critical_gamma_dissipative(6, 1.0).unwrap().unwrap(), 0.0, epsilon = 1e-15);
        assert!(critical_gamma_dissipative(7, 1.0).unwrap().is_none());
    }

    #[test]
    fn two_site_peak_time_frozen() {
        let t = peak_time_two_sites(1.0, 0.1).unwrap();
        assert_abs_diff_eq!(t, 1.5208379310729538, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(transfer_amplitude(1, 1.0, 0.0).is_err());
        assert!(transfer_fidelity_dissipative(3, 0.0, 0.1, 1.0).is_err());
        assert!(peak_time_two_sites(1.0, 0.0).is_err());
        assert!(multiarm_end_concurrence_dissipative(0, 1, 1, 1.0, 0.1, 1.0).is_err());
    }
}
