//! Fixed-step Runge-Kutta integration of the vectorized master equation, an
//! independent check on the diagonalization-based propagator.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::lindblad::Generator;
use crate::state::SubspaceState;
use crate::C64;

/// Hard cap on step count so a mistyped step size fails instead of hanging.
const MAX_STEPS: f64 = 1e8;

/// Integrate d/dt v = L v from the given state to time t with step dt
/// (the final step is shortened to land on t exactly).
pub fn rk4_evolve(gen: &Generator, state: &SubspaceState, t: f64, dt: f64) -> Result<SubspaceState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!("time {t} must be finite and >= 0")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Argument(format!("step {dt} must be finite and > 0")));
    }
    if state.dim() != gen.subspace_dim() {
        return Err(Error::Shape(format!(
            "state dimension {} != generator dimension {}",
            state.dim(),
            gen.subspace_dim()
        )));
    }
    if t / dt > MAX_STEPS {
        return Err(Error::Argument(format!(
            "{} steps exceed the cap of {MAX_STEPS:.0}",
            (t / dt).ceil()
        )));
    }

    let l = gen.full();
    let step = |v: &Array1<C64>, h: f64| -> Array1<C64> {
        let hc = C64::new(h, 0.0);
        let half = C64::new(0.5, 0.0);
        let k1 = l.dot(v);
        let k2 = l.dot(&(v + &(&k1 * (hc * half))));
        let k3 = l.dot(&(v + &(&k2 * (hc * half))));
        let k4 = l.dot(&(v + &(&k3 * hc)));
        let sixth = hc / C64::new(6.0, 0.0);
        v + &((k1 + &k2 * C64::new(2.0, 0.0) + &k3 * C64::new(2.0, 0.0) + k4) * sixth)
    };

    let mut v = state.vector();
    let mut remaining = t;
    while remaining > 0.0 {
        let h = dt.min(remaining);
        v = step(&v, h);
        remaining -= h;
    }
    SubspaceState::from_vector(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{build_generator, DecoherenceKind, LindbladModel};
    use crate::linalg::max_abs_diff;
    use crate::network::christandl_chain;
    use crate::propagator::Propagator;
    use crate::state::encode_input;

    fn setup(n: usize, kind: DecoherenceKind, gamma: f64) -> (Generator, Propagator) {
        let net = christandl_chain(n, 1.0).unwrap();
        let model = LindbladModel::new(kind, gamma, net.dim()).unwrap();
        let gen = build_generator(&net.hamiltonian(), &model).unwrap();
        let prop = Propagator::new(&gen).unwrap();
        (gen, prop)
    }

    #[test]
    fn matches_diagonalization_with_damping() {
        let (gen, prop) = setup(3, DecoherenceKind::Dissipative, 0.5);
        let rho0 = encode_input(3, 1, 1.2, 0.4).unwrap();
        let a = rk4_evolve(&gen, &rho0, 0.9, 1e-3).unwrap();
        let b = prop.evolve(&rho0, 0.9).unwrap();
        assert!(max_abs_diff(&a.density(), &b.density()) < 1e-9);
    }

    #[test]
    fn matches_diagonalization_with_dephasing() {
        let (gen, prop) = setup(4, DecoherenceKind::Dephasing, 0.8);
        let rho0 = encode_input(4, 2, 2.1, 5.0).unwrap();
        let a = rk4_evolve(&gen, &rho0, 1.4, 1e-3).unwrap();
        let b = prop.evolve(&rho0, 1.4).unwrap();
        assert!(max_abs_diff(&a.density(), &b.density()) < 1e-9);
    }

    #[test]
    fn zero_time_is_identity() {
        let (gen, _) = setup(3, DecoherenceKind::Dissipative, 0.2);
        let rho0 = encode_input(3, 1, 0.5, 0.0).unwrap();
        let a = rk4_evolve(&gen, &rho0, 0.0, 1e-3).unwrap();
        assert!(max_abs_diff(&a.density(), &rho0.density()) < 1e-15);
    }

    #[test]
    fn partial_final_step_lands_on_target() {
        let (gen, prop) = setup(2, DecoherenceKind::Dissipative, 0.3);
        let rho0 = encode_input(2, 1, 2.7, 1.0).unwrap();
        let t = 0.0105; // 10 full steps plus half a step
        let a = rk4_evolve(&gen, &rho0, t, 1e-3).unwrap();
        let b = prop.evolve(&rho0, t).unwrap();
        assert!(max_abs_diff(&a.density(), &b.density()) < 1e-12);
    }

    #[test]
    fn rejects_bad_steps() {
        let (gen, _) = setup(2, DecoherenceKind::Dissipative, 0.3);
        let rho0 = encode_input(2, 1, 2.7, 1.0).unwrap();
        assert!(rk4_evolve(&gen, &rho0, -1.0, 1e-3).is_err());
        assert!(rk4_evolve(&gen, &rho0, 1.0, 0.0).is_err());
        assert!(rk4_evolve(&gen, &rho0, 1e6, 1e-9).is_err());
    }
}
