//! Readouts on evolved states: site populations, reduced qubit states,
//! entanglement, and transfer fidelity averaged over input states.

use ndarray::{array, Array2};

use crate::error::{Error, Result};
use crate::linalg::{eigh, singular_values};
use crate::network::SpinNetwork;
use crate::propagator::Propagator;
use crate::state::{sup_index, SubspaceState};
use crate::C64;

/// Tolerated positivity violation from roundoff before a state is rejected.
const POSITIVITY_SLACK: f64 = 1e-8;

fn check_site_index(state: &SubspaceState, index: usize) -> Result<()> {
    let vac = state.dim() - 1;
    if index >= vac {
        return Err(Error::Index(format!(
            "index {index} is not a site index (vacuum is {vac})"
        )));
    }
    Ok(())
}

/// Reduced state of one qubit, basis {no excitation, excitation here}.
pub fn reduced_1q(state: &SubspaceState, index: usize) -> Result<Array2<C64>> {
    check_site_index(state, index)?;
    let rho = state.density();
    let vac = state.dim() - 1;
    let p1 = rho[[index, index]];
    let c = rho[[vac, index]];
    Ok(array![
        [C64::new(1.0, 0.0) - p1, c],
        [c.conj(), p1],
    ])
}

/// Reduced state of two qubits a and b, basis {|00>, |01>, |10>, |11>} with
/// the first slot belonging to a. The double-excitation row and column are
/// zero because at most one excitation exists.
pub fn reduced_2q(state: &SubspaceState, a: usize, b: usize) -> Result<Array2<C64>> {
    check_site_index(state, a)?;
    check_site_index(state, b)?;
    if a == b {
        return Err(Error::Index(format!("need two distinct qubits, got {a} twice")));
    }
    let rho = state.density();
    let vac = state.dim() - 1;
    let one = C64::new(1.0, 0.0);
    let pa = rho[[a, a]];
    let pb = rho[[b, b]];
    let mut out = Array2::<C64>::zeros((4, 4));
    out[[0, 0]] = one - pa - pb;
    out[[1, 1]] = pb;
    out[[2, 2]] = pa;
    out[[1, 2]] = rho[[b, a]];
    out[[2, 1]] = rho[[a, b]];
    out[[0, 1]] = rho[[vac, b]];
    out[[1, 0]] = rho[[b, vac]];
    out[[0, 2]] = rho[[vac, a]];
    out[[2, 0]] = rho[[a, vac]];
    Ok(out)
}

/// Population at the output index: the probability the excitation arrived.
pub fn transfer_fidelity(state: &SubspaceState, out_index: usize) -> Result<f64> {
    check_site_index(state, out_index)?;
    Ok(state.density()[[out_index, out_index]].re)
}

/// Relative eigenvalue cutoff below which the state is treated as exactly
/// rank-deficient when it is factored.
const RANK_CLIP: f64 = 1e-14;

/// Wootters concurrence of a two-qubit density matrix.
///
/// With rho = L L^dag, the ingredients of the usual formula are the singular
/// values of L^dag (sy (x) sy) L^*; computing them by SVD avoids taking
/// square roots of eigensolver noise, which matters for the rank-deficient
/// states this subspace produces. Roundoff negatives in the factorization
/// are clipped at zero within a small slack, so entanglement that has died
/// out reads as exactly the max(0, ...) expression.
pub fn concurrence(rho: &Array2<C64>) -> Result<f64> {
    if rho.dim() != (4, 4) {
        return Err(Error::Shape(format!("need a 4x4 matrix, got {:?}", rho.dim())));
    }
    let zero = C64::new(0.0, 0.0);
    let minus = C64::new(-1.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let syy = array![
        [zero, zero, zero, minus],
        [zero, zero, one, zero],
        [zero, one, zero, zero],
        [minus, zero, zero, zero],
    ];

    let adj = rho.t().mapv(|z| z.conj());
    let herm = (rho + &adj).mapv(|z| z * C64::new(0.5, 0.0));
    let (w, v) = eigh(&herm)?;
    let w_max = w.iter().cloned().fold(0.0f64, f64::max);
    let mut l = Array2::<C64>::zeros((4, 4));
    for (k, &wk) in w.iter().enumerate() {
        if wk < -POSITIVITY_SLACK {
            return Err(Error::Numeric(format!("state eigenvalue {wk} is negative")));
        }
        let s = if wk <= RANK_CLIP * w_max { 0.0 } else { wk.sqrt() };
        for i in 0..4 {
            l[[i, k]] = C64::new(s, 0.0) * v[[i, k]];
        }
    }

    let l_conj = l.mapv(|z| z.conj());
    let k_mat = l.t().mapv(|z| z.conj()).dot(&syy).dot(&l_conj);
    let lambdas = singular_values(&k_mat)?;
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// The transfer channel data on the input-to-output qubit pair, read straight
/// from superoperator elements.
#[derive(Debug, Clone, Copy)]
pub struct FidelityReadout {
    /// Population arriving at the output from an input excitation.
    pub transfer: f64,
    /// Population the bare vacuum would inject at the output (zero whenever
    /// the vacuum is stationary).
    pub vacuum_feed: f64,
    /// Site-vacuum coherence carried from input to output.
    pub coherence: C64,
    /// Fidelity averaged over all pure input states.
    pub average: f64,
    /// The same average when the receiver applies the optimal phase shift,
    /// which replaces the real part of the coherence by its modulus.
    pub phase_corrected: f64,
}

/// Read the channel elements for transfer between two chosen site labels at
/// time t.
pub fn fidelity_readout_between(
    prop: &Propagator,
    net: &SpinNetwork,
    input_label: usize,
    output_label: usize,
    t: f64,
) -> Result<FidelityReadout> {
    let d = net.dim();
    if d != prop.subspace_dim() {
        return Err(Error::Shape(format!(
            "network dimension {d} != propagator dimension {}",
            prop.subspace_dim()
        )));
    }
    let m = net.site_index(input_label)?;
    let o = net.site_index(output_label)?;
    let v = net.vacuum_index();
    let transfer = prop.element(sup_index(o, o, d), sup_index(m, m, d), t)?.re;
    let vacuum_feed = prop.element(sup_index(o, o, d), sup_index(v, v, d), t)?.re;
    let coherence = prop.element(sup_index(o, v, d), sup_index(m, v, d), t)?;
    let base = 0.5 + (transfer - vacuum_feed) / 6.0;
    Ok(FidelityReadout {
        transfer,
        vacuum_feed,
        coherence,
        average: base + coherence.re / 3.0,
        phase_corrected: base + coherence.norm() / 3.0,
    })
}

/// Read the channel elements for transfer from the network's input site to
/// its first output site at time t.
pub fn fidelity_readout(prop: &Propagator, net: &SpinNetwork, t: f64) -> Result<FidelityReadout> {
    let out = *net
        .output_sites()
        .first()
        .ok_or_else(|| Error::Validation("network has no output site".into()))?;
    fidelity_readout_between(prop, net, net.input_site(), out, t)
}

/// Fidelity of state transfer averaged over all pure input states.
pub fn average_fidelity(prop: &Propagator, net: &SpinNetwork, t: f64) -> Result<f64> {
    Ok(fidelity_readout(prop, net, t)?.average)
}
