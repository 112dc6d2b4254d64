//! Brute-force evolution in the full many-qubit Hilbert space.
//!
//! Everything is rebuilt from scratch here: the Hamiltonian acts on all 2^q
//! basis states, jump operators are per-qubit lowering or number operators,
//! the superoperator is assembled column by column from their sparse action,
//! and the exponential is a plain scaled Taylor series. The only shared
//! ingredients with the engine are the network edge list and the state
//! encoding, which is the interface being verified.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::lindblad::DecoherenceKind;
use crate::network::SpinNetwork;
use crate::state::SubspaceState;
use crate::C64;

/// The full space grows as 4^q in memory and 64^q in exponentiation work.
pub const MAX_BRUTE_QUBITS: usize = 4;

fn local_one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Scaled Taylor-series exponential, deliberately different from the
/// engine's Pade evaluation.
fn local_expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = local_one_norm(a);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil().max(0.0) as i32 } else { 0 };
    let scale = C64::new(2.0f64.powi(-s), 0.0);
    let b = a.mapv(|z| z * scale);
    let mut sum: Array2<C64> = Array2::eye(n);
    let mut term: Array2<C64> = Array2::eye(n);
    for k in 1..=48u32 {
        term = term.dot(&b).mapv(|z| z / C64::new(f64::from(k), 0.0));
        sum = sum + &term;
        let biggest = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if biggest < 1e-18 {
            break;
        }
    }
    let mut r = sum;
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

/// Evolve a subspace state by building the dynamics on all 2^q states and
/// projecting back afterwards. Populations must stay inside the at-most-one-
/// excitation sector; any leak is reported as a numeric error.
pub fn brute_force_evolve(
    net: &SpinNetwork,
    kind: DecoherenceKind,
    gamma: f64,
    state: &SubspaceState,
    t: f64,
) -> Result<SubspaceState> {
    let q = net.n_sites() + usize::from(net.has_noninteracting());
    if q > MAX_BRUTE_QUBITS {
        return Err(Error::Argument(format!(
            "{q} qubits exceed the brute-force cap of {MAX_BRUTE_QUBITS}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::Argument(format!("rate {gamma} must be >= 0")));
    }
    if !t.is_finite() {
        return Err(Error::Argument(format!("time {t} is not finite")));
    }
    let d_sub = net.dim();
    if state.dim() != d_sub {
        return Err(Error::Shape(format!(
            "state dimension {} != network dimension {d_sub}",
            state.dim()
        )));
    }

    let dd = 1usize << q;
    // qubit labels 1..=q, chain sites first, the detached qubit last;
    // qubit j owns bit (q - j), so the vacuum is full-space index 0
    let full_of = |sub: usize| if sub + 1 == d_sub { 0 } else { 1usize << (q - (sub + 1)) };

    let mut h = Array2::<f64>::zeros((dd, dd));
    for &(a, b, jw) in net.edges() {
        let ba = 1usize << (q - a);
        let bb = 1usize << (q - b);
        for i in 0..dd {
            // exactly one endpoint excited: the excitation hops across
            if (i & ba != 0) != (i & bb != 0) {
                h[[i ^ ba ^ bb, i]] += jw;
            }
        }
    }

    // column action of the jump on qubit bit b: where does |j> go, if anywhere
    let jump_row = |j: usize, b: usize| -> Option<usize> {
        if j & b == 0 {
            return None;
        }
        match kind {
            DecoherenceKind::Dissipative => Some(j & !b),
            DecoherenceKind::Dephasing => Some(j),
        }
    };

    let s_dim = dd * dd;
    let mut l = Array2::<C64>::zeros((s_dim, s_dim));
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    for j in 0..dd {
        for k in 0..dd {
            let col = j * dd + k;
            for m in 0..dd {
                let hmj = h[[m, j]];
                if hmj != 0.0 {
                    l[[m * dd + k, col]] += minus_i * hmj;
                }
                let hkm = h[[k, m]];
                if hkm != 0.0 {
                    l[[j * dd + m, col]] += plus_i * hkm;
                }
            }
            if gamma > 0.0 {
                for qb in 1..=q {
                    let b = 1usize << (q - qb);
                    if let (Some(m), Some(p)) = (jump_row(j, b), jump_row(k, b)) {
                        l[[m * dd + p, col]] += C64::new(gamma, 0.0);
                    }
                    let mut occ = 0.0;
                    if j & b != 0 {
                        occ += 0.5;
                    }
                    if k & b != 0 {
                        occ += 0.5;
                    }
                    l[[col, col]] -= C64::new(gamma * occ, 0.0);
                }
            }
        }
    }

    let rho_sub = state.density();
    let mut v = Array1::<C64>::zeros(s_dim);
    for i in 0..d_sub {
        for j in 0..d_sub {
            v[full_of(i) * dd + full_of(j)] = rho_sub[[i, j]];
        }
    }

    let u = local_expm(&l.mapv(|z| z * t));
    let vt = u.dot(&v);

    let full_trace: C64 = (0..dd).map(|i| vt[i * dd + i]).sum();
    let mut out = Array2::<C64>::zeros((d_sub, d_sub));
    for i in 0..d_sub {
        for j in 0..d_sub {
            out[[i, j]] = vt[full_of(i) * dd + full_of(j)];
        }
    }
    let sub_trace: C64 = (0..d_sub).map(|i| out[[i, i]]).sum();
    if (full_trace - C64::new(1.0, 0.0)).norm() > 1e-10
        || (full_trace - sub_trace).norm() > 1e-10
    {
        return Err(Error::Numeric(format!(
            "population leaked out of the at-most-one-excitation sector: \
             full trace {full_trace}, projected trace {sub_trace}"
        )));
    }
    SubspaceState::from_density(out)
}
