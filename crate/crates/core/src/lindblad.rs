//! Open-system generators on the vectorized density matrix.
//!
//! A density matrix on the d-dimensional subspace is flattened row-major into
//! a length d^2 vector; the master equation then reads d/dt rho_vec =
//! L rho_vec with
//!
//!   L = -i (H (x) I - I (x) H^T)
//!       + gamma * sum_n [ c_n (x) c_n^* - 1/2 (c_n^dag c_n (x) I + I (x) (c_n^dag c_n)^T) ]
//!
//! where (x) is the Kronecker product. Every non-vacuum basis state gets a
//! jump operator, the non-interacting qubit included.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::kron;
use crate::network::SingleExcitationHamiltonian;
use crate::C64;

/// Which coupling to the environment each site has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoherenceKind {
    /// Amplitude damping: jumps |vac><n| move the excitation into the vacuum.
    Dissipative,
    /// Pure dephasing: jumps |n><n| scramble phases, populations untouched.
    Dephasing,
}

/// Environment model: a decoherence kind, a uniform rate, and the per-site
/// jump operators on the subspace basis.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    kind: DecoherenceKind,
    gamma: f64,
    dim: usize,
    jumps: Vec<Array2<C64>>,
}

impl LindbladModel {
    /// Build the jump list for a subspace of dimension `dim` (vacuum last).
    pub fn new(kind: DecoherenceKind, gamma: f64, dim: usize) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::Argument(format!("rate {gamma} must be >= 0")));
        }
        if dim < 2 {
            return Err(Error::Argument(format!("subspace dimension {dim} < 2")));
        }
        let vac = dim - 1;
        let jumps = (0..vac)
            .map(|n| {
                let mut c = Array2::<C64>::zeros((dim, dim));
                match kind {
                    DecoherenceKind::Dissipative => c[[vac, n]] = C64::new(1.0, 0.0),
                    DecoherenceKind::Dephasing => c[[n, n]] = C64::new(1.0, 0.0),
                }
                c
            })
            .collect();
        Ok(LindbladModel { kind, gamma, dim, jumps })
    }

    pub fn kind(&self) -> DecoherenceKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[Array2<C64>] {
        &self.jumps
    }
}

/// The assembled superoperator, kept split so the coherent and decoherent
/// contributions can be inspected separately. `full` is their exact sum.
#[derive(Debug, Clone)]
pub struct Generator {
    subspace_dim: usize,
    hamiltonian_part: Array2<C64>,
    decoherence_part: Array2<C64>,
    full: Array2<C64>,
}

impl Generator {
    /// Side length of the superoperator, d^2.
    pub fn dim(&self) -> usize {
        self.full.nrows()
    }

    /// Side length d of the underlying density matrix.
    pub fn subspace_dim(&self) -> usize {
        self.subspace_dim
    }

    /// -i (H (x) I - I (x) H^T)
    pub fn hamiltonian_part(&self) -> &Array2<C64> {
        &self.hamiltonian_part
    }

    /// gamma * sum over jumps of c (x) c^* - 1/2 (c^dag c (x) I + I (x) (c^dag c)^T)
    pub fn decoherence_part(&self) -> &Array2<C64> {
        &self.decoherence_part
    }

    pub fn full(&self) -> &Array2<C64> {
        &self.full
    }
}

/// Assemble the superoperator for a Hamiltonian and an environment model of
/// matching dimension.
pub fn build_generator(
    h: &SingleExcitationHamiltonian,
    model: &LindbladModel,
) -> Result<Generator> {
    let d = h.dim();
    if d != model.dim() {
        return Err(Error::Shape(format!(
            "hamiltonian dimension {d} != model dimension {}",
            model.dim()
        )));
    }
    let id: Array2<C64> = Array2::eye(d);
    let hm = h.matrix();
    let h_t = hm.t().to_owned();
    let hamiltonian_part = (kron(hm, &id) - kron(&id, &h_t)).mapv(|z| z * C64::new(0.0, -1.0));

    let mut decoherence_part = Array2::<C64>::zeros((d * d, d * d));
    for c in model.jumps() {
        let c_conj = c.mapv(|z| z.conj());
        let cdc = c.t().mapv(|z| z.conj()).dot(c);
        let cdc_t = cdc.t().to_owned();
        let half = C64::new(0.5, 0.0);
        decoherence_part = decoherence_part + kron(c, &c_conj)
            - (kron(&cdc, &id) + kron(&id, &cdc_t)).mapv(|z| z * half);
    }
    let gamma = C64::new(model.gamma(), 0.0);
    let decoherence_part = decoherence_part.mapv(|z| z * gamma);

    let full = &hamiltonian_part + &decoherence_part;
    Ok(Generator {
        subspace_dim: d,
        hamiltonian_part,
        decoherence_part,
        full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig, max_norm};
    use crate::network::christandl_chain;
    use crate::state::sup_index;
    use approx::assert_abs_diff_eq;

    fn chain_generator(n: usize, kind: DecoherenceKind, gamma: f64) -> Generator {
        let net = christandl_chain(n, 1.0).unwrap();
        let model = LindbladModel::new(kind, gamma, net.dim()).unwrap();
        build_generator(&net.hamiltonian(), &model).unwrap()
    }

    #[test]
    fn dissipative_jumps_feed_vacuum() {
        let model = LindbladModel::new(DecoherenceKind::Dissipative, 0.5, 4).unwrap();
        assert_eq!(model.jumps().len(), 3);
        for (n, c) in model.jumps().iter().enumerate() {
            for i in 0..4 {
                for j in 0..4 {
                    let want = if (i, j) == (3, n) { 1.0 } else { 0.0 };
                    assert_eq!(c[[i, j]], C64::new(want, 0.0));
                }
            }
        }
    }

    #[test]
    fn dephasing_jumps_are_projectors() {
        let model = LindbladModel::new(DecoherenceKind::Dephasing, 0.5, 4).unwrap();
        for (n, c) in model.jumps().iter().enumerate() {
            assert_eq!(c[[n, n]], C64::new(1.0, 0.0));
            assert_eq!(c.dot(c), *c);
        }
    }

    #[test]
    fn model_rejects_bad_args() {
        assert!(LindbladModel::new(DecoherenceKind::Dissipative, -0.1, 4).is_err());
        assert!(LindbladModel::new(DecoherenceKind::Dissipative, f64::NAN, 4).is_err());
        assert!(LindbladModel::new(DecoherenceKind::Dissipative, 0.1, 1).is_err());
    }

    #[test]
    fn generator_rejects_dimension_mismatch() {
        let net = christandl_chain(3, 1.0).unwrap();
        let model = LindbladModel::new(DecoherenceKind::Dissipative, 0.2, 7).unwrap();
        assert!(build_generator(&net.hamiltonian(), &model).is_err());
    }

    #[test]
    fn full_is_exact_sum_of_parts() {
        let g = chain_generator(4, DecoherenceKind::Dephasing, 0.3);
        let sum = g.hamiltonian_part() + g.decoherence_part();
        for (a, b) in g.full().iter().zip(sum.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_rate_kills_decoherence_part() {
        let g = chain_generator(3, DecoherenceKind::Dissipative, 0.0);
        assert_eq!(max_norm(g.decoherence_part()), 0.0);
    }

    #[test]
    fn trace_is_conserved_by_columns() {
        for kind in [DecoherenceKind::Dissipative, DecoherenceKind::Dephasing] {
            let g = chain_generator(4, kind, 0.7);
            let d = g.subspace_dim();
            for col in 0..d * d {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..d {
                    s += g.full()[[sup_index(i, i, d), col]];
                }
                assert_abs_diff_eq!(s.norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn generator_preserves_hermiticity_structure() {
        // L[(i,j),(k,l)] = conj(L[(j,i),(l,k)]) keeps rho Hermitian.
        for kind in [DecoherenceKind::Dissipative, DecoherenceKind::Dephasing] {
            let g = chain_generator(3, kind, 0.4);
            let d = g.subspace_dim();
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let a = g.full()[[sup_index(i, j, d), sup_index(k, l, d)]];
                            let b = g.full()[[sup_index(j, i, d), sup_index(l, k, d)]];
                            assert_abs_diff_eq!((a - b.conj()).norm(), 0.0, epsilon = 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vacuum_is_stationary() {
        for kind in [DecoherenceKind::Dissipative, DecoherenceKind::Dephasing] {
            let g = chain_generator(4, kind, 0.9);
            let d = g.subspace_dim();
            let col = sup_index(d - 1, d - 1, d);
            for i in 0..d * d {
                assert_eq!(g.full()[[i, col]], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn dissipative_parts_commute() {
        let g = chain_generator(3, DecoherenceKind::Dissipative, 0.7);
        let ab = g.hamiltonian_part().dot(g.decoherence_part());
        let ba = g.decoherence_part().dot(g.hamiltonian_part());
        assert!(max_norm(&(&ab - &ba)) < 1e-12);
    }

    #[test]
    fn dephasing_parts_do_not_commute() {
        let g = chain_generator(3, DecoherenceKind::Dephasing, 0.7);
        let ab = g.hamiltonian_part().dot(g.decoherence_part());
        let ba = g.decoherence_part().dot(g.hamiltonian_part());
        assert!(max_norm(&(&ab - &ba)) > 1e-3);
    }

    #[test]
    fn dissipative_decoherence_spectrum_multiset() {
        // Eigenvalues of the decoherence part alone: 0 once, -gamma/2 with
        // multiplicity 2N, -gamma with multiplicity N^2.
        let n = 4;
        let gamma = 0.6;
        let g = chain_generator(n, DecoherenceKind::Dissipative, gamma);
        let (vals, _) = eig(g.decoherence_part()).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        for z in vals.iter() {
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-10);
        }
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = Vec::new();
        expect.extend(std::iter::repeat(-gamma).take(n * n));
        expect.extend(std::iter::repeat(-gamma / 2.0).take(2 * n));
        expect.push(0.0);
        assert_eq!(re.len(), expect.len());
        for (got, want) in re.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn noninteracting_qubit_gets_a_jump() {
        let net = christandl_chain(2, 1.0).unwrap().attach_noninteracting().unwrap();
        let model = LindbladModel::new(DecoherenceKind::Dissipative, 0.5, net.dim()).unwrap();
        assert_eq!(model.jumps().len(), 3);
        let ni = net.site_index(0).unwrap();
        let vac = net.vacuum_index();
        assert_eq!(model.jumps()[ni][[vac, ni]], C64::new(1.0, 0.0));
    }
}
