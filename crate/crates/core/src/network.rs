//! Engineered XX spin networks and their single-excitation Hamiltonians.
//!
//! Sites carry 1-based labels 1..=N; label 0 is reserved for an optional
//! non-interacting qubit. A coupling J between neighbors comes from the XX
//! exchange term (J/2)(XX + YY), which acts on the one-excitation sector as a
//! plain hopping amplitude J between the two site states.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

/// An interaction graph over spin-1/2 sites with real symmetric couplings.
#[derive(Debug, Clone)]
pub struct SpinNetwork {
    n_sites: usize,
    lambda: f64,
    edges: Vec<(usize, usize, f64)>,
    input_site: usize,
    output_sites: Vec<usize>,
    has_ni: bool,
}

impl SpinNetwork {
    /// Number of interacting sites (the non-interacting qubit not included).
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// The coupling scale every edge strength is proportional to.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Edges as (site a, site b, strength) with 1-based labels.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// The designated sender site label.
    pub fn input_site(&self) -> usize {
        self.input_site
    }

    /// Receiver site label(s): the far end for chains, the arm ends for
    /// multiarm networks.
    pub fn output_sites(&self) -> &[usize] {
        &self.output_sites
    }

    /// Whether a non-interacting qubit (label 0) is attached.
    pub fn has_noninteracting(&self) -> bool {
        self.has_ni
    }

    /// Subspace dimension: sites, plus the non-interacting qubit if present,
    /// plus the vacuum.
    pub fn dim(&self) -> usize {
        self.n_sites + usize::from(self.has_ni) + 1
    }

    /// Matrix index of the vacuum state (always last).
    pub fn vacuum_index(&self) -> usize {
        self.dim() - 1
    }

    /// Matrix index of a site label: sites 1..=N map to 0..N-1, the
    /// non-interacting qubit (label 0) sits just before the vacuum.
    pub fn site_index(&self, label: usize) -> Result<usize> {
        if label == 0 {
            if self.has_ni {
                Ok(self.n_sites)
            } else {
                Err(Error::Index("no non-interacting qubit attached".into()))
            }
        } else if label <= self.n_sites {
            Ok(label - 1)
        } else {
            Err(Error::Index(format!("site {label} out of 1..={}", self.n_sites)))
        }
    }

    /// Add a non-interacting qubit: label 0, no edges, but a full participant
    /// in the decoherence jump list. Fails on a second attach.
    pub fn attach_noninteracting(&self) -> Result<SpinNetwork> {
        if self.has_ni {
            return Err(Error::Argument("non-interacting qubit already attached".into()));
        }
        let mut net = self.clone();
        net.has_ni = true;
        Ok(net)
    }

    /// Single-excitation Hamiltonian: hopping amplitude J on each edge,
    /// vacuum row and column identically zero, no on-site fields.
    pub fn hamiltonian(&self) -> SingleExcitationHamiltonian {
        let d = self.dim();
        let mut h = Array2::<C64>::zeros((d, d));
        for &(a, b, j) in &self.edges {
            let ia = self.site_index(a).expect("edge labels validated at construction");
            let ib = self.site_index(b).expect("edge labels validated at construction");
            h[[ia, ib]] = C64::new(j, 0.0);
            h[[ib, ia]] = C64::new(j, 0.0);
        }
        SingleExcitationHamiltonian { matrix: h }
    }
}

/// Hermitian hopping matrix on the subspace basis {sites.., (qubit 0), vacuum}.
#[derive(Debug, Clone)]
pub struct SingleExcitationHamiltonian {
    matrix: Array2<C64>,
}

impl SingleExcitationHamiltonian {
    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn check_chain_args(n: usize, lambda: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Argument(format!("chain length {n} < 2")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Argument(format!("coupling scale {lambda} must be positive")));
    }
    Ok(())
}

/// Uniform-transfer chain: bond b carries lambda * sqrt(b (N - b)).
///
/// With this modulation an excitation moves from site 1 to site N perfectly
/// at t = (2k-1) pi / (2 lambda).
pub fn christandl_chain(n: usize, lambda: f64) -> Result<SpinNetwork> {
    check_chain_args(n, lambda)?;
    let edges = (1..n)
        .map(|b| (b, b + 1, lambda * ((b * (n - b)) as f64).sqrt()))
        .collect();
    Ok(SpinNetwork {
        n_sites: n,
        lambda,
        edges,
        input_site: 1,
        output_sites: vec![n],
        has_ni: false,
    })
}

/// One-parameter family of perfect-transfer chains: even bonds keep the
/// uniform-transfer strengths, odd bonds b carry
/// lambda * sqrt((b + 2k)(N - b + 2k)). k = 0 reproduces
/// [`christandl_chain`]; for even N transfer stays perfect at pi / (2 lambda).
pub fn shi_chain(n: usize, k: usize, lambda: f64) -> Result<SpinNetwork> {
    check_chain_args(n, lambda)?;
    let edges = (1..n)
        .map(|b| {
            let j = if b % 2 == 0 {
                ((b * (n - b)) as f64).sqrt()
            } else {
                (((b + 2 * k) * (n - b + 2 * k)) as f64).sqrt()
            };
            (b, b + 1, lambda * j)
        })
        .collect();
    Ok(SpinNetwork {
        n_sites: n,
        lambda,
        edges,
        input_site: 1,
        output_sites: vec![n],
        has_ni: false,
    })
}

/// Branched network M(N1, N2, NA): an input arm of N1 sites, a hub, and NA
/// identical output arms of N2 sites.
///
/// Couplings follow the uniform-transfer chain of length N1 + N2 + 1 by
/// backbone position; each hub-to-arm edge is that backbone value divided by
/// sqrt(NA), so the symmetric combination of arms behaves exactly like the
/// backbone chain and the excitation fans out into a W-type state across the
/// arm ends.
pub fn multiarm_network(n1: usize, n2: usize, n_arms: usize, lambda: f64) -> Result<SpinNetwork> {
    if n1 < 1 || n2 < 1 || n_arms < 1 {
        return Err(Error::Argument(format!(
            "multiarm needs n1, n2, arms >= 1, got ({n1}, {n2}, {n_arms})"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Argument(format!("coupling scale {lambda} must be positive")));
    }
    let backbone = n1 + n2 + 1;
    let hub = n1 + 1;
    let n_total = n1 + 1 + n_arms * n2;
    let bb = |p: usize| lambda * ((p * (backbone - p)) as f64).sqrt();
    // arm a (1-based), position j in 1..=n2 counted outward from the hub
    let arm_site = |a: usize, j: usize| hub + (a - 1) * n2 + j;

    let mut edges = Vec::new();
    for p in 1..=n1 {
        edges.push((p, p + 1, bb(p)));
    }
    let fanout = bb(n1 + 1) / (n_arms as f64).sqrt();
    for a in 1..=n_arms {
        edges.push((hub, arm_site(a, 1), fanout));
        for j in 1..n2 {
            // backbone position of the bond between arm sites j and j+1
            edges.push((arm_site(a, j), arm_site(a, j + 1), bb(n1 + 1 + j)));
        }
    }
    let output_sites = (1..=n_arms).map(|a| arm_site(a, n2)).collect();
    Ok(SpinNetwork {
        n_sites: n_total,
        lambda,
        edges,
        input_site: 1,
        output_sites,
        has_ni: false,
    })
}
