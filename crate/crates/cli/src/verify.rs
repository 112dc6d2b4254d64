//! Built-in cross-validation: the engine is compared against closed-form
//! curves, a spectral recursion, a stepped integrator, and a full-space
//! evolution that never touch the engine's own assembly or exponential.
//!
//! Each check reports a residual and a fixed tolerance. `--quick` runs the
//! subset that finishes in a few seconds; the full set adds the slower
//! full-space and sweep comparisons.

use rayon::prelude::*;
use spinnet::linalg::{eigh, hermiticity_error, max_abs_diff};
use spinnet::ndarray::s;
use spinnet::oracles::closed_form as cf;
use spinnet::oracles::{brute_force_evolve, christandl_eigensystem, rk4_evolve};
use spinnet::{
    build_generator, christandl_chain, concurrence, fidelity_readout, multiarm_network,
    reduced_2q, shi_chain, C64, DecoherenceKind, LindbladModel, Propagator, PropagatorPath,
    SpinNetwork, SubspaceState,
};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::csvout::{Table, Value};
use crate::CliError;

const KINDS: [DecoherenceKind; 2] = [DecoherenceKind::Dissipative, DecoherenceKind::Dephasing];

struct Check {
    name: &'static str,
    quick: bool,
    tol: f64,
    run: fn() -> Result<f64, CliError>,
}

pub struct Outcome {
    pub name: &'static str,
    pub residual: f64,
    pub tol: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tol
    }
}

fn checks() -> Vec<Check> {
    vec![
        Check { name: "closed_form_transfer", quick: true, tol: 1e-8, run: closed_form_transfer },
        Check { name: "closed_form_average", quick: true, tol: 1e-8, run: closed_form_average },
        Check { name: "spectral_recursion", quick: true, tol: 1e-8, run: spectral_recursion },
        Check { name: "stepped_integrator", quick: true, tol: 1e-7, run: stepped_integrator },
        Check { name: "full_space_small", quick: false, tol: 1e-9, run: full_space_small },
        Check { name: "boosted_two_site", quick: true, tol: 1e-8, run: boosted_two_site },
        Check { name: "semigroup_property", quick: true, tol: 1e-8, run: semigroup_property },
        Check { name: "conservation_laws", quick: true, tol: 1e-10, run: conservation_laws },
        Check { name: "damping_spectrum", quick: false, tol: 1e-10, run: damping_spectrum },
        Check { name: "arrival_phase_pattern", quick: false, tol: 1e-8, run: arrival_phase_pattern },
        Check { name: "pair_transit_loss", quick: false, tol: 1e-8, run: pair_transit_loss },
        Check { name: "hub_split_limit", quick: false, tol: 1e-6, run: hub_split_limit },
        Check { name: "exponential_fallback", quick: true, tol: 1e-10, run: exponential_fallback },
    ]
}

fn run_checks(quick: bool) -> Result<Vec<Outcome>, CliError> {
    checks()
        .into_par_iter()
        .filter(|c| !quick || c.quick)
        .map(|c| {
            let residual = (c.run)()?;
            Ok(Outcome { name: c.name, residual, tol: c.tol })
        })
        .collect()
}

/// CLI subcommand: print one line per check and fail if any residual exceeds
/// its tolerance.
pub fn run(quick: bool) -> Result<(), CliError> {
    let outcomes = run_checks(quick)?;
    let mut failed = 0_usize;
    for o in &outcomes {
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        println!(
            "{:<22} residual {:>9.2e}  tol {:>6.0e}  {verdict}",
            o.name, o.residual, o.tol
        );
        failed += usize::from(!o.passed());
    }
    let mode = if quick { "quick" } else { "full" };
    println!(
        "verify ({mode}): {} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed > 0 {
        return Err(CliError::Numeric(format!(
            "{failed} verification check(s) failed"
        )));
    }
    Ok(())
}

/// Config-file task: same checks as a CSV table; a failing check is an error
/// so the run exits with the numeric-error code.
pub fn table(quick: bool) -> Result<Table, CliError> {
    let outcomes = run_checks(quick)?;
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.name)
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Numeric(format!(
            "verification failed: {}",
            failed.join(", ")
        )));
    }
    let mut table = Table::new(vec!["check", "residual", "tol", "pass"]);
    for o in outcomes {
        table.push(vec![
            Value::Text(o.name.to_string()),
            Value::Num(o.residual),
            Value::Num(o.tol),
            Value::Int(1),
        ]);
    }
    Ok(table)
}

fn chain_prop(
    n: usize,
    kind: DecoherenceKind,
    gamma: f64,
) -> Result<(SpinNetwork, Propagator), CliError> {
    let net = christandl_chain(n, 1.0)?;
    let model = LindbladModel::new(kind, gamma, net.dim())?;
    let gen = build_generator(&net.hamiltonian(), &model)?;
    let prop = Propagator::new(&gen)?;
    Ok((net, prop))
}

fn excitation(net: &SpinNetwork) -> Result<SubspaceState, CliError> {
    let idx = net.site_index(net.input_site())?;
    Ok(SubspaceState::from_amplitudes(
        net.dim(),
        &[(idx, C64::new(1.0, 0.0))],
    )?)
}

fn sweep_times() -> Vec<f64> {
    (0..60).map(|i| 3.0 * PI * i as f64 / 59.0).collect()
}

fn closed_form_transfer() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for n in 2..=6 {
        for gamma in [0.1, 0.5] {
            let (net, prop) = chain_prop(n, DecoherenceKind::Dissipative, gamma)?;
            for t in sweep_times() {
                let f = fidelity_readout(&prop, &net, t)?.transfer;
                let f_cf = cf::transfer_fidelity_dissipative(n, 1.0, gamma, t)?;
                worst = worst.max((f - f_cf).abs());
            }
        }
    }
    Ok(worst)
}

fn closed_form_average() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for n in 2..=6 {
        for gamma in [0.1, 0.5] {
            let (net, prop) = chain_prop(n, DecoherenceKind::Dissipative, gamma)?;
            for t in sweep_times() {
                let read = fidelity_readout(&prop, &net, t)?;
                let plain = cf::average_fidelity_dissipative(n, 1.0, gamma, t)?;
                let shifted = cf::phase_corrected_average_dissipative(n, 1.0, gamma, t)?;
                worst = worst
                    .max((read.average - plain).abs())
                    .max((read.phase_corrected - shifted).abs());
            }
        }
    }
    Ok(worst)
}

fn spectral_recursion() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for n in 2..=10 {
        let (energies, c) = christandl_eigensystem(n, 1.0)?;
        let h = christandl_chain(n, 1.0)?.hamiltonian();
        let block = h.matrix().slice(s![0..n, 0..n]).to_owned();
        let (w, v) = eigh(&block)?;
        for k in 0..n {
            worst = worst.max((w[k] - energies[k]).abs());
            let mut overlap = C64::new(0.0, 0.0);
            for j in 0..n {
                overlap += v[[j, k]].conj() * C64::new(c[[k, j]], 0.0);
            }
            let phase = overlap / C64::new(overlap.norm(), 0.0);
            for j in 0..n {
                worst = worst.max((v[[j, k]] * phase - C64::new(c[[k, j]], 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

fn stepped_integrator() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for kind in KINDS {
        let net = christandl_chain(3, 1.0)?;
        let model = LindbladModel::new(kind, 0.4, net.dim())?;
        let gen = build_generator(&net.hamiltonian(), &model)?;
        let prop = Propagator::new(&gen)?;
        let state = excitation(&net)?;
        let exact = prop.evolve(&state, 1.3)?;
        let stepped = rk4_evolve(&gen, &state, 1.3, 1e-3)?;
        worst = worst.max(max_abs_diff(exact.density(), stepped.density()));
    }
    Ok(worst)
}

fn full_space_small() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    let t = 0.9;
    for kind in KINDS {
        // Plain chain, excitation input.
        for n in [3, 4] {
            let net = christandl_chain(n, 1.0)?;
            let model = LindbladModel::new(kind, 0.35, net.dim())?;
            let gen = build_generator(&net.hamiltonian(), &model)?;
            let prop = Propagator::new(&gen)?;
            let state = excitation(&net)?;
            let engine = prop.evolve(&state, t)?;
            let brute = brute_force_evolve(&net, kind, 0.35, &state, t)?;
            worst = worst.max(max_abs_diff(engine.density(), brute.density()));
        }
        // Chain with the extra idle qubit, shared-pair input.
        let net = christandl_chain(3, 1.0)?.attach_noninteracting()?;
        let model = LindbladModel::new(kind, 0.35, net.dim())?;
        let gen = build_generator(&net.hamiltonian(), &model)?;
        let prop = Propagator::new(&gen)?;
        let half = C64::new(0.5_f64.sqrt(), 0.0);
        let keeper = net.site_index(0)?;
        let partner = net.site_index(net.input_site())?;
        let bell = SubspaceState::from_amplitudes(net.dim(), &[(keeper, half), (partner, half)])?;
        let engine = prop.evolve(&bell, t)?;
        let brute = brute_force_evolve(&net, kind, 0.35, &bell, t)?;
        worst = worst.max(max_abs_diff(engine.density(), brute.density()));
    }
    Ok(worst)
}

fn boosted_two_site() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for k in 1..=2 {
        let net = shi_chain(2, k, 1.0)?;
        let model = LindbladModel::new(DecoherenceKind::Dissipative, 0.2, net.dim())?;
        let gen = build_generator(&net.hamiltonian(), &model)?;
        let prop = Propagator::new(&gen)?;
        for i in 0..=8 {
            let t = 0.25 * i as f64;
            let f = fidelity_readout(&prop, &net, t)?.transfer;
            let f_cf = cf::shi_transfer_fidelity_two_sites(k, 1.0, 0.2, t)?;
            worst = worst.max((f - f_cf).abs());
        }
    }
    Ok(worst)
}

fn semigroup_property() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for kind in KINDS {
        let (_, prop) = chain_prop(3, kind, 0.3)?;
        let ua = prop.matrix(0.4)?;
        let ub = prop.matrix(0.9)?;
        let uab = prop.matrix(1.3)?;
        worst = worst.max(max_abs_diff(&ua.dot(&ub), &uab));
    }
    Ok(worst)
}

fn conservation_laws() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for kind in KINDS {
        let (net, prop) = chain_prop(4, kind, 0.25)?;
        let prep = prop.prepare(&excitation(&net)?)?;
        for i in 0..=10 {
            let state = prep.at(0.3 * i as f64)?;
            let rho = state.density();
            let trace: C64 = (0..net.dim()).map(|j| rho[[j, j]]).sum();
            worst = worst
                .max((trace - C64::new(1.0, 0.0)).norm())
                .max(hermiticity_error(rho));
        }
    }
    Ok(worst)
}

fn damping_spectrum() -> Result<f64, CliError> {
    let gamma = 0.37;
    let mut worst = 0.0_f64;
    for kind in KINDS {
        for n in 2..=5 {
            let net = christandl_chain(n, 1.0)?;
            let model = LindbladModel::new(kind, gamma, net.dim())?;
            let gen = build_generator(&net.hamiltonian(), &model)?;
            let (values, _) = spinnet::linalg::eig(gen.decoherence_part())?;
            // Expected multiset of decay rates for N sites plus the vacuum.
            let mut expected = Vec::with_capacity((n + 1) * (n + 1));
            match kind {
                DecoherenceKind::Dissipative => {
                    expected.extend(std::iter::repeat(-gamma).take(n * n));
                    expected.extend(std::iter::repeat(-gamma / 2.0).take(2 * n));
                    expected.push(0.0);
                }
                DecoherenceKind::Dephasing => {
                    expected.extend(std::iter::repeat(-gamma).take(n * n - n));
                    expected.extend(std::iter::repeat(-gamma / 2.0).take(2 * n));
                    expected.extend(std::iter::repeat(0.0).take(n + 1));
                }
            }
            expected.sort_by(f64::total_cmp);
            let mut got: Vec<f64> = values.iter().map(|z| z.re).collect();
            got.sort_by(f64::total_cmp);
            for (g, e) in got.iter().zip(&expected) {
                worst = worst.max((g - e).abs());
            }
            for z in values.iter() {
                worst = worst.max(z.im.abs());
            }
        }
    }
    Ok(worst)
}

fn arrival_phase_pattern() -> Result<f64, CliError> {
    let gamma = 0.1;
    let t0 = FRAC_PI_2;
    let mut worst = 0.0_f64;
    for n in 2..=13 {
        let (net, prop) = chain_prop(n, DecoherenceKind::Dissipative, gamma)?;
        let read = fidelity_readout(&prop, &net, t0)?;
        let expected = cf::average_fidelity_dissipative(n, 1.0, gamma, t0)?;
        worst = worst.max((read.average - expected).abs());
    }
    Ok(worst)
}

fn pair_transit_loss() -> Result<f64, CliError> {
    let gamma = 0.2;
    let net = christandl_chain(5, 1.0)?.attach_noninteracting()?;
    let model = LindbladModel::new(DecoherenceKind::Dissipative, gamma, net.dim())?;
    let gen = build_generator(&net.hamiltonian(), &model)?;
    let prop = Propagator::new(&gen)?;
    let half = C64::new(0.5_f64.sqrt(), 0.0);
    let keeper = net.site_index(0)?;
    let partner = net.site_index(net.input_site())?;
    let readout = net.site_index(*net.output_sites().first().expect("chain output"))?;
    let bell = SubspaceState::from_amplitudes(net.dim(), &[(keeper, half), (partner, half)])?;
    let prep = prop.prepare(&bell)?;
    let mut worst = 0.0_f64;
    for t in [0.9, FRAC_PI_2, 2.1] {
        let c = concurrence(&reduced_2q(&prep.at(t)?, keeper, readout)?)?;
        let expected = cf::bell_concurrence_dissipative(5, 1.0, gamma, t)?;
        worst = worst.max((c - expected).abs());
    }
    Ok(worst)
}

fn hub_split_limit() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for arms in 2..=4 {
        for gamma in [0.0, 0.3] {
            let net = multiarm_network(2, 1, arms, 1.0)?;
            let model = LindbladModel::new(DecoherenceKind::Dissipative, gamma, net.dim())?;
            let gen = build_generator(&net.hamiltonian(), &model)?;
            let prop = Propagator::new(&gen)?;
            let ends = net.output_sites();
            let a = net.site_index(ends[0])?;
            let b = net.site_index(ends[1])?;
            let prep = prop.prepare(&excitation(&net)?)?;
            for t in [1.0, FRAC_PI_2, 2.0] {
                let c = concurrence(&reduced_2q(&prep.at(t)?, a, b)?)?;
                let expected = cf::multiarm_end_concurrence_dissipative(2, 1, arms, 1.0, gamma, t)?;
                worst = worst.max((c - expected).abs());
            }
        }
    }
    Ok(worst)
}

fn exponential_fallback() -> Result<f64, CliError> {
    let mut worst = 0.0_f64;
    for kind in KINDS {
        let net = christandl_chain(3, 1.0)?;
        let model = LindbladModel::new(kind, 0.3, net.dim())?;
        let gen = build_generator(&net.hamiltonian(), &model)?;
        let normal = Propagator::new(&gen)?;
        let forced = Propagator::with_condition_limit(&gen, f64::MIN_POSITIVE)?;
        if !matches!(forced.path(), PropagatorPath::MatrixExponential) {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(max_abs_diff(&forced.matrix(1.2)?, &normal.matrix(1.2)?));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_checks_all_pass() {
        let outcomes = run_checks(true).unwrap();
        assert!(!outcomes.is_empty());
        for o in &outcomes {
            assert!(
                o.passed(),
                "{} residual {:e} over tol {:e}",
                o.name,
                o.residual,
                o.tol
            );
        }
    }

    #[test]
    fn table_lists_every_full_check() {
        let t = table(false).unwrap();
        assert_eq!(t.header, vec!["check", "residual", "tol", "pass"]);
        assert_eq!(t.rows.len(), checks().len());
    }
}
