//! Prebuilt analysis sweeps, one CSV per plot panel: arrival fidelities and
//! their length patterns, the critical decoherence rate, peak widths, and
//! entanglement distribution/creation peaks for both environment kinds.

use rayon::prelude::*;
use spinnet::{
    build_generator, christandl_chain, concurrence, critical_gamma, fidelity_readout, find_peak,
    fwhm, multiarm_network, reduced_2q, C64, DecoherenceKind, LindbladModel, Propagator,
    SpinNetwork, SubspaceState,
};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use crate::config::Overrides;
use crate::csvout::{self, Table, Value};
use crate::CliError;

const KINDS: [DecoherenceKind; 2] = [DecoherenceKind::Dissipative, DecoherenceKind::Dephasing];
/// Chain lengths swept by the chain figures.
const N_RANGE: std::ops::RangeInclusive<usize> = 2..=20;
/// Arrival indices: the excitation refocuses at odd multiples of the base
/// arrival time.
const K_RANGE: std::ops::RangeInclusive<usize> = 1..=10;

pub fn emit(name: &str, out: Option<&Path>, ov: &Overrides) -> Result<(), CliError> {
    let lambda = ov.lambda.unwrap_or(1.0);
    let panels = match name {
        "fig1" => fig1(lambda, ov)?,
        "fig2" => fig2(lambda, ov)?,
        "fig3" => fig3(lambda)?,
        "fig4" => fig4(lambda, ov)?,
        "fig5" => fig5(lambda, ov)?,
        "fig6" => fig6(lambda, ov)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown figure {other:?}; available: fig1 fig2 fig3 fig4 fig5 fig6"
            )))
        }
    };
    let dir = csvout::out_dir(out);
    for (file, table) in &panels {
        let path = dir.join(file);
        csvout::write_table(&path, table)?;
        println!("{name}: wrote {} ({} rows)", path.display(), table.rows.len());
    }
    Ok(())
}

type Panels = Vec<(&'static str, Table)>;

fn raw_prop(net: &SpinNetwork, kind: DecoherenceKind, gamma: f64) -> spinnet::Result<Propagator> {
    let model = LindbladModel::new(kind, gamma, net.dim())?;
    let gen = build_generator(&net.hamiltonian(), &model)?;
    Propagator::new(&gen)
}

fn excitation(net: &SpinNetwork) -> spinnet::Result<SubspaceState> {
    let idx = net.site_index(net.input_site())?;
    SubspaceState::from_amplitudes(net.dim(), &[(idx, C64::new(1.0, 0.0))])
}

fn kind_name(kind: DecoherenceKind) -> &'static str {
    match kind {
        DecoherenceKind::Dissipative => "dissipative",
        DecoherenceKind::Dephasing => "dephasing",
    }
}

fn arrival(lambda: f64, k: usize) -> f64 {
    (2 * k - 1) as f64 * FRAC_PI_2 / lambda
}

fn window(lambda: f64) -> (f64, f64) {
    (0.3 / lambda, 2.9 / lambda)
}

fn per_cell<T, C, F>(cells: Vec<C>, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    C: Send + Sync,
    F: Fn(&C) -> Result<T, CliError> + Sync,
{
    cells.par_iter().map(&f).collect()
}

/// Damped-environment arrivals: transfer at the first ten arrivals for a few
/// lengths, the averaged fidelity there for every length (the three length
/// patterns), and first-peak times of both curves per length.
fn fig1(lambda: f64, ov: &Overrides) -> Result<Panels, CliError> {
    let gamma = ov.gamma.unwrap_or(0.1);
    let (lo, hi) = window(lambda);
    struct PerN {
        n: usize,
        // (k, t, transfer, average)
        arrivals: Vec<(usize, f64, f64, f64)>,
        tc_f: f64,
        tc_avg: f64,
    }
    let rows = per_cell(N_RANGE.collect(), |&n| {
        let net = christandl_chain(n, lambda)?;
        let prop = raw_prop(&net, DecoherenceKind::Dissipative, gamma)?;
        let mut arrivals = Vec::new();
        for k in K_RANGE {
            let t = arrival(lambda, k);
            let read = fidelity_readout(&prop, &net, t)?;
            arrivals.push((k, t, read.transfer, read.average));
        }
        let transfer = |t: f64| Ok(fidelity_readout(&prop, &net, t)?.transfer);
        // The uncorrected average has no arrival maximum for half the
        // lengths, so peak times are read off the phase-corrected curve.
        let corrected = |t: f64| Ok(fidelity_readout(&prop, &net, t)?.phase_corrected);
        let pf = find_peak(transfer, lo, hi)?;
        let pa = find_peak(corrected, lo, hi)?;
        Ok(PerN { n, arrivals, tc_f: pf.value, tc_avg: pa.value })
    })?;

    let mut a = Table::new(vec!["n", "k", "t_over_pi", "f"]);
    for p in rows.iter().filter(|p| [2, 5, 10, 20].contains(&p.n)) {
        for &(k, t, f, _) in &p.arrivals {
            a.push(vec![
                Value::Int(p.n as i64),
                Value::Int(k as i64),
                Value::Num(t / PI),
                Value::Num(f),
            ]);
        }
    }
    let mut b = Table::new(vec!["n", "k", "t_over_pi", "avg_f"]);
    for p in &rows {
        for &(k, t, _, avg) in &p.arrivals {
            b.push(vec![
                Value::Int(p.n as i64),
                Value::Int(k as i64),
                Value::Num(t / PI),
                Value::Num(avg),
            ]);
        }
    }
    let mut inset = Table::new(vec!["n", "tc_f_over_pi", "tc_avg_over_pi"]);
    for p in &rows {
        inset.push(vec![
            Value::Int(p.n as i64),
            Value::Num(p.tc_f / PI),
            Value::Num(p.tc_avg / PI),
        ]);
    }
    Ok(vec![
        ("fig1a.csv", a),
        ("fig1b.csv", b),
        ("fig1_inset.csv", inset),
    ])
}

/// Dephasing arrivals for every length, plus the short-chain averaged
/// fidelity before and after the receiver's phase correction.
fn fig2(lambda: f64, ov: &Overrides) -> Result<Panels, CliError> {
    let gamma = ov.gamma.unwrap_or(0.1);
    let rows = per_cell(N_RANGE.collect(), |&n| {
        let net = christandl_chain(n, lambda)?;
        let prop = raw_prop(&net, DecoherenceKind::Dephasing, gamma)?;
        let mut arrivals = Vec::new();
        for k in K_RANGE {
            let t = arrival(lambda, k);
            let read = fidelity_readout(&prop, &net, t)?;
            arrivals.push((k, t, read.transfer, read.average));
        }
        Ok((n, arrivals))
    })?;

    let mut a = Table::new(vec!["n", "k", "t_over_pi", "f"]);
    let mut b = Table::new(vec!["n", "k", "t_over_pi", "avg_f"]);
    for (n, arrivals) in &rows {
        for &(k, t, f, avg) in arrivals {
            a.push(vec![
                Value::Int(*n as i64),
                Value::Int(k as i64),
                Value::Num(t / PI),
                Value::Num(f),
            ]);
            b.push(vec![
                Value::Int(*n as i64),
                Value::Int(k as i64),
                Value::Num(t / PI),
                Value::Num(avg),
            ]);
        }
    }

    let net = christandl_chain(3, lambda)?;
    let prop = raw_prop(&net, DecoherenceKind::Dephasing, gamma)?;
    let mut inset = Table::new(vec!["n", "k", "t_over_pi", "avg_f", "avg_f_corrected"]);
    for k in K_RANGE {
        let t = arrival(lambda, k);
        let read = fidelity_readout(&prop, &net, t)?;
        inset.push(vec![
            Value::Int(3),
            Value::Int(k as i64),
            Value::Num(t / PI),
            Value::Num(read.average),
            Value::Num(read.phase_corrected),
        ]);
    }
    Ok(vec![
        ("fig2a.csv", a),
        ("fig2b.csv", b),
        ("fig2_inset.csv", inset),
    ])
}

/// Critical dephasing rate per length: where the phase-corrected averaged
/// fidelity at first arrival falls to the classical benchmark 2/3.
fn fig3(lambda: f64) -> Result<Panels, CliError> {
    let t0 = arrival(lambda, 1);
    let rows = per_cell(N_RANGE.collect(), |&n| {
        let net = christandl_chain(n, lambda)?;
        let merit = |g: f64| {
            let prop = raw_prop(&net, DecoherenceKind::Dephasing, g)?;
            Ok(fidelity_readout(&prop, &net, t0)?.phase_corrected)
        };
        let found = critical_gamma(merit, 2.0 / 3.0, 10.0 * lambda, 1e-4 * lambda)?;
        Ok((n, found.value))
    })?;
    let mut table = Table::new(vec!["n", "gamma_c"]);
    for (n, gc) in rows {
        table.push(vec![Value::Int(n as i64), Value::Num(gc)]);
    }
    Ok(vec![("fig3.csv", table)])
}

/// First-peak full width at half maximum per length for both environment
/// kinds; averaged-fidelity widths are measured on the phase-corrected
/// excess over its 1/2 floor.
fn fig4(lambda: f64, ov: &Overrides) -> Result<Panels, CliError> {
    let gamma = ov.gamma.unwrap_or(0.1);
    let (lo, hi) = window(lambda);
    let radius = 2.0 / lambda;
    let rows = per_cell(N_RANGE.collect(), |&n| {
        let net = christandl_chain(n, lambda)?;
        let mut widths = [0.0_f64; 4];
        for (slot, kind) in KINDS.into_iter().enumerate() {
            let prop = raw_prop(&net, kind, gamma)?;
            let transfer = |t: f64| Ok(fidelity_readout(&prop, &net, t)?.transfer);
            let excess = |t: f64| Ok(fidelity_readout(&prop, &net, t)?.phase_corrected - 0.5);
            let pf = find_peak(&transfer, lo, hi)?;
            let wf = fwhm(&transfer, pf.value, pf.objective, radius)?;
            let pa = find_peak(&excess, lo, hi)?;
            let wa = fwhm(&excess, pa.value, pa.objective, radius)?;
            widths[2 * slot] = wf.value;
            widths[2 * slot + 1] = wa.value;
        }
        Ok((n, widths))
    })?;
    let mut table = Table::new(vec![
        "n",
        "width_f_dissipative",
        "width_avg_dissipative",
        "width_f_dephasing",
        "width_avg_dephasing",
    ]);
    for (n, w) in rows {
        table.push(vec![
            Value::Int(n as i64),
            Value::Num(w[0]),
            Value::Num(w[1]),
            Value::Num(w[2]),
            Value::Num(w[3]),
        ]);
    }
    Ok(vec![("fig4.csv", table)])
}

/// Entanglement distribution down the chain: peak time and peak concurrence
/// between the kept qubit and the far end versus length and rate, plus the
/// concurrence dynamics for two lengths.
fn fig5(lambda: f64, ov: &Overrides) -> Result<Panels, CliError> {
    let rates = match ov.gamma {
        Some(g) => vec![g],
        None => vec![0.1, 0.2, 0.3, 0.4, 0.5],
    };
    let (lo, hi) = window(lambda);
    let mut cells = Vec::new();
    for kind in KINDS {
        for &g in &rates {
            for n in 3..=20 {
                cells.push((kind, g, n));
            }
        }
    }
    let pair_prep = |kind: DecoherenceKind,
                     g: f64,
                     n: usize|
     -> Result<(SpinNetwork, Propagator, usize, usize), CliError> {
        let net = christandl_chain(n, lambda)?.attach_noninteracting()?;
        let prop = raw_prop(&net, kind, g)?;
        let keeper = net.site_index(0)?;
        let readout = net.site_index(*net.output_sites().first().expect("chain output"))?;
        Ok((net, prop, keeper, readout))
    };
    let bell_of = |net: &SpinNetwork, keeper: usize| -> spinnet::Result<SubspaceState> {
        let half = C64::new(0.5_f64.sqrt(), 0.0);
        let partner = net.site_index(net.input_site())?;
        SubspaceState::from_amplitudes(net.dim(), &[(keeper, half), (partner, half)])
    };
    let results = per_cell(cells, |&(kind, g, n)| {
        let (net, prop, keeper, readout) = pair_prep(kind, g, n)?;
        let prep = prop.prepare(&bell_of(&net, keeper)?)?;
        let curve = |t: f64| concurrence(&reduced_2q(&prep.at(t)?, keeper, readout)?);
        let peak = find_peak(curve, lo, hi)?;
        Ok((kind, g, n, peak.value, peak.objective))
    })?;
    let mut tc = Table::new(vec!["kind", "gamma", "n", "tc_over_pi"]);
    let mut cmax = Table::new(vec!["kind", "gamma", "n", "c_max"]);
    for (kind, g, n, t, c) in results {
        let tag = || Value::Text(kind_name(kind).to_string());
        tc.push(vec![tag(), Value::Num(g), Value::Int(n as i64), Value::Num(t / PI)]);
        cmax.push(vec![tag(), Value::Num(g), Value::Int(n as i64), Value::Num(c)]);
    }

    let g0 = rates[0];
    let mut inset = Table::new(vec!["kind", "n", "t_over_pi", "C"]);
    for kind in KINDS {
        for n in [5, 10] {
            let (net, prop, keeper, readout) = pair_prep(kind, g0, n)?;
            let prep = prop.prepare(&bell_of(&net, keeper)?)?;
            for i in 0..=150 {
                let t = PI * i as f64 / 150.0;
                let c = concurrence(&reduced_2q(&prep.at(t)?, keeper, readout)?)?;
                inset.push(vec![
                    Value::Text(kind_name(kind).to_string()),
                    Value::Int(n as i64),
                    Value::Num(t / PI),
                    Value::Num(c),
                ]);
            }
        }
    }
    Ok(vec![
        ("fig5_tc.csv", tc),
        ("fig5_cmax.csv", cmax),
        ("fig5_inset.csv", inset),
    ])
}

/// Entanglement creation on the branched network: peak time and peak
/// pairwise concurrence between two arm ends versus feeding-segment length.
fn fig6(lambda: f64, ov: &Overrides) -> Result<Panels, CliError> {
    let gamma = ov.gamma.unwrap_or(0.3);
    let (lo, hi) = window(lambda);
    let mut cells = Vec::new();
    for kind in KINDS {
        for n1 in 2..=20 {
            cells.push((kind, n1));
        }
    }
    let results = per_cell(cells, |&(kind, n1)| {
        let net = multiarm_network(n1, 1, 3, lambda)?;
        let prop = raw_prop(&net, kind, gamma)?;
        let ends = net.output_sites();
        let a = net.site_index(ends[0])?;
        let b = net.site_index(ends[1])?;
        let prep = prop.prepare(&excitation(&net)?)?;
        let curve = |t: f64| concurrence(&reduced_2q(&prep.at(t)?, a, b)?);
        let peak = find_peak(curve, lo, hi)?;
        Ok((kind, n1, peak.value, peak.objective))
    })?;
    let mut table = Table::new(vec!["kind", "n1", "tc_over_pi", "c_max"]);
    for (kind, n1, t, c) in results {
        table.push(vec![
            Value::Text(kind_name(kind).to_string()),
            Value::Int(n1 as i64),
            Value::Num(t / PI),
            Value::Num(c),
        ]);
    }
    Ok(vec![("fig6.csv", table)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_figure_is_a_config_error() {
        let err = emit("fig99", None, &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn short_chain_arrival_rows_match_the_loss_law() {
        let dir = tempfile::tempdir().unwrap();
        // Restrict the sweep indirectly: fig2's first panel includes n = 2,
        // whose first-arrival transfer under dephasing has a simple value to
        // spot-check after parsing the CSV back.
        emit("fig2", Some(dir.path()), &Overrides::default()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("fig2a.csv")).unwrap();
        let first = text.lines().nth(1).unwrap();
        let cols: Vec<&str> = first.split(',').collect();
        assert_eq!(cols[0], "2");
        assert_eq!(cols[1], "1");
        let f: f64 = cols[3].parse().unwrap();
        // Two-site dephasing reduces to a damped oscillation of the
        // population difference z: z'' + gamma z' + 4 lambda^2 z = 0, so
        // z(t) = exp(-gamma t / 2) (cos wt + gamma/(2w) sin wt) with
        // w = sqrt(4 lambda^2 - gamma^2/4), and f = (1 - z)/2.
        let (gamma, t0) = (0.1, FRAC_PI_2);
        let w = (4.0_f64 - gamma * gamma / 4.0).sqrt();
        let z = (-gamma * t0 / 2.0).exp()
            * ((w * t0).cos() + gamma / (2.0 * w) * (w * t0).sin());
        let expected = 0.5 * (1.0 - z);
        assert!((f - expected).abs() < 1e-10, "got {f}, want {expected}");
    }
}
