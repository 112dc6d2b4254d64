//! Config file model: one TOML file holds a list of experiments, each naming
//! a network, an environment model, a task, and its grids.

use serde::Deserialize;
use spinnet::{christandl_chain, multiarm_network, shi_chain, DecoherenceKind, SpinNetwork};
use std::f64::consts::PI;
use std::path::Path;

use crate::CliError;

/// Values from the global command-line flags; they take precedence over the
/// corresponding config and recipe values.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub experiment: Vec<ExperimentConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub task: Task,
    /// Output file, joined to the output directory. Defaults to `<name>.csv`.
    pub output: Option<String>,
    pub network: NetworkConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub time: Option<TimeConfig>,
    pub sites: Option<SitesConfig>,
    #[serde(default)]
    pub flags: FlagsConfig,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Evolve,
    FidelityCurve,
    AvgFCurve,
    Peak,
    Fwhm,
    GammaC,
    Distribute,
    CreateW,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Evolve => "evolve",
            Task::FidelityCurve => "fidelity_curve",
            Task::AvgFCurve => "avgf_curve",
            Task::Peak => "peak",
            Task::Fwhm => "fwhm",
            Task::GammaC => "gamma_c",
            Task::Distribute => "distribute",
            Task::CreateW => "create_w",
            Task::Verify => "verify",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub kind: NetworkKind,
    /// Chain length (christandl, shi).
    pub n: Option<usize>,
    /// Odd-bond boost index (shi).
    pub k: Option<usize>,
    /// Input-arm length, per-output-arm length, arm count (multiarm).
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub n_arms: Option<usize>,
    pub lambda: Option<f64>,
    /// Attach a noninteracting keeper qubit (label 0).
    #[serde(default)]
    pub with_ni: bool,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Christandl,
    Shi,
    Multiarm,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: Option<ModelKind>,
    pub gamma: Option<f64>,
    pub gammas: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Dissipative,
    Dephasing,
    None,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub points: Option<usize>,
}

/// Site labels a task reads: `m` is where the protocol starts inside the
/// network, `n` where it is read out. Defaults are per task.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SitesConfig {
    pub m: Option<usize>,
    pub n: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FlagsConfig {
    /// Report the input-averaged fidelity with the arrival phase undone.
    pub correct_phase: Option<bool>,
    /// Bloch angles of the encoded input state (evolve task).
    pub theta: Option<f64>,
    pub phi: Option<f64>,
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let parsed: ConfigFile =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if parsed.experiment.is_empty() {
        return Err(CliError::Config(format!(
            "{}: no [[experiment]] tables",
            path.display()
        )));
    }
    Ok(parsed)
}

/// An experiment with every default and override applied, ready to execute.
#[derive(Debug)]
pub struct Resolved {
    pub name: String,
    pub task: Task,
    pub output: String,
    pub network: SpinNetwork,
    pub kind: DecoherenceKind,
    pub gammas: Vec<f64>,
    /// Inclusive linear time grid for curve tasks.
    pub grid: Vec<f64>,
    /// Search window for peak, width, and critical-point tasks.
    pub window: (f64, f64),
    pub correct_phase: bool,
    pub theta: f64,
    pub phi: f64,
    /// Start and readout site labels (semantics per task).
    pub site_m: usize,
    pub site_n: usize,
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

fn build_network(cfg: &NetworkConfig, lambda: f64) -> Result<SpinNetwork, String> {
    let net = match cfg.kind {
        NetworkKind::Christandl => {
            let n = cfg
                .n
                .ok_or_else(|| "network.n is required for christandl".to_string())?;
            christandl_chain(n, lambda).map_err(|e| e.to_string())?
        }
        NetworkKind::Shi => {
            let n = cfg.n.ok_or_else(|| "network.n is required for shi".to_string())?;
            shi_chain(n, cfg.k.unwrap_or(1), lambda).map_err(|e| e.to_string())?
        }
        NetworkKind::Multiarm => {
            let missing = |field: &str| format!("network.{field} is required for multiarm");
            let n1 = cfg.n1.ok_or_else(|| missing("n1"))?;
            let n2 = cfg.n2.ok_or_else(|| missing("n2"))?;
            let n_arms = cfg.n_arms.ok_or_else(|| missing("n_arms"))?;
            multiarm_network(n1, n2, n_arms, lambda).map_err(|e| e.to_string())?
        }
    };
    if cfg.with_ni {
        net.attach_noninteracting().map_err(|e| e.to_string())
    } else {
        Ok(net)
    }
}

fn resolve_model(
    exp: &ExperimentConfig,
    ov: &Overrides,
) -> Result<(DecoherenceKind, Vec<f64>), String> {
    let model = &exp.model;
    if model.gamma.is_some() && model.gammas.is_some() {
        return Err("model.gamma and model.gammas are mutually exclusive".into());
    }
    let kind = match model.kind {
        None | Some(ModelKind::None) => {
            if model.gamma.is_some() || model.gammas.is_some() {
                return Err("a closed model cannot carry a decoherence rate".into());
            }
            return Ok((DecoherenceKind::Dissipative, vec![0.0]));
        }
        Some(ModelKind::Dissipative) => DecoherenceKind::Dissipative,
        Some(ModelKind::Dephasing) => DecoherenceKind::Dephasing,
    };
    if exp.task == Task::GammaC {
        if model.gamma.is_some() || model.gammas.is_some() {
            return Err("gamma_c searches the rate; leave model.gamma unset".into());
        }
        return Ok((kind, Vec::new()));
    }
    let gammas = if let Some(g) = ov.gamma {
        vec![g]
    } else if let Some(g) = model.gamma {
        vec![g]
    } else if let Some(list) = &model.gammas {
        list.clone()
    } else {
        return Err("model.gamma or model.gammas is required for an open model".into());
    };
    if gammas.is_empty() {
        return Err("model.gammas must be non-empty".into());
    }
    for &g in &gammas {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(format!("rate {g} must be >= 0 and finite"));
        }
    }
    Ok((kind, gammas))
}

pub fn resolve(exp: &ExperimentConfig, index: usize, ov: &Overrides) -> Result<Resolved, CliError> {
    let name = exp
        .name
        .clone()
        .unwrap_or_else(|| format!("experiment{}", index + 1));
    let lambda = ov.lambda.or(exp.network.lambda).unwrap_or(1.0);
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CliError::Config(format!(
            "{name}: lambda {lambda} must be positive"
        )));
    }
    let network = build_network(&exp.network, lambda)
        .map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    let (kind, gammas) =
        resolve_model(exp, ov).map_err(|e| CliError::Config(format!("{name}: {e}")))?;

    let (lo, hi, points) = match &exp.time {
        Some(t) => (
            t.lo.unwrap_or(0.0),
            t.hi.unwrap_or(3.0 * PI / lambda),
            t.points.unwrap_or(200),
        ),
        None => (0.0, 3.0 * PI / lambda, 200),
    };
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(CliError::Config(format!(
            "{name}: time window [{lo}, {hi}] must be finite with 0 <= lo < hi"
        )));
    }
    if points < 2 {
        return Err(CliError::Config(format!(
            "{name}: time.points = {points} must be at least 2"
        )));
    }
    let grid = linspace(lo, hi, points);
    // Search tasks bracket the first arrival unless the window is explicit.
    let window = match &exp.time {
        Some(t) if t.lo.is_some() || t.hi.is_some() => (lo.max(1e-6), hi),
        _ => (0.3 / lambda, 2.9 / lambda),
    };

    let outputs = network.output_sites();
    let far_output = *outputs.first().unwrap_or(&network.input_site());
    let (default_m, default_n) = match exp.task {
        Task::Distribute => (network.input_site(), far_output),
        Task::CreateW => {
            let second = outputs.get(1).copied().ok_or_else(|| {
                CliError::Config(format!("{name}: create_w needs at least two output arms"))
            })?;
            (far_output, second)
        }
        _ => (network.input_site(), far_output),
    };
    let sites = exp.sites.as_ref();
    let site_m = sites.and_then(|s| s.m).unwrap_or(default_m);
    let site_n = sites.and_then(|s| s.n).unwrap_or(default_n);
    network
        .site_index(site_m)
        .and(network.site_index(site_n))
        .map_err(|e| CliError::Config(format!("{name}: {e}")))?;

    if exp.task == Task::Distribute && !network.has_noninteracting() {
        return Err(CliError::Config(format!(
            "{name}: distribute needs network.with_ni = true"
        )));
    }

    let theta = exp.flags.theta.unwrap_or(PI);
    let phi = exp.flags.phi.unwrap_or(0.0);
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(CliError::Config(format!(
            "{name}: theta and phi must be finite"
        )));
    }

    let output = exp.output.clone().unwrap_or_else(|| format!("{name}.csv"));
    Ok(Resolved {
        name,
        task: exp.task,
        output,
        network,
        kind,
        gammas,
        grid,
        window,
        correct_phase: exp.flags.correct_phase.unwrap_or(false),
        theta,
        phi,
        site_m,
        site_n,
    })
}
