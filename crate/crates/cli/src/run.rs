//! Execute a validated run configuration and emit the CSV table plus the
//! JSON metadata sidecar.

use std::fs;
use std::path::PathBuf;

use dce_core::ode::OdeOptions;
use dce_core::operators::StateVector;
use dce_core::{
    evolve_exact, fidelity, frame_convert, measure, Coupling, Frame, FrameDirection, ModelParams,
    OperatorSet, PropagatorEngine, C64,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{FieldState, Mode, RunConfig, SweepPoint};

/// Probability weight on the top Fock band above which a run is flagged.
const LEAK_WARN_THRESHOLD: f64 = 1e-4;

#[derive(Debug)]
pub enum RunError {
    Numerical(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

fn numerical(e: dce_core::Error) -> RunError {
    RunError::Numerical(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Clean,
    /// norm_leak exceeded the warning threshold at some sample.
    LeakWarning,
}

pub struct RunArtifacts {
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub outcome: RunOutcome,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
struct Row {
    t: f64,
    n_mean_analytic: Option<f64>,
    p_excited_analytic: Option<f64>,
    n_mean_oracle: Option<f64>,
    p_excited_oracle: Option<f64>,
    fidelity: Option<f64>,
    norm_leak_analytic: Option<f64>,
    norm_leak_oracle: Option<f64>,
}

const CSV_HEADER: &str = "t,n_mean_analytic,p_excited_analytic,n_mean_oracle,p_excited_oracle,fidelity,norm_leak_analytic,norm_leak_oracle";

/// 17 significant digits: round-trips exactly through parsing.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt17(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn csv_line(r: &Row) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        fmt17(r.t),
        opt17(r.n_mean_analytic),
        opt17(r.p_excited_analytic),
        opt17(r.n_mean_oracle),
        opt17(r.p_excited_oracle),
        opt17(r.fidelity),
        opt17(r.norm_leak_analytic),
        opt17(r.norm_leak_oracle),
    )
}

fn initial_state(config: &RunConfig) -> Result<StateVector, RunError> {
    let c = config.cutoff;
    match config.initial.field {
        FieldState::Vacuum => StateVector::composite_basis(c, config.initial.atom, 0),
        FieldState::Fock(n) => StateVector::composite_basis(c, config.initial.atom, n),
        FieldState::Coherent(re, im) => {
            StateVector::composite_coherent(c, config.initial.atom, C64::new(re, im))
        }
    }
    .map_err(numerical)
}

fn time_grid(t_max: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| t_max * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Analytic samples in the requested frame.
fn analytic_rows(
    config: &RunConfig,
    params: &ModelParams,
    frame: Frame,
    grid: &[f64],
) -> Result<Vec<(f64, f64, f64)>, RunError> {
    let ops = OperatorSet::new(config.cutoff).map_err(numerical)?;
    let engine = PropagatorEngine::new(params, &ops);
    let psi0 = initial_state(config)?;
    grid.iter()
        .map(|&t| {
            let mut state = engine.apply(t, &psi0);
            if frame == Frame::Lab {
                state = frame_convert(params, &state, t, FrameDirection::ToLab);
            }
            let rec = measure(&state, t, config.cutoff).map_err(numerical)?;
            Ok((rec.n_mean, rec.p_excited, rec.norm_leak))
        })
        .collect()
}

/// Oracle samples in the requested frame.
fn oracle_rows(
    config: &RunConfig,
    params: &ModelParams,
    frame: Frame,
    grid: &[f64],
) -> Result<(Vec<(f64, f64, f64)>, Vec<StateVector>), RunError> {
    let ops = OperatorSet::new(config.cutoff).map_err(numerical)?;
    let psi0 = initial_state(config)?;
    let traj = evolve_exact(
        params,
        config.coupling,
        frame,
        &psi0,
        grid,
        &ops,
        &OdeOptions::with_tol(config.integrator_tol),
    )
    .map_err(numerical)?;
    let mut rows = Vec::with_capacity(grid.len());
    for (k, state) in traj.states.iter().enumerate() {
        let rec = measure(state, grid[k], config.cutoff).map_err(numerical)?;
        rows.push((rec.n_mean, rec.p_excited, rec.norm_leak));
    }
    Ok((rows, traj.states))
}

/// Compare at the final time for one sweep point: endpoint fidelity plus the
/// worst leak seen on either side.
fn sweep_row(config: &RunConfig, pt: &SweepPoint) -> Result<Row, RunError> {
    let params = ModelParams::new(
        config.params.omega0,
        pt.epsilon,
        pt.eta,
        config.params.omega_atom,
        pt.g,
    )
    .map_err(numerical)?;
    let ops = OperatorSet::new(config.cutoff).map_err(numerical)?;
    let psi0 = initial_state(config)?;
    let grid = [0.0, config.t_max];
    let traj = evolve_exact(
        &params,
        config.coupling,
        Frame::Interaction,
        &psi0,
        &grid,
        &ops,
        &OdeOptions::with_tol(config.integrator_tol),
    )
    .map_err(numerical)?;
    let engine = PropagatorEngine::new(&params, &ops);
    let analytic_end = engine.apply(config.t_max, &psi0);
    let oracle_end = &traj.states[1];
    let rec_a = measure(&analytic_end, config.t_max, config.cutoff).map_err(numerical)?;
    let rec_o = measure(oracle_end, config.t_max, config.cutoff).map_err(numerical)?;
    let fid = fidelity(oracle_end, &analytic_end).map_err(numerical)?;
    Ok(Row {
        t: config.t_max,
        n_mean_analytic: Some(rec_a.n_mean),
        p_excited_analytic: Some(rec_a.p_excited),
        n_mean_oracle: Some(rec_o.n_mean),
        p_excited_oracle: Some(rec_o.p_excited),
        fidelity: Some(fid),
        norm_leak_analytic: Some(rec_a.norm_leak),
        norm_leak_oracle: Some(rec_o.norm_leak),
    })
}

#[derive(Serialize)]
struct SweepAxesDump<'a> {
    epsilon: &'a [f64],
    g: &'a [f64],
    eta: &'a [f64],
}

#[derive(Serialize)]
struct ConfigDump<'a> {
    omega0: f64,
    epsilon: f64,
    eta: f64,
    omega_atom: f64,
    g: f64,
    cutoff: usize,
    t_max: f64,
    samples: usize,
    mode: &'a str,
    coupling: &'a str,
    frame: &'a str,
    initial: String,
    integrator_tol: f64,
    out_dir: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepAxesDump<'a>>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    config: ConfigDump<'a>,
    version: &'static str,
    rows: usize,
    norm_leak_max_analytic: Option<f64>,
    norm_leak_max_oracle: Option<f64>,
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_grid: Option<&'a [SweepPoint]>,
}

/// Execute the configured run, write `results.csv` and `results.meta.json`
/// into the output directory, and report whether leakage crossed the warning
/// threshold.
pub fn run(config: &RunConfig, quiet: bool) -> Result<RunArtifacts, RunError> {
    let grid = time_grid(config.t_max, config.samples);
    let mut sweep_points: Option<Vec<SweepPoint>> = None;

    let rows: Vec<Row> = match config.mode {
        Mode::Analytic => {
            let a = analytic_rows(config, &config.params, config.frame, &grid)?;
            grid.iter()
                .zip(a)
                .map(|(&t, (n, pe, leak))| Row {
                    t,
                    n_mean_analytic: Some(n),
                    p_excited_analytic: Some(pe),
                    norm_leak_analytic: Some(leak),
                    ..Row::default()
                })
                .collect()
        }
        Mode::Oracle => {
            let (o, _) = oracle_rows(config, &config.params, config.frame, &grid)?;
            grid.iter()
                .zip(o)
                .map(|(&t, (n, pe, leak))| Row {
                    t,
                    n_mean_oracle: Some(n),
                    p_excited_oracle: Some(pe),
                    norm_leak_oracle: Some(leak),
                    ..Row::default()
                })
                .collect()
        }
        Mode::Compare => {
            // Both engines in the interaction frame: the oracle integrates the
            // fully transformed generator, so the fidelity column isolates
            // the rotating-wave and splitting layers.
            let ops = OperatorSet::new(config.cutoff).map_err(numerical)?;
            let engine = PropagatorEngine::new(&config.params, &ops);
            let psi0 = initial_state(config)?;
            let (o, oracle_states) =
                oracle_rows(config, &config.params, Frame::Interaction, &grid)?;
            let mut rows = Vec::with_capacity(grid.len());
            for (k, &t) in grid.iter().enumerate() {
                let analytic_state = engine.apply(t, &psi0);
                let rec_a = measure(&analytic_state, t, config.cutoff).map_err(numerical)?;
                let fid = fidelity(&oracle_states[k], &analytic_state).map_err(numerical)?;
                rows.push(Row {
                    t,
                    n_mean_analytic: Some(rec_a.n_mean),
                    p_excited_analytic: Some(rec_a.p_excited),
                    n_mean_oracle: Some(o[k].0),
                    p_excited_oracle: Some(o[k].1),
                    fidelity: Some(fid),
                    norm_leak_analytic: Some(rec_a.norm_leak),
                    norm_leak_oracle: Some(o[k].2),
                });
            }
            rows
        }
        Mode::Sweep => {
            let axes = config.sweep.as_ref().expect("validated sweep axes");
            let points = axes.points();
            let rows: Result<Vec<Row>, RunError> = points
                .par_iter()
                .map(|pt| sweep_row(config, pt))
                .collect();
            sweep_points = Some(points);
            rows?
        }
    };

    // Leak audit over everything measured.
    let max_leak = |pick: fn(&Row) -> Option<f64>| {
        rows.iter()
            .filter_map(pick)
            .fold(None::<f64>, |acc, x| Some(acc.map_or(x, |a| a.max(x))))
    };
    let leak_a = max_leak(|r| r.norm_leak_analytic);
    let leak_o = max_leak(|r| r.norm_leak_oracle);
    let worst_leak = leak_a.unwrap_or(0.0).max(leak_o.unwrap_or(0.0));
    let mut warnings = Vec::new();
    if worst_leak > LEAK_WARN_THRESHOLD {
        warnings.push(format!(
            "norm_leak reached {worst_leak:.3e} (> {LEAK_WARN_THRESHOLD:.0e}); raise `cutoff` to keep the truncation faithful"
        ));
    }

    fs::create_dir_all(&config.out_dir)
        .map_err(|e| RunError::Io(format!("creating {}: {e}", config.out_dir.display())))?;
    let csv_path = config.out_dir.join("results.csv");
    let meta_path = config.out_dir.join("results.meta.json");

    let mut csv = String::with_capacity(rows.len() * 160 + 128);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&csv_line(r));
        csv.push('\n');
    }
    fs::write(&csv_path, csv)
        .map_err(|e| RunError::Io(format!("writing {}: {e}", csv_path.display())))?;

    let meta = Metadata {
        config: ConfigDump {
            omega0: config.params.omega0,
            epsilon: config.params.epsilon,
            eta: config.params.eta,
            omega_atom: config.params.omega_atom,
            g: config.params.g,
            cutoff: config.cutoff,
            t_max: config.t_max,
            samples: config.samples,
            mode: config.mode.as_str(),
            coupling: match config.coupling {
                Coupling::Jc => "jc",
                Coupling::Rabi => "rabi",
            },
            frame: match config.frame {
                Frame::Lab => "lab",
                Frame::Interaction => "interaction",
            },
            initial: config.initial.as_string(),
            integrator_tol: config.integrator_tol,
            out_dir: config.out_dir.display().to_string(),
            sweep: config.sweep.as_ref().map(|s| SweepAxesDump {
                epsilon: &s.epsilon,
                g: &s.g,
                eta: &s.eta,
            }),
        },
        version: env!("CARGO_PKG_VERSION"),
        rows: rows.len(),
        norm_leak_max_analytic: leak_a,
        norm_leak_max_oracle: leak_o,
        warnings: &warnings,
        sweep_grid: sweep_points.as_deref(),
    };
    let meta_json = serde_json::to_string_pretty(&meta)
        .map_err(|e| RunError::Io(format!("serializing metadata: {e}")))?;
    fs::write(&meta_path, meta_json)
        .map_err(|e| RunError::Io(format!("writing {}: {e}", meta_path.display())))?;

    if !quiet {
        println!(
            "mode={} cutoff={} rows={} -> {}",
            config.mode.as_str(),
            config.cutoff,
            rows.len(),
            csv_path.display()
        );
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    Ok(RunArtifacts {
        csv_path,
        meta_path,
        outcome: if warnings.is_empty() {
            RunOutcome::Clean
        } else {
            RunOutcome::LeakWarning
        },
        warnings,
    })
}
