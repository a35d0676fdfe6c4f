//! Run configuration: TOML parsing, validation, defaults.

use std::path::PathBuf;

use dce_core::operators::AtomLevel;
use dce_core::{Coupling, Frame, ModelParams, C64};
use serde::Deserialize;

/// Validation failure naming the offending key.
#[derive(Debug, Clone)]
pub struct ValidationError {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ValidationError {}

fn invalid(key: &str, message: impl Into<String>) -> ValidationError {
    ValidationError {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Execution mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Oracle,
    Compare,
    Sweep,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Oracle => "oracle",
            Mode::Compare => "compare",
            Mode::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ValidationError> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "oracle" => Ok(Mode::Oracle),
            "compare" => Ok(Mode::Compare),
            "sweep" => Ok(Mode::Sweep),
            other => Err(invalid(
                "mode",
                format!("unknown mode `{other}` (expected analytic|oracle|compare|sweep)"),
            )),
        }
    }
}

/// Field part of the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldState {
    Vacuum,
    Fock(usize),
    Coherent(f64, f64),
}

/// Initial composite state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub atom: AtomLevel,
    pub field: FieldState,
}

impl InitialState {
    pub fn as_string(&self) -> String {
        let atom = match self.atom {
            AtomLevel::Ground => "g",
            AtomLevel::Excited => "e",
        };
        match self.field {
            FieldState::Vacuum => format!("{atom}:vacuum"),
            FieldState::Fock(n) => format!("{atom}:fock:{n}"),
            FieldState::Coherent(re, im) => format!("{atom}:coherent:{re},{im}"),
        }
    }
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub g: f64,
    pub eta: f64,
}

/// Grid specs over ε, g, η. Absent axes hold the base value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub epsilon: Vec<f64>,
    pub g: Vec<f64>,
    pub eta: Vec<f64>,
}

impl SweepAxes {
    /// Deterministic row order: ε outermost, then g, then η.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &epsilon in &self.epsilon {
            for &g in &self.g {
                for &eta in &self.eta {
                    out.push(SweepPoint { epsilon, g, eta });
                }
            }
        }
        out
    }
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub cutoff: usize,
    pub t_max: f64,
    pub samples: usize,
    pub mode: Mode,
    pub coupling: Coupling,
    pub frame: Frame,
    pub initial: InitialState,
    pub integrator_tol: f64,
    pub sweep: Option<SweepAxes>,
    pub out_dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    omega0: Option<f64>,
    epsilon: Option<f64>,
    eta: Option<f64>,
    omega_atom: Option<f64>,
    g: Option<f64>,
    cutoff: Option<i64>,
    t_max: Option<f64>,
    samples: Option<i64>,
    mode: Option<String>,
    coupling: Option<String>,
    frame: Option<String>,
    initial: Option<String>,
    integrator_tol: Option<f64>,
    out_dir: Option<String>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    epsilon: Option<Vec<f64>>,
    g: Option<Vec<f64>>,
    eta: Option<Vec<f64>>,
}

fn require<T>(v: Option<T>, key: &str) -> Result<T, ValidationError> {
    v.ok_or_else(|| invalid(key, "missing required key"))
}

fn parse_initial(s: &str, cutoff: usize) -> Result<InitialState, ValidationError> {
    let mut parts = s.split(':');
    let atom = match parts.next() {
        Some("g") => AtomLevel::Ground,
        Some("e") => AtomLevel::Excited,
        _ => {
            return Err(invalid(
                "initial",
                format!("`{s}` must start with `g:` or `e:`"),
            ))
        }
    };
    let field = match parts.next() {
        Some("vacuum") => FieldState::Vacuum,
        Some("fock") => {
            let n: usize = parts
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| invalid("initial", format!("`{s}`: fock requires an index")))?;
            if n >= cutoff {
                return Err(invalid(
                    "initial",
                    format!("fock index {n} must be below cutoff {cutoff}"),
                ));
            }
            FieldState::Fock(n)
        }
        Some("coherent") => {
            let amp = parts
                .next()
                .ok_or_else(|| invalid("initial", format!("`{s}`: coherent requires re,im")))?;
            let mut xy = amp.split(',');
            let re: f64 = xy
                .next()
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| invalid("initial", format!("`{s}`: bad coherent amplitude")))?;
            let im: f64 = xy
                .next()
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| invalid("initial", format!("`{s}`: bad coherent amplitude")))?;
            let a = C64::new(re, im);
            if a.norm_sqr() >= cutoff as f64 / 4.0 {
                return Err(invalid(
                    "initial",
                    format!(
                        "coherent |alpha|^2 = {:.3} must be below cutoff/4 = {}",
                        a.norm_sqr(),
                        cutoff as f64 / 4.0
                    ),
                ));
            }
            FieldState::Coherent(re, im)
        }
        _ => {
            return Err(invalid(
                "initial",
                format!("`{s}` must be one of vacuum | fock:<n> | coherent:<re>,<im>"),
            ))
        }
    };
    if parts.next().is_some() && !matches!(field, FieldState::Fock(_) | FieldState::Coherent(..)) {
        return Err(invalid("initial", format!("trailing junk in `{s}`")));
    }
    Ok(InitialState { atom, field })
}

/// Parse and validate a TOML run configuration, applying defaults
/// (coupling = jc, frame = interaction, integrator_tol = 1e-10,
/// initial = g:vacuum, out_dir = ".").
pub fn parse_config(text: &str) -> Result<RunConfig, ValidationError> {
    parse_config_with_overrides(text, None, None)
}

/// [`parse_config`] with command-line overrides applied before validation.
pub fn parse_config_with_overrides(
    text: &str,
    mode_override: Option<&str>,
    out_dir_override: Option<PathBuf>,
) -> Result<RunConfig, ValidationError> {
    let mut raw: RawConfig =
        toml::from_str(text).map_err(|e| invalid("config", format!("TOML parse error: {e}")))?;
    if let Some(m) = mode_override {
        raw.mode = Some(m.to_string());
    }
    if let Some(d) = out_dir_override {
        raw.out_dir = Some(d.display().to_string());
    }
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<RunConfig, ValidationError> {
    let omega0 = require(raw.omega0, "omega0")?;
    let epsilon = require(raw.epsilon, "epsilon")?;
    let eta = require(raw.eta, "eta")?;
    let omega_atom = require(raw.omega_atom, "omega_atom")?;
    let g = require(raw.g, "g")?;
    if !(omega0 > 0.0) {
        return Err(invalid("omega0", format!("must be > 0, got {omega0}")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(invalid(
            "epsilon",
            format!("must satisfy 0 <= epsilon < 1, got {epsilon}"),
        ));
    }
    if !(eta > 0.0) {
        return Err(invalid("eta", format!("must be > 0, got {eta}")));
    }
    if !(g >= 0.0) {
        return Err(invalid("g", format!("must be >= 0, got {g}")));
    }
    if !omega_atom.is_finite() {
        return Err(invalid("omega_atom", "must be finite"));
    }
    let params = ModelParams::new(omega0, epsilon, eta, omega_atom, g)
        .map_err(|e| invalid("params", e.to_string()))?;

    let cutoff_raw = require(raw.cutoff, "cutoff")?;
    if cutoff_raw < 4 {
        return Err(invalid("cutoff", format!("must be >= 4, got {cutoff_raw}")));
    }
    let cutoff = cutoff_raw as usize;

    let t_max = require(raw.t_max, "t_max")?;
    if !(t_max > 0.0) {
        return Err(invalid("t_max", format!("must be > 0, got {t_max}")));
    }
    let samples_raw = require(raw.samples, "samples")?;
    if samples_raw < 2 {
        return Err(invalid("samples", format!("must be >= 2, got {samples_raw}")));
    }
    let samples = samples_raw as usize;

    let mode = Mode::parse(&require(raw.mode, "mode")?)?;

    let coupling = match raw.coupling.as_deref() {
        None | Some("jc") => Coupling::Jc,
        Some("rabi") => Coupling::Rabi,
        Some(other) => {
            return Err(invalid(
                "coupling",
                format!("unknown coupling `{other}` (expected rabi|jc)"),
            ))
        }
    };
    let frame = match raw.frame.as_deref() {
        None | Some("interaction") => Frame::Interaction,
        Some("lab") => Frame::Lab,
        Some(other) => {
            return Err(invalid(
                "frame",
                format!("unknown frame `{other}` (expected lab|interaction)"),
            ))
        }
    };

    let initial = match raw.initial.as_deref() {
        None => InitialState {
            atom: AtomLevel::Ground,
            field: FieldState::Vacuum,
        },
        Some(s) => parse_initial(s, cutoff)?,
    };

    let integrator_tol = raw.integrator_tol.unwrap_or(1e-10);
    if !(integrator_tol > 0.0 && integrator_tol < 1e-2) {
        return Err(invalid(
            "integrator_tol",
            format!("must be in (0, 1e-2), got {integrator_tol}"),
        ));
    }

    let sweep = match (mode, raw.sweep) {
        (Mode::Sweep, None) => {
            return Err(invalid("sweep", "sweep mode requires a [sweep] table"));
        }
        (Mode::Sweep, Some(rs)) => {
            let axes = SweepAxes {
                epsilon: rs.epsilon.unwrap_or_else(|| vec![epsilon]),
                g: rs.g.unwrap_or_else(|| vec![g]),
                eta: rs.eta.unwrap_or_else(|| vec![eta]),
            };
            if axes.epsilon.len() <= 1 && axes.g.len() <= 1 && axes.eta.len() <= 1 {
                return Err(invalid(
                    "sweep",
                    "sweep mode requires at least one axis with multiple values",
                ));
            }
            for &e in &axes.epsilon {
                if !(0.0..1.0).contains(&e) {
                    return Err(invalid("sweep.epsilon", format!("value {e} out of [0, 1)")));
                }
            }
            for &gv in &axes.g {
                if !(gv >= 0.0) {
                    return Err(invalid("sweep.g", format!("value {gv} must be >= 0")));
                }
            }
            for &ev in &axes.eta {
                if !(ev > 0.0) {
                    return Err(invalid("sweep.eta", format!("value {ev} must be > 0")));
                }
            }
            Some(axes)
        }
        (_, Some(_)) => {
            return Err(invalid(
                "sweep",
                "a [sweep] table is only allowed with mode = \"sweep\"",
            ));
        }
        (_, None) => None,
    };

    Ok(RunConfig {
        params,
        cutoff,
        t_max,
        samples,
        mode,
        coupling,
        frame,
        initial,
        integrator_tol,
        sweep,
        out_dir: PathBuf::from(raw.out_dir.unwrap_or_else(|| ".".to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
omega0 = 1.0
epsilon = 0.05
eta = 2.0
omega_atom = 1.0
g = 0.05
cutoff = 64
t_max = 10.0
samples = 101
mode = "compare"
"#;

    #[test]
    fn minimal_config_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.mode, Mode::Compare);
        assert_eq!(cfg.coupling, Coupling::Jc);
        assert_eq!(cfg.frame, Frame::Interaction);
        assert_eq!(cfg.integrator_tol, 1e-10);
        assert_eq!(
            cfg.initial,
            InitialState {
                atom: AtomLevel::Ground,
                field: FieldState::Vacuum
            }
        );
        assert_eq!(cfg.samples, 101);
    }

    #[test]
    fn epsilon_out_of_range() {
        let text = MINIMAL.replace("epsilon = 0.05", "epsilon = 1.5");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.key, "epsilon");
    }

    #[test]
    fn fock_above_cutoff() {
        let text = format!("{MINIMAL}initial = \"g:fock:70\"\n");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.key, "initial");
        let ok = format!("{MINIMAL}initial = \"e:fock:63\"\n");
        let cfg = parse_config(&ok).unwrap();
        assert_eq!(
            cfg.initial,
            InitialState {
                atom: AtomLevel::Excited,
                field: FieldState::Fock(63)
            }
        );
    }

    #[test]
    fn coherent_guard() {
        let text = format!("{MINIMAL}initial = \"g:coherent:4.1,0.0\"\n");
        assert_eq!(parse_config(&text).unwrap_err().key, "initial");
        let ok = format!("{MINIMAL}initial = \"g:coherent:1.5,-0.5\"\n");
        assert!(parse_config(&ok).is_ok());
    }

    #[test]
    fn missing_required_key() {
        let text = MINIMAL.replace("cutoff = 64\n", "");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.key, "cutoff");
    }

    #[test]
    fn unknown_mode_rejected() {
        let text = MINIMAL.replace("mode = \"compare\"", "mode = \"banana\"");
        assert_eq!(parse_config(&text).unwrap_err().key, "mode");
    }

    #[test]
    fn sweep_requires_axes() {
        let text = MINIMAL.replace("mode = \"compare\"", "mode = \"sweep\"");
        assert_eq!(parse_config(&text).unwrap_err().key, "sweep");
        let with_axis = format!(
            "{}\n[sweep]\nepsilon = [0.01, 0.02, 0.05]\n",
            text.trim_end()
        );
        let cfg = parse_config(&with_axis).unwrap();
        let pts = cfg.sweep.unwrap().points();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].epsilon, 0.01);
        assert_eq!(pts[0].g, 0.05);
        assert_eq!(pts[0].eta, 2.0);
    }

    #[test]
    fn sweep_table_requires_sweep_mode() {
        let text = format!("{}\n[sweep]\nepsilon = [0.01, 0.02]\n", MINIMAL.trim_end());
        assert_eq!(parse_config(&text).unwrap_err().key, "sweep");
    }

    #[test]
    fn sweep_grid_order_is_nested() {
        let axes = SweepAxes {
            epsilon: vec![0.01, 0.02],
            g: vec![0.1],
            eta: vec![2.0, 3.0],
        };
        let pts = axes.points();
        assert_eq!(pts.len(), 4);
        assert_eq!((pts[0].epsilon, pts[0].eta), (0.01, 2.0));
        assert_eq!((pts[1].epsilon, pts[1].eta), (0.01, 3.0));
        assert_eq!((pts[2].epsilon, pts[2].eta), (0.02, 2.0));
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{MINIMAL}bogus_key = 1\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("bogus_key"), "{}", err.message);
    }
}
