//! TOML run configuration: schema, defaults, validation, flag overrides,
//! and the effective-config echo written next to every output.

use crate::RunArgs;
use qdq_core::analysis::Reduction;
use qdq_core::model::{dipole_coupling, DipoleGeometry};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Sweep,
    OracleCheck,
}

/// How the pair coupling J is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    /// J in ps^-1, given directly.
    Direct(f64),
    /// Derived from the dipole geometry: J = mu^2 / (4 pi eps0 eps L^3 hbar).
    Geometry {
        mu_debye: f64,
        epsilon: f64,
        distance_nm: f64,
    },
}

impl CouplingSpec {
    pub fn resolved_j(&self) -> Result<f64, String> {
        match *self {
            CouplingSpec::Direct(j) => Ok(j),
            CouplingSpec::Geometry { mu_debye, epsilon, distance_nm } => {
                let g = DipoleGeometry::new(mu_debye, epsilon, distance_nm)
                    .map_err(|e| format!("system.geometry: {e}"))?;
                Ok(dipole_coupling(&g))
            }
        }
    }
}

/// Fully resolved configuration; every field has a concrete value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_dots: usize,
    pub drive_k: f64,
    pub coupling: CouplingSpec,
    pub alpha: f64,
    pub omega_c: f64,
    pub temperature: f64,
    pub sweep_t_min: f64,
    pub sweep_t_max: f64,
    pub sweep_points: usize,
    pub dt: f64,
    pub kmax: usize,
    pub n_steps: usize,
    pub path_filter: f64,
    pub stride: usize,
    pub element: (usize, usize),
    pub reduction: Reduction,
    pub fit_window: (f64, f64),
    pub smoothing_window: f64,
    pub directory: PathBuf,
    pub formats: Vec<String>,
}

// Raw schema: everything optional, unknown keys rejected.

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: Option<RawSystem>,
    bath: Option<RawBath>,
    numerics: Option<RawNumerics>,
    analysis: Option<RawAnalysis>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    n_dots: Option<usize>,
    drive_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    geometry: Option<RawGeometry>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    mu_debye: Option<f64>,
    epsilon: Option<f64>,
    distance_nm: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    alpha: Option<f64>,
    omega_c: Option<f64>,
    temperature: Option<f64>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    t_min: Option<f64>,
    t_max: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    dt: Option<f64>,
    kmax: Option<usize>,
    n_steps: Option<usize>,
    path_filter: Option<f64>,
    stride: Option<usize>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    element: Option<[usize; 2]>,
    reduction: Option<String>,
    fit_window: Option<[f64; 2]>,
    smoothing_window: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
    formats: Option<Vec<String>>,
}

const DEFAULT_ALPHA: f64 = 0.027 * std::f64::consts::PI;

fn default_directory() -> PathBuf {
    match std::env::var_os("QDQ_OUT_DIR") {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from("qdq-out"),
    }
}

/// Parse and validate; defaults fill every omitted key.
pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| format!("config: {e}"))?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<RunConfig, String> {
    let system = raw.system.unwrap_or_default();
    let bath = raw.bath.unwrap_or_default();
    let numerics = raw.numerics.unwrap_or_default();
    let analysis = raw.analysis.unwrap_or_default();
    let output = raw.output.unwrap_or_default();
    let sweep = bath.sweep.unwrap_or_default();

    let coupling = match (system.j, system.geometry) {
        (Some(_), Some(_)) => {
            return Err("system: j and geometry are mutually exclusive; give one".into())
        }
        (Some(j), None) => CouplingSpec::Direct(j),
        (None, g) => {
            let g = g.unwrap_or(RawGeometry { mu_debye: None, epsilon: None, distance_nm: None });
            CouplingSpec::Geometry {
                mu_debye: g.mu_debye.unwrap_or(79.0),
                epsilon: g.epsilon.unwrap_or(10.0),
                distance_nm: g.distance_nm.unwrap_or(7.5),
            }
        }
    };

    let reduction = match analysis.reduction.as_deref().unwrap_or("re") {
        "re" => Reduction::Re,
        "im" => Reduction::Im,
        "abs" => Reduction::Abs,
        other => return Err(format!("analysis.reduction: unknown value {other:?} (re|im|abs)")),
    };

    let cfg = RunConfig {
        n_dots: system.n_dots.unwrap_or(2),
        drive_k: system.drive_k.unwrap_or(0.24),
        coupling,
        alpha: bath.alpha.unwrap_or(DEFAULT_ALPHA),
        omega_c: bath.omega_c.unwrap_or(2.2),
        temperature: bath.temperature.unwrap_or(77.0),
        sweep_t_min: sweep.t_min.unwrap_or(40.0),
        sweep_t_max: sweep.t_max.unwrap_or(300.0),
        sweep_points: sweep.points.unwrap_or(30),
        dt: numerics.dt.unwrap_or(1.0),
        kmax: numerics.kmax.unwrap_or(3),
        n_steps: numerics.n_steps.unwrap_or(220),
        path_filter: numerics.path_filter.unwrap_or(0.0),
        stride: numerics.stride.unwrap_or(1),
        element: analysis
            .element
            .map(|[a, b]| (a, b))
            .unwrap_or((1, 2)),
        reduction,
        fit_window: analysis
            .fit_window
            .map(|[a, b]| (a, b))
            .unwrap_or((0.0, 200.0)),
        smoothing_window: analysis.smoothing_window.unwrap_or(10.0),
        directory: output.directory.map(PathBuf::from).unwrap_or_else(default_directory),
        formats: output
            .formats
            .unwrap_or_else(|| vec!["csv".into(), "json".into()]),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), String> {
    if !(1..=2).contains(&cfg.n_dots) {
        return Err(format!("system.n_dots: {} not supported (1 or 2)", cfg.n_dots));
    }
    if cfg.drive_k < 0.0 {
        return Err("system.drive_k: must be >= 0".into());
    }
    cfg.coupling.resolved_j()?;
    if cfg.alpha < 0.0 {
        return Err("bath.alpha: must be >= 0".into());
    }
    if cfg.omega_c <= 0.0 {
        return Err("bath.omega_c: must be > 0".into());
    }
    if cfg.temperature <= 0.0 {
        return Err("bath.temperature: must be > 0".into());
    }
    if cfg.sweep_t_min <= 0.0 || cfg.sweep_t_max < cfg.sweep_t_min || cfg.sweep_points == 0 {
        return Err("bath.sweep: need 0 < t_min <= t_max and points >= 1".into());
    }
    if cfg.dt <= 0.0 {
        return Err("numerics.dt: must be > 0".into());
    }
    if cfg.stride == 0 {
        return Err("numerics.stride: must be >= 1".into());
    }
    if !(0.0..1.0).contains(&cfg.path_filter) {
        return Err("numerics.path_filter: must be in [0, 1)".into());
    }
    let d = 1usize << cfg.n_dots;
    if cfg.element.0 >= d || cfg.element.1 >= d {
        return Err(format!("analysis.element: indices must be < {d}"));
    }
    if cfg.fit_window.1 <= cfg.fit_window.0 {
        return Err("analysis.fit_window: end must exceed start".into());
    }
    if cfg.smoothing_window < 0.0 {
        return Err("analysis.smoothing_window: must be >= 0".into());
    }
    if cfg.formats.iter().any(|f| f != "csv" && f != "json") {
        return Err("output.formats: only csv and json are supported".into());
    }
    Ok(())
}

/// Apply command-line overrides; flags win over file values.
pub fn apply_overrides(cfg: &mut RunConfig, args: &RunArgs) -> Result<(), String> {
    if let Some(t) = args.temperature {
        cfg.temperature = t;
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    if let Some(kmax) = args.kmax {
        cfg.kmax = kmax;
    }
    if let Some(out) = &args.out {
        cfg.directory = out.clone();
    }
    validate(cfg)
}

/// Serialize the resolved configuration; reparsing the result yields an
/// identical [`RunConfig`] regardless of environment.
pub fn effective_toml(cfg: &RunConfig) -> String {
    let (j, geometry) = match cfg.coupling {
        CouplingSpec::Direct(j) => (Some(j), None),
        CouplingSpec::Geometry { mu_debye, epsilon, distance_nm } => (
            None,
            Some(RawGeometry {
                mu_debye: Some(mu_debye),
                epsilon: Some(epsilon),
                distance_nm: Some(distance_nm),
            }),
        ),
    };
    let raw = RawConfig {
        system: Some(RawSystem {
            n_dots: Some(cfg.n_dots),
            drive_k: Some(cfg.drive_k),
            j,
            geometry,
        }),
        bath: Some(RawBath {
            alpha: Some(cfg.alpha),
            omega_c: Some(cfg.omega_c),
            temperature: Some(cfg.temperature),
            sweep: Some(RawSweep {
                t_min: Some(cfg.sweep_t_min),
                t_max: Some(cfg.sweep_t_max),
                points: Some(cfg.sweep_points),
            }),
        }),
        numerics: Some(RawNumerics {
            dt: Some(cfg.dt),
            kmax: Some(cfg.kmax),
            n_steps: Some(cfg.n_steps),
            path_filter: Some(cfg.path_filter),
            stride: Some(cfg.stride),
        }),
        analysis: Some(RawAnalysis {
            element: Some([cfg.element.0, cfg.element.1]),
            reduction: Some(
                match cfg.reduction {
                    Reduction::Re => "re",
                    Reduction::Im => "im",
                    Reduction::Abs => "abs",
                }
                .into(),
            ),
            fit_window: Some([cfg.fit_window.0, cfg.fit_window.1]),
            smoothing_window: Some(cfg.smoothing_window),
        }),
        output: Some(RawOutput {
            directory: Some(cfg.directory.display().to_string()),
            formats: Some(cfg.formats.clone()),
        }),
    };
    let mut s = String::new();
    let _ = writeln!(s, "# qdq {} effective configuration", env!("CARGO_PKG_VERSION"));
    if let Ok(j) = cfg.coupling.resolved_j() {
        let _ = writeln!(s, "# resolved pair coupling J = {j:.6} ps^-1");
    }
    s.push_str(&toml::to_string(&raw).expect("config serialization cannot fail"));
    s
}
