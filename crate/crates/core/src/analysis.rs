//! Coherence extraction, decoherence-rate fitting, and temperature sweeps.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bath::{build_bath_kernel, SpectralDensityParams};
use crate::engine::{propagate_with, DensityMatrix, EngineOptions, Trajectory};
use crate::error::AnalysisError;
use crate::model::{CouplingVector, OperatorMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Re,
    Im,
    Abs,
}

/// A real time series of one density-matrix element.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub element: (usize, usize),
    pub reduction: Reduction,
}

/// Pointwise extraction of an element time series; no smoothing.
pub fn extract_coherence(
    traj: &Trajectory,
    element: (usize, usize),
    reduction: Reduction,
) -> Result<CoherenceSeries, AnalysisError> {
    let d = traj.meta.dim;
    if element.0 >= d || element.1 >= d {
        return Err(AnalysisError::IndexOutOfRange { index: element, dim: d });
    }
    let values = traj
        .states
        .iter()
        .map(|s| {
            let z = s.element(element.0, element.1);
            match reduction {
                Reduction::Re => z.re,
                Reduction::Im => z.im,
                Reduction::Abs => z.norm(),
            }
        })
        .collect();
    Ok(CoherenceSeries { times: traj.times.clone(), values, element, reduction })
}

/// Result of an exponential-decay fit to a coherence envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceFit {
    /// Decay rate in ps^-1 (negative values are flagged, not errors).
    pub gamma: f64,
    /// Fitted amplitude at t = 0.
    pub amplitude: f64,
    /// Fit window in ps.
    pub window: (f64, f64),
    /// Root-mean-square residual in the log domain.
    pub residual: f64,
    pub method: &'static str,
    /// Set when the fitted rate is negative (non-decaying series).
    pub non_decaying: bool,
}

/// Centered moving average of `values` with `2 half + 1` samples; only
/// centers with a complete window are kept (so an exact exponential stays
/// exactly log-linear after smoothing). Returns (times, values).
fn moving_average(times: &[f64], values: &[f64], half: usize) -> (Vec<f64>, Vec<f64>) {
    if half == 0 || values.len() < 2 * half + 1 {
        if half == 0 {
            return (times.to_vec(), values.to_vec());
        }
        return (Vec::new(), Vec::new());
    }
    let n = values.len();
    let width = 2 * half + 1;
    let mut t_out = Vec::with_capacity(n - 2 * half);
    let mut v_out = Vec::with_capacity(n - 2 * half);
    for i in half..(n - half) {
        let sum: f64 = values[(i - half)..=(i + half)].iter().sum();
        t_out.push(times[i]);
        v_out.push(sum / width as f64);
    }
    (t_out, v_out)
}

/// Envelope of a series: the moving average of its absolute values with a
/// smoothing window given in ps.
pub fn envelope(series: &CoherenceSeries, smoothing_window: f64) -> (Vec<f64>, Vec<f64>) {
    let dt = if series.times.len() >= 2 { series.times[1] - series.times[0] } else { 1.0 };
    let half = libm::round(smoothing_window / (2.0 * dt)) as usize;
    let abs: Vec<f64> = series.values.iter().map(|v| v.abs()).collect();
    moving_average(&series.times, &abs, half)
}

const LOG_FLOOR: f64 = 1e-6;
const MIN_FIT_POINTS: usize = 10;

/// Fit `|values|` to a decaying exponential over `window`.
///
/// Pipeline: absolute value, centered moving average of width
/// `smoothing_window` (to suppress Rabi oscillations), floor at 1e-6, then
/// ordinary least squares on the natural log versus time; `gamma` is the
/// negated slope.
pub fn fit_decoherence_rate(
    series: &CoherenceSeries,
    window: (f64, f64),
    smoothing_window: f64,
) -> Result<DecoherenceFit, AnalysisError> {
    if series.times.len() < 2 {
        return Err(AnalysisError::InsufficientData { usable: series.times.len(), required: MIN_FIT_POINTS });
    }
    let dt = series.times[1] - series.times[0];
    if window.1 <= window.0 {
        return Err(AnalysisError::InvalidWindow("window end must exceed start".into()));
    }
    if window.1 - window.0 < 10.0 * dt {
        return Err(AnalysisError::InvalidWindow(format!(
            "window length {} ps is shorter than 10 dt = {} ps",
            window.1 - window.0,
            10.0 * dt
        )));
    }
    let eps = 1e-9 * dt;
    let first = series.times[0];
    let last = *series.times.last().unwrap();
    if window.0 < first - eps || window.1 > last + eps {
        return Err(AnalysisError::InvalidWindow(format!(
            "window [{}, {}] not covered by series [{first}, {last}]",
            window.0, window.1
        )));
    }

    let idx: Vec<usize> = series
        .times
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= window.0 - eps && t <= window.1 + eps)
        .map(|(i, _)| i)
        .collect();
    let seg_t: Vec<f64> = idx.iter().map(|&i| series.times[i]).collect();
    let seg_v: Vec<f64> = idx.iter().map(|&i| series.values[i].abs()).collect();

    let half = libm::round(smoothing_window / (2.0 * dt)) as usize;
    let (sm_t, sm_v) = moving_average(&seg_t, &seg_v, half);

    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (t, v) in sm_t.iter().zip(sm_v.iter()) {
        if *v >= LOG_FLOOR {
            ts.push(*t);
            logs.push(libm::log(*v));
        }
    }
    if ts.len() < MIN_FIT_POINTS {
        return Err(AnalysisError::InsufficientData { usable: ts.len(), required: MIN_FIT_POINTS });
    }

    let n = ts.len() as f64;
    let t_mean = ts.iter().sum::<f64>() / n;
    let l_mean = logs.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, l) in ts.iter().zip(logs.iter()) {
        sxx += (t - t_mean) * (t - t_mean);
        sxy += (t - t_mean) * (l - l_mean);
    }
    let slope = if sxy == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = l_mean - slope * t_mean;
    let mut ss = 0.0;
    for (t, l) in ts.iter().zip(logs.iter()) {
        let r = l - (intercept + slope * t);
        ss += r * r;
    }
    let residual = libm::sqrt(ss / n);
    let gamma = -slope;

    Ok(DecoherenceFit {
        gamma,
        amplitude: libm::exp(intercept),
        window,
        residual,
        method: "log-ols-envelope",
        non_decaying: gamma < 0.0,
    })
}

/// Everything needed to rerun the same simulation at different temperatures.
#[derive(Debug, Clone)]
pub struct SweepSetup {
    pub hamiltonian: OperatorMatrix,
    pub coupling: CouplingVector,
    pub rho0: DensityMatrix,
    pub bath: SpectralDensityParams,
    pub dt: f64,
    pub kmax: usize,
    pub n_steps: usize,
    pub element: (usize, usize),
    pub reduction: Reduction,
    pub fit_window: (f64, f64),
    pub smoothing_window: f64,
    pub engine: EngineOptions,
}

/// One sweep point; `gamma` is NaN when `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub temperature: f64,
    pub gamma: f64,
    pub residual: f64,
    pub non_decaying: bool,
    pub error: Option<String>,
}

/// Fitted decoherence rates over a temperature list plus per-point
/// diagnostics; `temperatures` and `gammas` are index-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub temperatures: Vec<f64>,
    pub gammas: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub fit_window: (f64, f64),
}

/// Rebuild the kernel, propagate, extract, and fit for a single temperature.
pub fn run_point(setup: &SweepSetup, temperature: f64) -> Result<(Trajectory, DecoherenceFit), String> {
    let kernel = build_bath_kernel(&setup.bath, temperature, setup.dt, setup.kmax)
        .map_err(|e| e.to_string())?;
    let traj = propagate_with(
        &setup.rho0,
        &setup.hamiltonian,
        &kernel,
        &setup.coupling,
        setup.n_steps,
        &setup.engine,
    )
    .map_err(|e| e.to_string())?;
    let series = extract_coherence(&traj, setup.element, setup.reduction).map_err(|e| e.to_string())?;
    let fit = fit_decoherence_rate(&series, setup.fit_window, setup.smoothing_window)
        .map_err(|e| e.to_string())?;
    Ok((traj, fit))
}

/// Sequential sweep over `t_list`; per-point failures are recorded in the
/// diagnostics without aborting the sweep.
pub fn temperature_sweep(setup: &SweepSetup, t_list: &[f64]) -> SweepResult {
    let mut points = Vec::with_capacity(t_list.len());
    for &t in t_list {
        points.push(sweep_point(setup, t));
    }
    assemble_sweep(setup, t_list, points)
}

/// Compute one sweep point (used by callers that parallelize over points).
pub fn sweep_point(setup: &SweepSetup, temperature: f64) -> SweepPoint {
    match run_point(setup, temperature) {
        Ok((_, fit)) => SweepPoint {
            temperature,
            gamma: fit.gamma,
            residual: fit.residual,
            non_decaying: fit.non_decaying,
            error: None,
        },
        Err(e) => SweepPoint {
            temperature,
            gamma: f64::NAN,
            residual: f64::NAN,
            non_decaying: false,
            error: Some(e),
        },
    }
}

/// Assemble points (already in `t_list` order) into a [`SweepResult`].
pub fn assemble_sweep(setup: &SweepSetup, t_list: &[f64], points: Vec<SweepPoint>) -> SweepResult {
    debug_assert_eq!(t_list.len(), points.len());
    SweepResult {
        temperatures: t_list.to_vec(),
        gammas: points.iter().map(|p| p.gamma).collect(),
        points,
        fit_window: setup.fit_window,
    }
}

/// `n` evenly spaced temperatures from `t_min` to `t_max` inclusive.
pub fn linspace_temperatures(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![t_min];
    }
    (0..n)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (n - 1) as f64)
        .collect()
}
