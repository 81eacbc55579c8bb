//! Subcommand execution: simulate, sweep, and the self-verification suite.

use crate::config::{self, Mode, RunConfig};
use crate::{output, RunArgs};
use qdq_core::analysis::{
    assemble_sweep, extract_coherence, fit_decoherence_rate, linspace_temperatures, sweep_point,
    DecoherenceFit, SweepPoint, SweepSetup,
};
use qdq_core::bath::{build_bath_kernel, SpectralDensityParams};
use qdq_core::engine::{
    full_path_sum, initial_state_bright_pair, propagate, propagate_with, unitary_reference,
    DensityMatrix, EngineOptions, Trajectory,
};
use qdq_core::matrix::CMatrix;
use qdq_core::model::{
    build_rwa_hamiltonian, coupling_vector, CouplingVector, ExcitonNetworkParams, OperatorMatrix,
};
use qdq_core::Complex64;

pub fn run_command(mode: Mode, args: &RunArgs) -> Result<(), String> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?,
        None => String::new(),
    };
    let mut cfg = config::parse_config(&text)?;
    config::apply_overrides(&mut cfg, args)?;
    match mode {
        Mode::Simulate => simulate(&cfg),
        Mode::Sweep => sweep(&cfg, args.threads.unwrap_or(1).max(1)),
        Mode::OracleCheck => oracle_check(&cfg),
    }
}

/// Rotating-frame system for the configured dot count. The initial state is
/// the maximally coherent one for the configured element: the bright pair
/// for two dots, an equal superposition for one.
pub fn build_system(cfg: &RunConfig) -> Result<(OperatorMatrix, CouplingVector, DensityMatrix), String> {
    let k = cfg.drive_k;
    match cfg.n_dots {
        1 => {
            let h = OperatorMatrix::new(CMatrix::from_real(2, &[0.0, k, k, 0.0]))
                .map_err(|e| e.to_string())?;
            let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            Ok((h, coupling_vector(1).map_err(|e| e.to_string())?, DensityMatrix::from_pure(&[s, s])))
        }
        2 => {
            let j = cfg.coupling.resolved_j()?;
            let params = ExcitonNetworkParams::rwa_pair(k, j).map_err(|e| e.to_string())?;
            let h = build_rwa_hamiltonian(&params).map_err(|e| e.to_string())?;
            Ok((h, coupling_vector(2).map_err(|e| e.to_string())?, initial_state_bright_pair()))
        }
        n => Err(format!("system.n_dots: {n} not supported (1 or 2)")),
    }
}

fn engine_options(cfg: &RunConfig) -> EngineOptions {
    EngineOptions {
        stride: cfg.stride,
        path_filter: cfg.path_filter,
        ..EngineOptions::default()
    }
}

/// Propagate one trajectory with the config's bath and numerics.
pub fn run_trajectory(cfg: &RunConfig) -> Result<Trajectory, String> {
    let (h, coupling, rho0) = build_system(cfg)?;
    let bath = SpectralDensityParams::new(cfg.alpha, cfg.omega_c).map_err(|e| e.to_string())?;
    let kernel = build_bath_kernel(&bath, cfg.temperature, cfg.dt, cfg.kmax)
        .map_err(|e| e.to_string())?;
    propagate_with(&rho0, &h, &kernel, &coupling, cfg.n_steps, &engine_options(cfg))
        .map_err(|e| e.to_string())
}

fn fit_trajectory(traj: &Trajectory, cfg: &RunConfig) -> Result<DecoherenceFit, String> {
    let series =
        extract_coherence(traj, cfg.element, cfg.reduction).map_err(|e| e.to_string())?;
    fit_decoherence_rate(&series, cfg.fit_window, cfg.smoothing_window).map_err(|e| e.to_string())
}

fn simulate(cfg: &RunConfig) -> Result<(), String> {
    let traj = run_trajectory(cfg)?;
    // The fit is reported, not required: short runs legitimately have no
    // fittable window.
    let fit = fit_trajectory(&traj, cfg);
    let dir = cfg.directory.clone();
    output::write_file(&dir, "effective_config.toml", &config::effective_toml(cfg))?;
    if cfg.formats.iter().any(|f| f == "csv") {
        output::write_file(&dir, "trajectory.csv", &output::trajectory_csv(&traj, cfg))?;
    }
    if cfg.formats.iter().any(|f| f == "json") {
        output::write_file(&dir, "summary.json", &output::simulate_summary_json(&traj, &fit, cfg))?;
    }
    Ok(())
}

pub fn sweep_setup(cfg: &RunConfig) -> Result<SweepSetup, String> {
    let (h, coupling, rho0) = build_system(cfg)?;
    let bath = SpectralDensityParams::new(cfg.alpha, cfg.omega_c).map_err(|e| e.to_string())?;
    Ok(SweepSetup {
        hamiltonian: h,
        coupling,
        rho0,
        bath,
        dt: cfg.dt,
        kmax: cfg.kmax,
        n_steps: cfg.n_steps,
        element: cfg.element,
        reduction: cfg.reduction,
        fit_window: cfg.fit_window,
        smoothing_window: cfg.smoothing_window,
        engine: engine_options(cfg),
    })
}

fn sweep(cfg: &RunConfig, threads: usize) -> Result<(), String> {
    let setup = sweep_setup(cfg)?;
    let temps = linspace_temperatures(cfg.sweep_t_min, cfg.sweep_t_max, cfg.sweep_points);
    let points = run_sweep_points(&setup, &temps, threads);
    let result = assemble_sweep(&setup, &temps, points);
    let dir = cfg.directory.clone();
    output::write_file(&dir, "effective_config.toml", &config::effective_toml(cfg))?;
    if cfg.formats.iter().any(|f| f == "csv") {
        output::write_file(&dir, "sweep.csv", &output::sweep_csv(&result, cfg))?;
    }
    if cfg.formats.iter().any(|f| f == "json") {
        output::write_file(&dir, "sweep.json", &output::sweep_summary_json(&result, cfg))?;
    }
    Ok(())
}

/// Evaluate sweep points, round-robin across up to `threads` workers.
/// Results are reassembled in temperature order, so the output does not
/// depend on the thread count.
pub fn run_sweep_points(setup: &SweepSetup, temps: &[f64], threads: usize) -> Vec<SweepPoint> {
    let threads = threads.min(temps.len()).max(1);
    if threads == 1 {
        return temps.iter().map(|&t| sweep_point(setup, t)).collect();
    }
    let mut slots: Vec<Option<SweepPoint>> = vec![None; temps.len()];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..threads {
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                let mut i = w;
                while i < temps.len() {
                    out.push((i, sweep_point(setup, temps[i])));
                    i += threads;
                }
                out
            }));
        }
        for h in handles {
            for (i, p) in h.join().expect("sweep worker panicked") {
                slots[i] = Some(p);
            }
        }
    });
    slots.into_iter().map(|p| p.expect("missing sweep point")).collect()
}

struct Check {
    name: &'static str,
    result: Result<(), String>,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(), String>) -> Check {
    Check { name, result: f() }
}

/// Self-verification against the closed-form references and the brute-force
/// path sum, at the configured bath parameters.
fn oracle_check(cfg: &RunConfig) -> Result<(), String> {
    let j = cfg.coupling.resolved_j()?;
    let params = ExcitonNetworkParams::rwa_pair(cfg.drive_k, j).map_err(|e| e.to_string())?;
    let h = build_rwa_hamiltonian(&params).map_err(|e| e.to_string())?;
    let coupling = coupling_vector(2).map_err(|e| e.to_string())?;
    let rho0 = initial_state_bright_pair();
    let bath = SpectralDensityParams::new(cfg.alpha, cfg.omega_c).map_err(|e| e.to_string())?;

    let checks = vec![
        check("closed-system limit (alpha = 0)", || {
            let free = SpectralDensityParams::new(0.0, cfg.omega_c).map_err(|e| e.to_string())?;
            let kernel = build_bath_kernel(&free, cfg.temperature, cfg.dt, cfg.kmax)
                .map_err(|e| e.to_string())?;
            let traj = propagate(&rho0, &h, &kernel, &coupling, 100).map_err(|e| e.to_string())?;
            for (i, state) in traj.states.iter().enumerate() {
                let want = unitary_reference(&rho0, &h, traj.times[i]);
                let diff = state.mat.max_abs_diff(&want.mat);
                if diff > 1e-10 {
                    return Err(format!("step {i}: deviation {diff:.3e} > 1e-10"));
                }
            }
            Ok(())
        }),
        check("full path-sum equivalence (5 steps)", || {
            let kernel = build_bath_kernel(&bath, cfg.temperature, cfg.dt, 5)
                .map_err(|e| e.to_string())?;
            let a = propagate(&rho0, &h, &kernel, &coupling, 5).map_err(|e| e.to_string())?;
            let b = full_path_sum(&rho0, &h, &kernel, &coupling, 5).map_err(|e| e.to_string())?;
            for i in 0..a.states.len() {
                let diff = a.states[i].mat.max_abs_diff(&b.states[i].mat);
                if diff > 1e-12 {
                    return Err(format!("step {i}: deviation {diff:.3e} > 1e-12"));
                }
            }
            Ok(())
        }),
        check("bright-pair stationarity (K = 0)", || {
            let p0 = ExcitonNetworkParams::rwa_pair(0.0, j).map_err(|e| e.to_string())?;
            let h0 = build_rwa_hamiltonian(&p0).map_err(|e| e.to_string())?;
            let kernel = build_bath_kernel(&bath, cfg.temperature, cfg.dt, cfg.kmax)
                .map_err(|e| e.to_string())?;
            let traj = propagate(&rho0, &h0, &kernel, &coupling, 100).map_err(|e| e.to_string())?;
            for (i, state) in traj.states.iter().enumerate() {
                let diff = state.mat.max_abs_diff(&rho0.mat);
                if diff > 1e-8 {
                    return Err(format!("step {i}: deviation {diff:.3e} > 1e-8"));
                }
            }
            Ok(())
        }),
    ];

    let mut failed = 0;
    for c in &checks {
        match &c.result {
            Ok(()) => println!("ok   {}", c.name),
            Err(e) => {
                failed += 1;
                println!("FAIL {} ({e})", c.name);
            }
        }
    }
    if failed > 0 {
        Err(format!("{failed} of {} oracle checks failed", checks.len()))
    } else {
        Ok(())
    }
}
