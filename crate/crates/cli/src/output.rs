//! CSV and JSON emitters. All numeric formatting is fixed at 17 significant
//! digits so identical runs produce byte-identical files.

use crate::config::{effective_toml, RunConfig};
use qdq_core::analysis::{DecoherenceFit, SweepResult};
use qdq_core::engine::Trajectory;
use std::fmt::Write as _;
use std::path::Path;

fn provenance_header(cfg: &RunConfig) -> String {
    let mut s = String::new();
    for line in effective_toml(cfg).lines() {
        if line.is_empty() {
            let _ = writeln!(s, "#");
        } else if let Some(rest) = line.strip_prefix("# ") {
            let _ = writeln!(s, "# {rest}");
        } else {
            let _ = writeln!(s, "# {line}");
        }
    }
    s
}

/// One row per stored step: `t_ps`, then re/im pairs of all d^2 elements in
/// row-major basis order (for two dots: |00>, |0X>, |X0>, |XX>).
pub fn trajectory_csv(traj: &Trajectory, cfg: &RunConfig) -> String {
    let d = traj.meta.dim;
    let mut s = provenance_header(cfg);
    let mut header = String::from("t_ps");
    for i in 0..d {
        for j in 0..d {
            let _ = write!(header, ",re_rho_{i}{j},im_rho_{i}{j}");
        }
    }
    let _ = writeln!(s, "{header}");
    for (k, state) in traj.states.iter().enumerate() {
        let _ = write!(s, "{:.16e}", traj.times[k]);
        for i in 0..d {
            for j in 0..d {
                let z = state.element(i, j);
                let _ = write!(s, ",{:.16e},{:.16e}", z.re, z.im);
            }
        }
        s.push('\n');
    }
    s
}

/// Columns: temperature_K, gamma_per_ps, gamma_per_ns, residual,
/// fit_window_start_ps, fit_window_end_ps.
pub fn sweep_csv(result: &SweepResult, cfg: &RunConfig) -> String {
    let mut s = provenance_header(cfg);
    let _ = writeln!(
        s,
        "temperature_K,gamma_per_ps,gamma_per_ns,residual,fit_window_start_ps,fit_window_end_ps"
    );
    for p in &result.points {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.temperature,
            p.gamma,
            p.gamma * 1e3,
            p.residual,
            result.fit_window.0,
            result.fit_window.1,
        );
    }
    s
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn fit_json(fit: &Result<DecoherenceFit, String>) -> serde_json::Value {
    match fit {
        Ok(f) => serde_json::json!({
            "gamma_per_ps": finite_or_null(f.gamma),
            "gamma_per_ns": finite_or_null(f.gamma * 1e3),
            "amplitude": f.amplitude,
            "residual": f.residual,
            "window_ps": [f.window.0, f.window.1],
            "method": f.method,
            "non_decaying": f.non_decaying,
            "error": serde_json::Value::Null,
        }),
        Err(e) => serde_json::json!({ "error": e }),
    }
}

pub fn simulate_summary_json(
    traj: &Trajectory,
    fit: &Result<DecoherenceFit, String>,
    cfg: &RunConfig,
) -> String {
    let m = &traj.meta;
    let v = serde_json::json!({
        "tool": format!("qdq {}", env!("CARGO_PKG_VERSION")),
        "dim": m.dim,
        "dt_ps": m.dt,
        "kmax": m.kmax,
        "n_steps": m.n_steps,
        "stride": m.stride,
        "temperature_K": m.temperature,
        "alpha_ps2": m.alpha,
        "omega_c_per_ps": m.omega_c,
        "deterministic": m.deterministic,
        "element": [cfg.element.0, cfg.element.1],
        "fit": fit_json(fit),
    });
    serde_json::to_string_pretty(&v).expect("json serialization cannot fail") + "\n"
}

pub fn sweep_summary_json(result: &SweepResult, cfg: &RunConfig) -> String {
    let points: Vec<serde_json::Value> = result
        .points
        .iter()
        .map(|p| {
            serde_json::json!({
                "temperature_K": p.temperature,
                "gamma_per_ps": finite_or_null(p.gamma),
                "gamma_per_ns": finite_or_null(p.gamma * 1e3),
                "residual": finite_or_null(p.residual),
                "non_decaying": p.non_decaying,
                "error": p.error,
            })
        })
        .collect();
    let v = serde_json::json!({
        "tool": format!("qdq {}", env!("CARGO_PKG_VERSION")),
        "fit_window_ps": [result.fit_window.0, result.fit_window.1],
        "n_points": result.points.len(),
        "temperature_K": cfg.temperature,
        "points": points,
    });
    serde_json::to_string_pretty(&v).expect("json serialization cannot fail") + "\n"
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("writing {}: {e}", path.display()))
}
