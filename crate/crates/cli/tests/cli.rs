//! Config schema, override, and output-format tests.

use qdq_cli::config::{apply_overrides, effective_toml, parse_config, CouplingSpec};
use qdq_cli::output::{sweep_csv, trajectory_csv};
use qdq_cli::run::{run_sweep_points, run_trajectory, sweep_setup};
use qdq_cli::RunArgs;

fn no_args() -> RunArgs {
    RunArgs {
        config: None,
        temperature: None,
        dt: None,
        kmax: None,
        out: None,
        threads: None,
    }
}

#[test]
fn empty_document_yields_full_defaults() {
    let cfg = parse_config("").unwrap();
    assert_eq!(cfg.n_dots, 2);
    assert_eq!(cfg.drive_k, 0.24);
    assert_eq!(cfg.alpha, 0.027 * std::f64::consts::PI);
    assert_eq!(cfg.omega_c, 2.2);
    assert_eq!(cfg.temperature, 77.0);
    assert_eq!(cfg.dt, 1.0);
    assert_eq!(cfg.kmax, 3);
    assert_eq!(cfg.element, (1, 2));
    assert_eq!(cfg.fit_window, (0.0, 200.0));
    assert_eq!(cfg.smoothing_window, 10.0);
    assert_eq!((cfg.sweep_t_min, cfg.sweep_t_max, cfg.sweep_points), (40.0, 300.0, 30));
    match cfg.coupling {
        CouplingSpec::Geometry { mu_debye, epsilon, distance_nm } => {
            assert_eq!((mu_debye, epsilon, distance_nm), (79.0, 10.0, 7.5));
        }
        other => panic!("expected geometry default, got {other:?}"),
    }
    let j = cfg.coupling.resolved_j().unwrap();
    assert!((j - 1.4).abs() < 0.01, "J = {j}");
}

#[test]
fn geometry_resolves_j_in_echo() {
    let cfg = parse_config("[system.geometry]\ndistance_nm = 7.5\n").unwrap();
    let echo = effective_toml(&cfg);
    assert!(echo.contains("resolved pair coupling J = 1.40"), "echo:\n{echo}");
}

#[test]
fn j_and_geometry_conflict() {
    let err = parse_config("[system]\nj = 1.4\n[system.geometry]\ndistance_nm = 7.5\n")
        .unwrap_err();
    assert!(err.contains("mutually exclusive"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let err = parse_config("[bath]\nalhpa = 0.1\n").unwrap_err();
    assert!(err.contains("alhpa"), "{err}");
}

#[test]
fn effective_echo_round_trips() {
    for text in [
        "",
        "[system]\nj = 0.59\n[bath]\ntemperature = 300.0\n",
        "[numerics]\ndt = 0.5\nkmax = 6\n[analysis]\nreduction = \"abs\"\n",
    ] {
        let cfg = parse_config(text).unwrap();
        let reparsed = parse_config(&effective_toml(&cfg)).unwrap();
        assert_eq!(cfg, reparsed, "round trip for {text:?}");
    }
}

#[test]
fn flags_override_config_values() {
    let mut cfg = parse_config("[bath]\ntemperature = 77.0\n[numerics]\ndt = 1.0\n").unwrap();
    let args = RunArgs {
        temperature: Some(120.0),
        dt: Some(0.5),
        kmax: Some(6),
        out: Some("elsewhere".into()),
        ..no_args()
    };
    apply_overrides(&mut cfg, &args).unwrap();
    assert_eq!(cfg.temperature, 120.0);
    assert_eq!(cfg.dt, 0.5);
    assert_eq!(cfg.kmax, 6);
    assert_eq!(cfg.directory, std::path::PathBuf::from("elsewhere"));
}

#[test]
fn trajectory_csv_is_reproducible_and_well_formed() {
    let mut cfg = parse_config("[numerics]\nn_steps = 20\n").unwrap();
    cfg.directory = "unused".into();
    let a = trajectory_csv(&run_trajectory(&cfg).unwrap(), &cfg);
    let b = trajectory_csv(&run_trajectory(&cfg).unwrap(), &cfg);
    assert_eq!(a, b, "identical configs must give byte-identical CSV");

    let lines: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 22); // header + 21 stored steps
    assert!(lines[0].starts_with("t_ps,re_rho_00,im_rho_00,"));
    assert_eq!(lines[0].split(',').count(), 1 + 2 * 16);
}

#[test]
fn sweep_csv_has_documented_columns() {
    let cfg = parse_config(
        "[bath.sweep]\npoints = 2\n[numerics]\nn_steps = 220\n",
    )
    .unwrap();
    let setup = sweep_setup(&cfg).unwrap();
    let temps = [40.0, 300.0];
    let points = run_sweep_points(&setup, &temps, 1);
    let result = qdq_core::analysis::assemble_sweep(&setup, &temps, points);
    let csv = sweep_csv(&result, &cfg);
    let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        lines[0],
        "temperature_K,gamma_per_ps,gamma_per_ns,residual,fit_window_start_ps,fit_window_end_ps"
    );
    assert_eq!(lines.len(), 3);
}

#[test]
fn sweep_is_thread_count_invariant() {
    let cfg = parse_config("[numerics]\nn_steps = 210\n").unwrap();
    let setup = sweep_setup(&cfg).unwrap();
    let temps = qdq_core::analysis::linspace_temperatures(40.0, 300.0, 5);
    let serial = run_sweep_points(&setup, &temps, 1);
    let parallel = run_sweep_points(&setup, &temps, 3);
    assert_eq!(serial, parallel);
}

#[test]
fn simulate_writes_byte_identical_files() {
    let base = tempfile::tempdir().unwrap();
    let config_path = base.path().join("run.toml");
    std::fs::write(&config_path, "[numerics]\nn_steps = 30\n").unwrap();
    let read = |dir: &std::path::Path| {
        let args = RunArgs {
            config: Some(config_path.clone()),
            out: Some(dir.to_path_buf()),
            ..no_args()
        };
        qdq_cli::run::run_command(qdq_cli::config::Mode::Simulate, &args).unwrap();
        (
            std::fs::read(dir.join("trajectory.csv")).unwrap(),
            std::fs::read(dir.join("summary.json")).unwrap(),
            std::fs::read(dir.join("effective_config.toml")).unwrap(),
        )
    };
    // Same output directory both times: the provenance header embeds the
    // effective config, including the directory itself.
    let out = base.path().join("out");
    let a = read(&out);
    let b = read(&out);
    assert_eq!(a, b);
}
