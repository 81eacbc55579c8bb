//! Convergence checks for the finite-memory propagation: the exactly
//! solvable pure-dephasing limit and step-size refinement at fixed physical
//! memory.

use qdq_core::bath::{build_bath_kernel, SpectralDensityParams};
use qdq_core::engine::{
    independent_boson_reference, propagate_with, DensityMatrix, EngineOptions,
};
use qdq_core::matrix::CMatrix;
use qdq_core::model::{coupling_vector, OperatorMatrix};
use qdq_core::Complex64;

fn superposition_state() -> DensityMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::from_pure(&[s, s])
}

/// A single undriven dot dephases as exp(-Gamma(t)); the propagated
/// coherence must track the closed-form result once the memory window covers
/// the bath correlation time.
#[test]
fn pure_dephasing_tracks_closed_form() {
    let p = SpectralDensityParams::gaas();
    let temperature = 77.0;
    let dt = 0.1;
    let kmax = 40; // 4 ps of memory, well past the ~2.5 ps correlation time
    let kernel = build_bath_kernel(&p, temperature, dt, kmax).unwrap();
    let h = OperatorMatrix::new(CMatrix::zeros(2)).unwrap();
    let coupling = coupling_vector(1).unwrap();
    let rho0 = superposition_state();

    let n_steps = 80;
    let traj = propagate_with(&rho0, &h, &kernel, &coupling, n_steps, &EngineOptions::default())
        .unwrap();

    for (i, state) in traj.states.iter().enumerate() {
        let t = traj.times[i];
        let got = 2.0 * state.element(0, 1).norm();
        let want = independent_boson_reference(&p, temperature, t).unwrap();
        assert!(
            (got - want).abs() < 5e-3,
            "t = {t}: propagated {got}, closed form {want}"
        );
    }

    // The coherence must actually decay over the window, so the comparison
    // above is not vacuous.
    let last = 2.0 * traj.states.last().unwrap().element(0, 1).norm();
    assert!(last < 0.9);
}

/// Halving dt (with kmax rescaled to the same physical memory) moves the
/// trajectory by successively smaller amounts.
#[test]
fn step_refinement_converges() {
    let p = SpectralDensityParams::gaas();
    let temperature = 77.0;
    let h = OperatorMatrix::new(CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    let coupling = coupling_vector(1).unwrap();
    let rho0 = superposition_state();
    let t_final = 20.0;
    let memory = 2.0;

    // States on the shared 1 ps grid.
    let run = |dt: f64| -> Vec<DensityMatrix> {
        let kmax = (memory / dt).round() as usize;
        let n_steps = (t_final / dt).round() as usize;
        let per_ps = (1.0 / dt).round() as usize;
        let kernel = build_bath_kernel(&p, temperature, dt, kmax).unwrap();
        let traj =
            propagate_with(&rho0, &h, &kernel, &coupling, n_steps, &EngineOptions::default())
                .unwrap();
        traj.states.iter().step_by(per_ps).cloned().collect()
    };

    let coarse = run(1.0);
    let medium = run(0.5);
    let fine = run(0.25);

    let max_diff = |a: &[DensityMatrix], b: &[DensityMatrix]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.mat.max_abs_diff(&y.mat))
            .fold(0.0f64, f64::max)
    };
    let d_coarse = max_diff(&coarse, &medium);
    let d_fine = max_diff(&medium, &fine);
    assert!(
        d_fine < d_coarse,
        "refinement did not shrink: {d_coarse:.3e} -> {d_fine:.3e}"
    );
    assert!(d_fine < 0.05, "fine-step residual too large: {d_fine:.3e}");
}
