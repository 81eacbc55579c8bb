//! Randomized property checks for the model, bath, and fit layers.

use proptest::prelude::*;
use qdq_core::analysis::{fit_decoherence_rate, CoherenceSeries, Reduction};
use qdq_core::bath::{build_bath_kernel, SpectralDensityParams};
use qdq_core::model::{
    build_rwa_hamiltonian, dipole_coupling, DipoleGeometry, ExcitonNetworkParams,
};

proptest! {
    #[test]
    fn rwa_hamiltonian_is_hermitian(k in 0.0..5.0f64, j in -5.0..5.0f64) {
        let params = ExcitonNetworkParams::rwa_pair(k, j).unwrap();
        let h = build_rwa_hamiltonian(&params).unwrap();
        prop_assert!(h.mat.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn dipole_coupling_scales_as_inverse_cube(
        mu in 1.0..200.0f64,
        eps in 1.0..30.0f64,
        l in 2.0..50.0f64,
        factor in 1.1..5.0f64,
    ) {
        let a = DipoleGeometry::new(mu, eps, l).unwrap();
        let b = DipoleGeometry::new(mu, eps, l * factor).unwrap();
        let ja = dipole_coupling(&a) * l.powi(3);
        let jb = dipole_coupling(&b) * (l * factor).powi(3);
        prop_assert!((ja - jb).abs() <= 1e-12 * ja.abs());
    }

    #[test]
    fn fit_is_scale_invariant(
        gamma in 1e-4..5e-3f64,
        scale in 1e-3..1e3f64,
    ) {
        let times: Vec<f64> = (0..201).map(|i| i as f64).collect();
        let base: Vec<f64> = times.iter().map(|t| 0.5 * (-gamma * t).exp()).collect();
        let scaled: Vec<f64> = base.iter().map(|v| v * scale).collect();
        let mk = |values: Vec<f64>| CoherenceSeries {
            times: times.clone(),
            values,
            element: (1, 2),
            reduction: Reduction::Re,
        };
        let a = fit_decoherence_rate(&mk(base), (0.0, 200.0), 10.0).unwrap();
        let b = fit_decoherence_rate(&mk(scaled), (0.0, 200.0), 10.0).unwrap();
        prop_assert!((a.gamma - b.gamma).abs() < 1e-12);
    }
}

proptest! {
    // Kernel builds run a quadrature per table entry, so keep the case count
    // small.
    #![proptest_config(ProptestConfig::with_cases(6))]
    #[test]
    fn influence_table_is_linear_in_alpha(alpha in 0.01..0.2f64) {
        let omega_c = 2.2;
        let p1 = SpectralDensityParams::new(alpha, omega_c).unwrap();
        let p2 = SpectralDensityParams::new(2.0 * alpha, omega_c).unwrap();
        let k1 = build_bath_kernel(&p1, 77.0, 1.0, 3).unwrap();
        let k2 = build_bath_kernel(&p2, 77.0, 1.0, 3).unwrap();
        let check = |a: qdq_core::Complex64, b: qdq_core::Complex64| {
            (2.0 * a - b).norm() <= 1e-12 * b.norm().max(1e-30)
        };
        prop_assert!(check(k1.self_eta(false), k2.self_eta(false)));
        prop_assert!(check(k1.self_eta(true), k2.self_eta(true)));
        for j in 1..=3usize {
            for older_start in [false, true] {
                for newer_term in [false, true] {
                    prop_assert!(check(
                        k1.pair_eta(j, older_start, newer_term),
                        k2.pair_eta(j, older_start, newer_term),
                    ));
                }
            }
        }
    }
}
