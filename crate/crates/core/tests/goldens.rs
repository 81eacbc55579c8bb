//! Frozen regression values. Set UPDATE_GOLDENS=1 to regenerate the kernel
//! golden file after an intentional change.

use qdq_core::bath::{build_bath_kernel, BathKernel, SpectralDensityParams};
use qdq_core::engine::{unitary_reference, DensityMatrix};
use qdq_core::model::{build_rwa_hamiltonian, ExcitonNetworkParams};
use qdq_core::Complex64;
use std::path::PathBuf;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/kernel_gaas_77K_dt1_kmax3.txt")
}

#[test]
fn kernel_text_matches_golden() {
    let p = SpectralDensityParams::gaas();
    let kernel = build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
    let text = kernel.to_text();
    let path = golden_path();
    if std::env::var("UPDATE_GOLDENS").is_ok() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let golden = std::fs::read_to_string(&path).expect("golden file missing; run with UPDATE_GOLDENS=1");
    assert_eq!(text, golden, "kernel text diverged from the golden file");
    // The stored form also parses back to the same table.
    let parsed = BathKernel::from_text(&golden).unwrap();
    assert_eq!(parsed, kernel);
}

#[test]
fn unitary_rabi_populations_are_frozen() {
    let params = ExcitonNetworkParams::rwa_pair(0.24, 1.4).unwrap();
    let h = build_rwa_hamiltonian(&params).unwrap();
    let rho0 = DensityMatrix::from_pure(&[
        Complex64::new(1.0, 0.0),
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::ZERO,
    ]);
    let rho = unitary_reference(&rho0, &h, 2.0);
    let pops: Vec<f64> = (0..4).map(|i| rho.element(i, i).re).collect();
    let expected = [
        0.81368594533235650,
        0.07867828825999282,
        0.07867828825999268,
        0.02895747814765948,
    ];
    for (i, (got, want)) in pops.iter().zip(expected).enumerate() {
        assert!(
            (got - want).abs() < 1e-12,
            "population {i}: got {got:.16}, expected {want:.16}"
        );
    }
}
