//! System-side operators for a network of dipole-coupled exciton qubits.
//!
//! Each quantum dot is a two-level system with ground state |0> and exciton
//! state |X>. Basis states of the network are lexicographic products with
//! dot 1 as the leftmost (most significant) label; for two dots the fixed
//! ordering is |00>, |0X>, |X0>, |XX>.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::ModelError;
use crate::matrix::CMatrix;

/// Hard cap on network size; the Hilbert dimension is 2^n_dots.
pub const MAX_DOTS: usize = 8;

/// Transition dipole in Debye: 1 D = 1e-21/c C m.
const DEBYE_TO_CM: f64 = 1e-21 / 299_792_458.0;
const HBAR: f64 = 1.054_571_817e-34;
const FOUR_PI_EPS0: f64 = 4.0 * core::f64::consts::PI * 8.854_187_812_8e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    RotatingWave,
}

/// Parameters of the exciton network Hamiltonian. Energies in ps^-1.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitonNetworkParams {
    pub n_dots: usize,
    /// Per-dot energy gap Delta_i (only meaningful in the lab frame).
    pub delta: Vec<f64>,
    /// Drive strength K.
    pub drive_k: f64,
    /// Drive frequency omega_L.
    pub omega_l: f64,
    /// Symmetric n_dots x n_dots dipole coupling matrix, row-major, zero diagonal.
    pub j: Vec<f64>,
    pub frame: Frame,
}

impl ExcitonNetworkParams {
    pub fn new(
        n_dots: usize,
        delta: Vec<f64>,
        drive_k: f64,
        omega_l: f64,
        j: Vec<f64>,
        frame: Frame,
    ) -> Result<Self, ModelError> {
        if n_dots == 0 {
            return Err(ModelError::InvalidParams("n_dots must be >= 1".into()));
        }
        if n_dots > MAX_DOTS {
            return Err(ModelError::CapacityExceeded { n_dots, max: MAX_DOTS });
        }
        if delta.len() != n_dots {
            return Err(ModelError::InvalidParams(format!(
                "delta has {} entries, expected {n_dots}",
                delta.len()
            )));
        }
        if j.len() != n_dots * n_dots {
            return Err(ModelError::InvalidParams(format!(
                "J has {} entries, expected {}",
                j.len(),
                n_dots * n_dots
            )));
        }
        if drive_k < 0.0 {
            return Err(ModelError::InvalidParams("drive_K must be >= 0".into()));
        }
        if frame == Frame::Lab && delta.iter().any(|&d| d <= 0.0) {
            return Err(ModelError::InvalidParams(
                "all delta_i must be > 0 in the lab frame".into(),
            ));
        }
        for a in 0..n_dots {
            if j[a * n_dots + a] != 0.0 {
                return Err(ModelError::InvalidParams("J must have zero diagonal".into()));
            }
            for b in 0..n_dots {
                if j[a * n_dots + b] != j[b * n_dots + a] {
                    return Err(ModelError::InvalidParams("J must be symmetric".into()));
                }
            }
        }
        Ok(ExcitonNetworkParams { n_dots, delta, drive_k, omega_l, j, frame })
    }

    /// Identical resonantly driven pair in the rotating frame.
    pub fn rwa_pair(drive_k: f64, j: f64) -> Result<Self, ModelError> {
        Self::new(
            2,
            vec![0.0, 0.0],
            drive_k,
            0.0,
            vec![0.0, j, j, 0.0],
            Frame::RotatingWave,
        )
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_dots
    }
}

/// Geometry determining the dipole-dipole coupling strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleGeometry {
    /// Transition dipole moment in Debye.
    pub mu_debye: f64,
    /// Relative dielectric permittivity.
    pub epsilon: f64,
    /// Inter-dot distance in nm.
    pub distance_nm: f64,
}

impl DipoleGeometry {
    pub fn new(mu_debye: f64, epsilon: f64, distance_nm: f64) -> Result<Self, ModelError> {
        if mu_debye < 0.0 {
            return Err(ModelError::InvalidParams("mu must be >= 0".into()));
        }
        if epsilon <= 0.0 {
            return Err(ModelError::InvalidParams("epsilon must be > 0".into()));
        }
        if distance_nm <= 0.0 {
            return Err(ModelError::InvalidParams("distance must be > 0".into()));
        }
        Ok(DipoleGeometry { mu_debye, epsilon, distance_nm })
    }
}

/// Dipole-dipole coupling J = mu^2 / (4 pi eps0 eps L^3 hbar) in ps^-1.
pub fn dipole_coupling(geom: &DipoleGeometry) -> f64 {
    let mu = geom.mu_debye * DEBYE_TO_CM;
    let l = geom.distance_nm * 1e-9;
    let v_dd = mu * mu / (FOUR_PI_EPS0 * geom.epsilon * l * l * l);
    v_dd / HBAR * 1e-12
}

/// A Hermitian operator on the network Hilbert space in the fixed product
/// basis (for two dots: |00>, |0X>, |X0>, |XX>).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub mat: CMatrix,
}

impl OperatorMatrix {
    /// Wraps a matrix, enforcing hermiticity to 1e-12 elementwise.
    pub fn new(mat: CMatrix) -> Result<Self, ModelError> {
        let defect = mat.hermiticity_defect();
        if defect > 1e-12 {
            return Err(ModelError::InvalidParams(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(OperatorMatrix { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// Eigenvalues of the diagonal system-side bath coupling operator
/// sum_i |X_i><X_i| in the product basis: entry b counts the excited dots
/// of basis state b.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingVector(pub Vec<f64>);

/// Whether dot `i` (1-based from the left label) is excited in basis state `b`.
fn dot_excited(b: usize, i: usize, n_dots: usize) -> bool {
    (b >> (n_dots - i)) & 1 == 1
}

pub fn coupling_vector(n_dots: usize) -> Result<CouplingVector, ModelError> {
    if n_dots == 0 {
        return Err(ModelError::InvalidParams("n_dots must be >= 1".into()));
    }
    if n_dots > MAX_DOTS {
        return Err(ModelError::CapacityExceeded { n_dots, max: MAX_DOTS });
    }
    let d = 1usize << n_dots;
    Ok(CouplingVector((0..d).map(|b| b.count_ones() as f64).collect()))
}

/// Full lab-frame Hamiltonian at time `t`:
/// sum_i (Delta_i/2) sigma_z^i + (K/2) cos(omega_L t) sigma_x^i
/// + sum_{i != j} J_ij sigma_+^i sigma_-^j.
pub fn build_lab_hamiltonian(
    params: &ExcitonNetworkParams,
    t: f64,
) -> Result<OperatorMatrix, ModelError> {
    if params.frame != Frame::Lab {
        return Err(ModelError::UnsupportedConfiguration(
            "build_lab_hamiltonian requires frame = lab".into(),
        ));
    }
    let n = params.n_dots;
    let d = params.dim();
    let mut h = CMatrix::zeros(d);
    let drive = 0.5 * params.drive_k * libm::cos(params.omega_l * t);

    for b in 0..d {
        // sigma_z diagonal: +Delta_i/2 if dot i excited, else -Delta_i/2.
        let mut diag = 0.0;
        for i in 1..=n {
            let sign = if dot_excited(b, i, n) { 1.0 } else { -1.0 };
            diag += 0.5 * params.delta[i - 1] * sign;
        }
        h[(b, b)] = Complex64::new(diag, 0.0);

        // sigma_x drive: flips each dot.
        if drive != 0.0 {
            for i in 1..=n {
                let flipped = b ^ (1 << (n - i));
                h[(flipped, b)] += Complex64::new(drive, 0.0);
            }
        }

        // Excitation exchange: J_ij sigma_+^i sigma_-^j moves the excitation
        // from dot j to dot i.
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let jij = params.j[(i - 1) * n + (j - 1)];
                if jij == 0.0 {
                    continue;
                }
                if dot_excited(b, j, n) && !dot_excited(b, i, n) {
                    let target = (b ^ (1 << (n - j))) | (1 << (n - i));
                    h[(target, b)] += Complex64::new(jij, 0.0);
                }
            }
        }
    }
    OperatorMatrix::new(h)
}

/// The rotating-frame 4x4 pair Hamiltonian for a resonant drive:
/// zero diagonal, K coupling |00> and |XX> to the single-excitation states,
/// and J coupling |0X> <-> |X0>.
pub fn build_rwa_hamiltonian(params: &ExcitonNetworkParams) -> Result<OperatorMatrix, ModelError> {
    if params.frame != Frame::RotatingWave {
        return Err(ModelError::UnsupportedConfiguration(
            "build_rwa_hamiltonian requires frame = rotating-wave".into(),
        ));
    }
    if params.n_dots != 2 {
        return Err(ModelError::UnsupportedConfiguration(format!(
            "the rotating-wave matrix is defined for a pair of dots, got n_dots = {}",
            params.n_dots
        )));
    }
    let k = params.drive_k;
    let j = params.j[1];
    let h = CMatrix::from_real(
        4,
        &[
            0.0, k, k, 0.0, //
            k, 0.0, j, k, //
            k, j, 0.0, k, //
            0.0, k, k, 0.0,
        ],
    );
    OperatorMatrix::new(h)
}
