//! Iterative finite-memory path-integral propagation of the reduced density
//! matrix, with a brute-force full path-sum oracle and closed-form reference
//! evolutions.
//!
//! Paths live over the Liouville index `a = s_plus * d + s_minus` of
//! forward/backward system states. The system propagator over one step is
//! the exact matrix exponential of the Hamiltonian lifted to Liouville
//! space; the bath enters through influence factors
//! `exp(-(s+_k - s-_k)(eta_{kk'} s+_{k'} - conj(eta_{kk'}) s-_{k'}))`
//! assembled from a [`BathKernel`]. The iterative scheme contracts an
//! augmented tensor over the last `kmax` path slots; terminal-window
//! influence variants are applied at readout so every stored state equals
//! the corresponding untruncated-endpoint path sum.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::bath::{build_bath_kernel, BathKernel, SpectralDensityParams};
use crate::error::{BathError, EngineError};
use crate::matrix::CMatrix;
use crate::model::{CouplingVector, OperatorMatrix};
use crate::quad;
use crate::KB_OVER_HBAR;

/// Reduced density matrix of the exciton network (dimensionless entries).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub mat: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(mat: CMatrix) -> Self {
        DensityMatrix { mat }
    }

    /// Projector onto the normalized version of `v`.
    pub fn from_pure(v: &[Complex64]) -> Self {
        let norm: f64 = libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum());
        let scaled: Vec<Complex64> = v.iter().map(|x| x / norm).collect();
        DensityMatrix { mat: CMatrix::projector(&scaled) }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn trace_defect(&self) -> f64 {
        let t = self.mat.trace();
        libm::hypot(t.re - 1.0, t.im)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (w, _) = self.mat.eigh();
        w[0]
    }

    /// Checks the type invariants: hermiticity to 1e-10 elementwise, trace
    /// 1 +- 1e-10, eigenvalues >= -1e-8.
    pub fn check_invariants(&self) -> Result<(), String> {
        let h = self.mat.hermiticity_defect();
        if h > 1e-10 {
            return Err(format!("hermiticity defect {h:.3e}"));
        }
        let t = self.trace_defect();
        if t > 1e-10 {
            return Err(format!("trace defect {t:.3e}"));
        }
        let e = self.min_eigenvalue();
        if e < -1e-8 {
            return Err(format!("negative eigenvalue {e:.3e}"));
        }
        Ok(())
    }
}

/// The initial condition of the coupled-pair runs: projector onto
/// (|0X> + |X0>)/sqrt(2) in the |00>, |0X>, |X0>, |XX> basis.
pub fn initial_state_bright_pair() -> DensityMatrix {
    let s = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::from_pure(&[Complex64::ZERO, s, s, Complex64::ZERO])
}

/// Parameter record attached to a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub dim: usize,
    pub dt: f64,
    pub kmax: usize,
    pub n_steps: usize,
    pub stride: usize,
    pub temperature: f64,
    pub alpha: f64,
    pub omega_c: f64,
    /// Single-threaded propagation with fixed reduction order; repeated
    /// runs of the same configuration are bit-identical.
    pub deterministic: bool,
}

/// Time-ordered density matrices on a uniform grid plus run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub meta: RunMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Tuning knobs for the propagation; the defaults keep the scheme
/// numerically exact (no path filtering) and store every step.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineOptions {
    /// Store every `stride`-th step (step 0 is always stored).
    pub stride: usize,
    /// Relative amplitude threshold below which sparse paths are dropped;
    /// 0 disables filtering. Amplitudes are compared against the largest
    /// amplitude of the current step.
    pub path_filter: f64,
    /// Largest dense augmented-tensor size in amplitudes.
    pub dense_budget: usize,
    /// Largest sparse path count before the run is aborted.
    pub sparse_budget: usize,
    /// Largest total path count for the full path-sum oracle.
    pub full_sum_budget: u128,
    /// Trace drift that aborts the run with a flagged-quality error.
    pub trace_tol: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            stride: 1,
            path_filter: 0.0,
            dense_budget: 1 << 22,
            sparse_budget: 1 << 22,
            full_sum_budget: 1 << 28,
            trace_tol: 1e-6,
        }
    }
}

/// Exact one-step system propagator in Liouville space:
/// `P = U (x) conj(U)` with `U = exp(-i H dt)`, acting on density matrices
/// flattened row-major.
pub fn short_time_propagator(h: &OperatorMatrix, dt: f64) -> CMatrix {
    let d = h.dim();
    let u = h.mat.expm_minus_i_t(dt);
    let d2 = d * d;
    let mut p = CMatrix::zeros(d2);
    for sp_new in 0..d {
        for sm_new in 0..d {
            let a = sp_new * d + sm_new;
            for sp_old in 0..d {
                for sm_old in 0..d {
                    let b = sp_old * d + sm_old;
                    p[(a, b)] = u[(sp_new, sp_old)] * u[(sm_new, sm_old)].conj();
                }
            }
        }
    }
    p
}

/// Influence-factor lookup tables for one kernel/coupling combination.
struct InfluenceTables {
    d2: usize,
    /// Self factors for interior points, indexed by Liouville index.
    g_mid: Vec<Complex64>,
    /// Self factors for the path start and terminal (half windows).
    g_edge: Vec<Complex64>,
    /// Pair factors `[j-1][a_new * d2 + a_old]` for separation j = 1..=kmax.
    f_mid_mid: Vec<Vec<Complex64>>,
    f_mid_start: Vec<Vec<Complex64>>,
    f_end_mid: Vec<Vec<Complex64>>,
    f_end_start: Vec<Vec<Complex64>>,
}

impl InfluenceTables {
    fn build(kernel: &BathKernel, coupling: &CouplingVector, d: usize) -> Self {
        let d2 = d * d;
        let s = &coupling.0;
        let factor = |eta: Complex64, a: usize, b: usize| -> Complex64 {
            let ds = s[a / d] - s[a % d];
            let z = -ds * (eta * s[b / d] - eta.conj() * s[b % d]);
            z.exp()
        };
        let self_table = |eta: Complex64| -> Vec<Complex64> {
            (0..d2).map(|a| factor(eta, a, a)).collect()
        };
        let pair_table = |eta: Complex64| -> Vec<Complex64> {
            let mut t = Vec::with_capacity(d2 * d2);
            for a in 0..d2 {
                for b in 0..d2 {
                    t.push(factor(eta, a, b));
                }
            }
            t
        };
        let kmax = kernel.kmax;
        InfluenceTables {
            d2,
            g_mid: self_table(kernel.self_eta(false)),
            g_edge: self_table(kernel.self_eta(true)),
            f_mid_mid: (1..=kmax).map(|j| pair_table(kernel.pair_eta(j, false, false))).collect(),
            f_mid_start: (1..=kmax).map(|j| pair_table(kernel.pair_eta(j, true, false))).collect(),
            f_end_mid: (1..=kmax).map(|j| pair_table(kernel.pair_eta(j, false, true))).collect(),
            f_end_start: (1..=kmax).map(|j| pair_table(kernel.pair_eta(j, true, true))).collect(),
        }
    }

    /// Interior-continuation pair factor for the pair `(k, k - j)`.
    fn pair_interior(&self, j: usize, older_point: usize, a_new: usize, a_old: usize) -> Complex64 {
        let t = if older_point == 0 { &self.f_mid_start[j - 1] } else { &self.f_mid_mid[j - 1] };
        t[a_new * self.d2 + a_old]
    }

    /// Terminal-readout pair factor for the pair `(k, k - j)`.
    fn pair_terminal(&self, j: usize, older_point: usize, a_new: usize, a_old: usize) -> Complex64 {
        let t = if older_point == 0 { &self.f_end_start[j - 1] } else { &self.f_end_mid[j - 1] };
        t[a_new * self.d2 + a_old]
    }
}

/// Augmented path tensor over the retained history window. The dense form
/// packs the window digits base d^2 with the oldest slot most significant;
/// the sparse form keys a BTreeMap with the same packing (deterministic
/// iteration order).
enum PathStore {
    Dense { window: usize, amps: Vec<Complex64> },
    Sparse { window: usize, bits: u32, amps: BTreeMap<u128, Complex64> },
}

fn checked_size(d2: usize, window: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..window {
        acc = acc.checked_mul(d2)?;
    }
    Some(acc)
}

struct Propagation<'a> {
    d2: usize,
    kmax: usize,
    wmax: usize,
    prop: &'a CMatrix,
    tables: &'a InfluenceTables,
    opts: &'a EngineOptions,
}

impl Propagation<'_> {
    /// Extend the tensor to point `k_next`, returning the new tensor and the
    /// terminal-window readout of the density matrix at that point.
    fn step(&self, store: &PathStore, k_next: usize) -> Result<(PathStore, Vec<Complex64>), EngineError> {
        let d2 = self.d2;
        let n_pairs = self.kmax.min(k_next);
        let mut rho = vec![Complex64::ZERO; d2];
        match store {
            PathStore::Dense { window, amps } => {
                let m = *window;
                let grow = m < self.wmax;
                let new_window = if grow { m + 1 } else { m };
                let keep = checked_size(d2, new_window - 1).unwrap();
                let mut new_amps = vec![Complex64::ZERO; keep * d2];
                let mut digits = vec![0usize; m];
                for (h, &amp) in amps.iter().enumerate() {
                    if amp == Complex64::ZERO {
                        continue;
                    }
                    let mut rest = h;
                    for i in (0..m).rev() {
                        digits[i] = rest % d2;
                        rest /= d2;
                    }
                    let newest = digits[m - 1];
                    let base = if grow { h * d2 } else { (h % keep) * d2 };
                    for a_new in 0..d2 {
                        let p = self.prop[(a_new, newest)];
                        if p == Complex64::ZERO {
                            continue;
                        }
                        let mut w_int = p * self.tables.g_mid[a_new];
                        let mut w_term = p * self.tables.g_edge[a_new];
                        for j in 1..=n_pairs {
                            let point = k_next - j;
                            let a_old = digits[m - j];
                            w_int *= self.tables.pair_interior(j, point, a_new, a_old);
                            w_term *= self.tables.pair_terminal(j, point, a_new, a_old);
                        }
                        new_amps[base + a_new] += w_int * amp;
                        rho[a_new] += w_term * amp;
                    }
                }
                Ok((PathStore::Dense { window: new_window, amps: new_amps }, rho))
            }
            PathStore::Sparse { window, bits, amps } => {
                let m = *window;
                let bits = *bits;
                let grow = m < self.wmax;
                let new_window = if grow { m + 1 } else { m };
                let mask = (1u128 << bits) - 1;
                let keep_mask = if new_window >= 2 {
                    (1u128 << (bits * (new_window as u32 - 1))) - 1
                } else {
                    0
                };
                let mut new_amps: BTreeMap<u128, Complex64> = BTreeMap::new();
                let mut digits = vec![0usize; m];
                for (&key, &amp) in amps.iter() {
                    if amp == Complex64::ZERO {
                        continue;
                    }
                    for (i, d) in digits.iter_mut().enumerate() {
                        *d = ((key >> (bits * (m - 1 - i) as u32)) & mask) as usize;
                    }
                    let newest = digits[m - 1];
                    let base = (key & keep_mask) << bits;
                    for a_new in 0..d2 {
                        let p = self.prop[(a_new, newest)];
                        if p == Complex64::ZERO {
                            continue;
                        }
                        let mut w_int = p * self.tables.g_mid[a_new];
                        let mut w_term = p * self.tables.g_edge[a_new];
                        for j in 1..=n_pairs {
                            let point = k_next - j;
                            let a_old = digits[m - j];
                            w_int *= self.tables.pair_interior(j, point, a_new, a_old);
                            w_term *= self.tables.pair_terminal(j, point, a_new, a_old);
                        }
                        let w = w_int * amp;
                        if w != Complex64::ZERO {
                            *new_amps.entry(base | a_new as u128).or_insert(Complex64::ZERO) += w;
                        }
                        rho[a_new] += w_term * amp;
                    }
                }
                if self.opts.path_filter > 0.0 {
                    let peak = new_amps.values().map(|v| v.norm()).fold(0.0, f64::max);
                    let cut = self.opts.path_filter * peak;
                    new_amps.retain(|_, v| v.norm() >= cut);
                }
                if new_amps.len() > self.opts.sparse_budget {
                    return Err(EngineError::Capacity {
                        required: new_amps.len() as u128,
                        budget: self.opts.sparse_budget as u128,
                    });
                }
                Ok((PathStore::Sparse { window: new_window, bits, amps: new_amps }, rho))
            }
        }
    }
}

fn rho_from_vec(d: usize, v: &[Complex64]) -> CMatrix {
    CMatrix::from_data(d, v.to_vec())
}

fn check_dims(
    rho0: &DensityMatrix,
    h: &OperatorMatrix,
    coupling: &CouplingVector,
) -> Result<usize, EngineError> {
    let d = h.dim();
    if rho0.dim() != d || coupling.0.len() != d {
        return Err(EngineError::DimensionMismatch(format!(
            "H is {d}x{d}, rho0 is {}x{}, coupling has {} entries",
            rho0.dim(),
            rho0.dim(),
            coupling.0.len()
        )));
    }
    Ok(d)
}

fn meta(
    d: usize,
    kernel: &BathKernel,
    n_steps: usize,
    stride: usize,
) -> RunMeta {
    RunMeta {
        dim: d,
        dt: kernel.dt,
        kmax: kernel.kmax,
        n_steps,
        stride,
        temperature: kernel.temperature,
        alpha: kernel.params.alpha,
        omega_c: kernel.params.omega_c,
        deterministic: true,
    }
}

/// Iterative finite-memory propagation over `n_steps` steps of `kernel.dt`.
pub fn propagate(
    rho0: &DensityMatrix,
    h: &OperatorMatrix,
    kernel: &BathKernel,
    coupling: &CouplingVector,
    n_steps: usize,
) -> Result<Trajectory, EngineError> {
    propagate_with(rho0, h, kernel, coupling, n_steps, &EngineOptions::default())
}

/// As [`propagate`] with explicit engine options.
pub fn propagate_with(
    rho0: &DensityMatrix,
    h: &OperatorMatrix,
    kernel: &BathKernel,
    coupling: &CouplingVector,
    n_steps: usize,
    opts: &EngineOptions,
) -> Result<Trajectory, EngineError> {
    let d = check_dims(rho0, h, coupling)?;
    let d2 = d * d;
    let kmax = kernel.kmax;
    let wmax = kmax.max(1);
    let stride = opts.stride.max(1);

    let prop = short_time_propagator(h, kernel.dt);
    let tables = InfluenceTables::build(kernel, coupling, d);
    let run = Propagation { d2, kmax, wmax, prop: &prop, tables: &tables, opts };

    // Pick a representation for the saturated window.
    let mut store = match checked_size(d2, wmax) {
        Some(full) if full <= opts.dense_budget => {
            let mut amps = vec![Complex64::ZERO; d2];
            for a in 0..d2 {
                amps[a] = rho0.mat.data()[a] * tables.g_edge[a];
            }
            PathStore::Dense { window: 1, amps }
        }
        _ => {
            let bits = (usize::BITS - (d2 - 1).leading_zeros()).max(1);
            if bits as usize * wmax > 128 {
                return Err(EngineError::Capacity {
                    required: u128::MAX,
                    budget: opts.sparse_budget as u128,
                });
            }
            let mut amps = BTreeMap::new();
            for a in 0..d2 {
                let v = rho0.mat.data()[a] * tables.g_edge[a];
                if v != Complex64::ZERO {
                    amps.insert(a as u128, v);
                }
            }
            PathStore::Sparse { window: 1, bits, amps }
        }
    };

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    for step in 1..=n_steps {
        let (next, rho_vec) = run.step(&store, step)?;
        store = next;
        let rho = rho_from_vec(d, &rho_vec);
        let tr = rho.trace();
        let drift = libm::hypot(tr.re - 1.0, tr.im);
        if drift > opts.trace_tol {
            return Err(EngineError::TraceDrift { step, drift });
        }
        if step % stride == 0 {
            times.push(step as f64 * kernel.dt);
            states.push(DensityMatrix::from_matrix(rho));
        }
    }

    Ok(Trajectory { times, states, meta: meta(d, kernel, n_steps, stride) })
}

/// Non-iterative exhaustive path enumeration with the untruncated influence
/// functional; oracle for [`propagate`]. Organized differently from the
/// iterative scheme but summing identical path weights, so it matches
/// `propagate` exactly whenever `kmax >= n_steps`.
pub fn full_path_sum(
    rho0: &DensityMatrix,
    h: &OperatorMatrix,
    kernel: &BathKernel,
    coupling: &CouplingVector,
    n_steps: usize,
) -> Result<Trajectory, EngineError> {
    full_path_sum_with(rho0, h, kernel, coupling, n_steps, &EngineOptions::default())
}

pub fn full_path_sum_with(
    rho0: &DensityMatrix,
    h: &OperatorMatrix,
    kernel: &BathKernel,
    coupling: &CouplingVector,
    n_steps: usize,
    opts: &EngineOptions,
) -> Result<Trajectory, EngineError> {
    let d = check_dims(rho0, h, coupling)?;
    let d2 = d * d;

    let mut required: u128 = 1;
    for _ in 0..=n_steps {
        required = required.saturating_mul(d2 as u128);
    }
    if required > opts.full_sum_budget {
        return Err(EngineError::Capacity { required, budget: opts.full_sum_budget });
    }

    // All pair separations up to n_steps are needed; extend the kernel's
    // coefficient table if its memory is shorter.
    let extended;
    let kernel = if kernel.kmax < n_steps {
        extended = build_bath_kernel(&kernel.params, kernel.temperature, kernel.dt, n_steps)?;
        &extended
    } else {
        kernel
    };

    let prop = short_time_propagator(h, kernel.dt);
    let tables = InfluenceTables::build(kernel, coupling, d);

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut digits = vec![0usize; n_steps + 1];
    for n in 1..=n_steps {
        let mut acc = vec![Complex64::ZERO; d2];
        for a0 in 0..d2 {
            let w0 = rho0.mat.data()[a0] * tables.g_edge[a0];
            if w0 == Complex64::ZERO {
                continue;
            }
            digits[0] = a0;
            sum_paths(&mut digits, 1, n, w0, &prop, &tables, &mut acc);
        }
        let rho = rho_from_vec(d, &acc);
        times.push(n as f64 * kernel.dt);
        states.push(DensityMatrix::from_matrix(rho));
    }
    Ok(Trajectory { times, states, meta: meta(d, kernel, n_steps, 1) })
}

fn sum_paths(
    digits: &mut Vec<usize>,
    k: usize,
    n: usize,
    weight: Complex64,
    prop: &CMatrix,
    tables: &InfluenceTables,
    acc: &mut [Complex64],
) {
    let d2 = tables.d2;
    let terminal = k == n;
    for a in 0..d2 {
        let p = prop[(a, digits[k - 1])];
        if p == Complex64::ZERO {
            continue;
        }
        let mut w = weight * p * if terminal { tables.g_edge[a] } else { tables.g_mid[a] };
        for j in 1..=k {
            let older = k - j;
            w *= if terminal {
                tables.pair_terminal(j, older, a, digits[older])
            } else {
                tables.pair_interior(j, older, a, digits[older])
            };
        }
        if terminal {
            acc[a] += w;
        } else {
            digits[k] = a;
            sum_paths(digits, k + 1, n, w, prop, tables, acc);
        }
    }
}

/// Closed-system evolution `exp(-iHt) rho0 exp(+iHt)` via eigendecomposition.
pub fn unitary_reference(rho0: &DensityMatrix, h: &OperatorMatrix, t: f64) -> DensityMatrix {
    let u = h.mat.expm_minus_i_t(t);
    DensityMatrix::from_matrix(u.mul(&rho0.mat).mul(&u.adjoint()))
}

/// Exactly solvable single-dot pure-dephasing coherence magnitude
/// `exp(-Gamma(t))` with
/// `Gamma(t) = int_0^inf dw/pi J(w) coth(w / 2 k_B T) (1 - cos(wt)) / w^2`.
///
/// This is the frequency-domain form of the real part of `R` doubly
/// integrated over time, evaluated independently of the kernel's
/// time-domain discretization.
pub fn independent_boson_reference(
    p: &SpectralDensityParams,
    temperature: f64,
    t: f64,
) -> Result<f64, BathError> {
    if temperature <= 0.0 {
        return Err(BathError::NonPositiveTemperature(temperature));
    }
    if p.alpha == 0.0 {
        return Ok(1.0);
    }
    let kbt = KB_OVER_HBAR * temperature;
    let upper = 8.0 * p.omega_c;
    let n_panels =
        16usize.max(libm::ceil(upper * t.abs() / core::f64::consts::FRAC_PI_2) as usize);
    let gamma = quad::integrate(
        |w| {
            if w == 0.0 {
                return Complex64::ZERO;
            }
            let j = crate::bath::spectral_density(w, p) / core::f64::consts::PI;
            let th = {
                let x = w / (2.0 * kbt);
                if x < 1e-4 {
                    1.0 / x + x / 3.0
                } else if x > 20.0 {
                    1.0
                } else {
                    let e = libm::exp(2.0 * x);
                    (e + 1.0) / (e - 1.0)
                }
            };
            let osc = (1.0 - libm::cos(w * t)) / (w * w);
            Complex64::new(j * th * osc, 0.0)
        },
        0.0,
        upper,
        1e-10,
        n_panels,
    )?;
    Ok(libm::exp(-gamma.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::SpectralDensityParams;
    use crate::model::{build_rwa_hamiltonian, coupling_vector, ExcitonNetworkParams};

    fn driven_pair() -> OperatorMatrix {
        let p = ExcitonNetworkParams::rwa_pair(0.24, 1.4).unwrap();
        build_rwa_hamiltonian(&p).unwrap()
    }

    #[test]
    fn bright_pair_initial_state() {
        let rho = initial_state_bright_pair();
        assert!((rho.mat.trace().re - 1.0).abs() < 1e-15);
        assert!((rho.element(1, 2).re - 0.5).abs() < 1e-15);
        // Purity 1: rho^2 = rho.
        let sq = rho.mat.mul(&rho.mat);
        assert!(sq.max_abs_diff(&rho.mat) < 1e-15);
        rho.check_invariants().unwrap();
    }

    #[test]
    fn propagator_of_zero_hamiltonian_is_identity() {
        let h = OperatorMatrix::new(CMatrix::zeros(4)).unwrap();
        let p = short_time_propagator(&h, 1.0);
        assert!(p.max_abs_diff(&CMatrix::identity(16)) < 1e-14);
    }

    #[test]
    fn propagator_half_steps_compose() {
        let h = driven_pair();
        let p1 = short_time_propagator(&h, 1.0);
        let ph = short_time_propagator(&h, 0.5);
        assert!(ph.mul(&ph).max_abs_diff(&p1) < 1e-12);
    }

    #[test]
    fn propagator_preserves_trace_and_hermiticity() {
        let h = driven_pair();
        let p = short_time_propagator(&h, 1.0);
        let rho = initial_state_bright_pair();
        let mut v = vec![Complex64::ZERO; 16];
        for a in 0..16 {
            for b in 0..16 {
                v[a] += p[(a, b)] * rho.mat.data()[b];
            }
        }
        let out = DensityMatrix::from_matrix(CMatrix::from_data(4, v));
        assert!(out.trace_defect() < 1e-13);
        assert!(out.mat.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn bright_state_stationary_under_undriven_propagator() {
        let p = ExcitonNetworkParams::rwa_pair(0.0, 1.4).unwrap();
        let h = build_rwa_hamiltonian(&p).unwrap();
        let rho = initial_state_bright_pair();
        let out = unitary_reference(&rho, &h, 0.7);
        assert!(out.mat.max_abs_diff(&rho.mat) < 1e-13);
    }

    #[test]
    fn unitary_reference_at_zero_time() {
        let h = driven_pair();
        let rho = initial_state_bright_pair();
        let out = unitary_reference(&rho, &h, 0.0);
        assert!(out.mat.max_abs_diff(&rho.mat) < 1e-14);
    }

    #[test]
    fn zero_coupling_matches_unitary_evolution() {
        let h = driven_pair();
        let p = SpectralDensityParams::new(0.0, 2.2).unwrap();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let traj = propagate(&rho0, &h, &kernel, &coupling, 20).unwrap();
        for (i, state) in traj.states.iter().enumerate() {
            let reference = unitary_reference(&rho0, &h, traj.times[i]);
            assert!(state.mat.max_abs_diff(&reference.mat) < 1e-10, "step {i}");
        }
    }

    #[test]
    fn one_step_matches_full_path_sum() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let a = propagate(&rho0, &h, &kernel, &coupling, 1).unwrap();
        let b = full_path_sum(&rho0, &h, &kernel, &coupling, 1).unwrap();
        assert!(a.states[1].mat.max_abs_diff(&b.states[1].mat) < 1e-13);
    }

    #[test]
    fn full_path_sum_zero_coupling_is_unitary() {
        let h = driven_pair();
        let p = SpectralDensityParams::new(0.0, 2.2).unwrap();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let traj = full_path_sum(&rho0, &h, &kernel, &coupling, 3).unwrap();
        for (i, state) in traj.states.iter().enumerate() {
            let reference = unitary_reference(&rho0, &h, traj.times[i]);
            assert!(state.mat.max_abs_diff(&reference.mat) < 1e-12, "step {i}");
        }
    }

    #[test]
    fn oracle_equivalence_three_steps() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let a = propagate(&rho0, &h, &kernel, &coupling, 3).unwrap();
        let b = full_path_sum(&rho0, &h, &kernel, &coupling, 3).unwrap();
        for i in 0..a.states.len() {
            assert!(a.states[i].mat.max_abs_diff(&b.states[i].mat) < 1e-12, "step {i}");
        }
    }

    #[test]
    fn dark_subspace_is_stationary() {
        let p = ExcitonNetworkParams::rwa_pair(0.0, 1.4).unwrap();
        let h = build_rwa_hamiltonian(&p).unwrap();
        let bath = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&bath, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let traj = propagate(&rho0, &h, &kernel, &coupling, 30).unwrap();
        for (i, state) in traj.states.iter().enumerate() {
            assert!(state.mat.max_abs_diff(&rho0.mat) < 1e-10, "step {i}");
        }
    }

    #[test]
    fn sparse_matches_dense() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let dense = propagate(&rho0, &h, &kernel, &coupling, 10).unwrap();
        let opts = EngineOptions { dense_budget: 0, ..EngineOptions::default() };
        let sparse = propagate_with(&rho0, &h, &kernel, &coupling, 10, &opts).unwrap();
        for i in 0..dense.states.len() {
            assert!(dense.states[i].mat.max_abs_diff(&sparse.states[i].mat) < 1e-12);
        }
    }

    #[test]
    fn path_filter_stays_close_to_exact() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let exact = propagate(&rho0, &h, &kernel, &coupling, 30).unwrap();
        let opts = EngineOptions {
            dense_budget: 0,
            path_filter: 1e-10,
            ..EngineOptions::default()
        };
        let filtered = propagate_with(&rho0, &h, &kernel, &coupling, 30, &opts).unwrap();
        for i in 0..exact.states.len() {
            assert!(exact.states[i].mat.max_abs_diff(&filtered.states[i].mat) < 1e-7);
        }
    }

    #[test]
    fn stride_stores_every_other_step() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let opts = EngineOptions { stride: 2, ..EngineOptions::default() };
        let traj = propagate_with(&rho0, &h, &kernel, &coupling, 6, &opts).unwrap();
        assert_eq!(traj.times, vec![0.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn capacity_error_when_budget_too_small() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let opts = EngineOptions { dense_budget: 0, sparse_budget: 10, ..EngineOptions::default() };
        let err = propagate_with(&rho0, &h, &kernel, &coupling, 5, &opts).unwrap_err();
        assert!(matches!(err, EngineError::Capacity { .. }));
    }

    #[test]
    fn full_path_sum_capacity_guard() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let err = full_path_sum(&rho0, &h, &kernel, &coupling, 8).unwrap_err();
        assert!(matches!(err, EngineError::Capacity { .. }));
    }

    #[test]
    fn independent_boson_reference_limits() {
        let p = SpectralDensityParams::gaas();
        assert!((independent_boson_reference(&p, 77.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let zero = SpectralDensityParams::new(0.0, 2.2).unwrap();
        assert_eq!(independent_boson_reference(&zero, 77.0, 5.0).unwrap(), 1.0);
        // Monotone drop toward a finite plateau.
        let c1 = independent_boson_reference(&p, 77.0, 1.0).unwrap();
        let c10 = independent_boson_reference(&p, 77.0, 10.0).unwrap();
        assert!(c1 < 1.0 && c10 < c1 && c10 > 0.0);
    }

    #[test]
    fn determinism_bitwise() {
        let h = driven_pair();
        let p = SpectralDensityParams::gaas();
        let kernel = crate::bath::build_bath_kernel(&p, 77.0, 1.0, 3).unwrap();
        let coupling = coupling_vector(2).unwrap();
        let rho0 = initial_state_bright_pair();
        let a = propagate(&rho0, &h, &kernel, &coupling, 15).unwrap();
        let b = propagate(&rho0, &h, &kernel, &coupling, 15).unwrap();
        assert_eq!(a, b);
    }
}
