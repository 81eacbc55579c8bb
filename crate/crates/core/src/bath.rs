//! Acoustic-phonon bath: spectral density, finite-temperature correlation
//! function, and the discretized influence-functional coefficient table.
//!
//! The spectral density is super-Ohmic with a Gaussian cutoff,
//! `J(w) = alpha w^3 exp(-(w/w_c)^2)`, and the correlation function is
//!
//! ```text
//! R(t) = int_0^inf dw/pi J(w) [cos(wt) coth(w / 2 k_B T) - i sin(wt)]
//! ```
//!
//! The coefficient table discretizes the influence functional on a uniform
//! time grid with step `dt` and memory length `kmax`. Each time point `k`
//! carries a window of width `dt` centered on `t_k`; the first and the
//! terminal point of a path carry half windows (`[0, dt/2]` and
//! `[T - dt/2, T]`). This symmetric-window convention is the contract
//! shared with the propagator splitting in [`crate::engine`]. A coefficient
//! for the pair `(k, k')` is the double time integral of `R(t' - t'')` over
//! the two windows; the self coefficient integrates over the ordered half
//! `t'' < t'` of the window square.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
use num_complex::Complex64;

use crate::error::BathError;
use crate::quad;
use crate::KB_OVER_HBAR;

/// Default relative tolerance for the correlation-function quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Grid refinements per `dt` used for the tabulated correlation function.
const SUBDIV: i64 = 64;

/// Continuous bath description: `J(w) = alpha w^3 exp(-(w/w_c)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensityParams {
    /// Overall coupling strength in ps^2.
    pub alpha: f64,
    /// Gaussian cutoff frequency in ps^-1.
    pub omega_c: f64,
}

impl SpectralDensityParams {
    pub fn new(alpha: f64, omega_c: f64) -> Result<Self, BathError> {
        if alpha < 0.0 {
            return Err(BathError::InvalidParams("alpha must be >= 0".into()));
        }
        if omega_c <= 0.0 {
            return Err(BathError::InvalidParams("omega_c must be > 0".into()));
        }
        Ok(SpectralDensityParams { alpha, omega_c })
    }

    /// The parameter set measured for GaAs quantum dots:
    /// alpha = 0.027 pi ps^2, omega_c = 2.2 ps^-1.
    pub fn gaas() -> Self {
        SpectralDensityParams { alpha: 0.027 * core::f64::consts::PI, omega_c: 2.2 }
    }
}

/// `J(w) = alpha w^3 exp(-(w/w_c)^2)` in ps^-1, for `w >= 0`.
pub fn spectral_density(omega: f64, p: &SpectralDensityParams) -> f64 {
    debug_assert!(omega >= 0.0);
    let x = omega / p.omega_c;
    p.alpha * omega * omega * omega * libm::exp(-x * x)
}

fn coth(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 1e-4 {
        // Series around zero; the pole cancels against J(w) ~ w^3.
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else if x > 20.0 {
        1.0
    } else {
        let e = libm::exp(2.0 * x);
        (e + 1.0) / (e - 1.0)
    }
}

fn correlation_integrand(omega: f64, t: f64, p: &SpectralDensityParams, kbt: f64) -> Complex64 {
    if omega == 0.0 {
        return Complex64::ZERO;
    }
    let j = spectral_density(omega, p) / core::f64::consts::PI;
    let th = coth(omega / (2.0 * kbt));
    Complex64::new(j * libm::cos(omega * t) * th, -j * libm::sin(omega * t))
}

/// Finite-temperature bath correlation function `R(t)` for `t >= 0`.
pub fn bath_correlation(t: f64, p: &SpectralDensityParams, temperature: f64) -> Result<Complex64, BathError> {
    bath_correlation_with_tol(t, p, temperature, DEFAULT_QUAD_TOL)
}

/// As [`bath_correlation`] with an explicit relative quadrature tolerance.
pub fn bath_correlation_with_tol(
    t: f64,
    p: &SpectralDensityParams,
    temperature: f64,
    rel_tol: f64,
) -> Result<Complex64, BathError> {
    if temperature <= 0.0 {
        return Err(BathError::NonPositiveTemperature(temperature));
    }
    if p.alpha == 0.0 {
        return Ok(Complex64::ZERO);
    }
    let kbt = KB_OVER_HBAR * temperature;
    // The Gaussian factor is below 1e-27 at 8 w_c; the tail is negligible.
    let upper = 8.0 * p.omega_c;
    // Size initial panels so each spans at most ~pi/2 of oscillation phase.
    let n_panels = 16usize.max(libm::ceil(upper * t.abs() / core::f64::consts::FRAC_PI_2) as usize);
    quad::integrate(|w| correlation_integrand(w, t, p, kbt), 0.0, upper, rel_tol, n_panels)
}

/// Tabulated `R` on the uniform grid `i * h`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RTable {
    pub h: f64,
    pub values: Vec<Complex64>,
}

/// Discretized influence-functional coefficients for a `(dt, kmax)` grid.
///
/// Pair coefficients are translation invariant except for their endpoint
/// variants, so the table is indexed by the step separation `j = k - k'`
/// (1..=kmax) in four flavors: both points interior (`mid_mid`), the older
/// point being the path start (`mid_start`), the newer point being the path
/// terminal (`end_mid`), and both (`end_start`).
#[derive(Debug, Clone, PartialEq)]
pub struct BathKernel {
    pub params: SpectralDensityParams,
    pub temperature: f64,
    pub dt: f64,
    pub kmax: usize,
    pub self_mid: Complex64,
    pub self_edge: Complex64,
    pub mid_mid: Vec<Complex64>,
    pub mid_start: Vec<Complex64>,
    pub end_mid: Vec<Complex64>,
    pub end_start: Vec<Complex64>,
    pub r_table: RTable,
}

impl BathKernel {
    /// Self coefficient eta_kk; `edge` selects the half-window variant used
    /// for the path start and terminal.
    pub fn self_eta(&self, edge: bool) -> Complex64 {
        if edge {
            self.self_edge
        } else {
            self.self_mid
        }
    }

    /// Pair coefficient for separation `j` (1..=kmax).
    pub fn pair_eta(&self, j: usize, older_is_start: bool, newer_is_terminal: bool) -> Complex64 {
        let i = j - 1;
        match (newer_is_terminal, older_is_start) {
            (false, false) => self.mid_mid[i],
            (false, true) => self.mid_start[i],
            (true, false) => self.end_mid[i],
            (true, true) => self.end_start[i],
        }
    }

    /// Serialize to the documented text form (17 significant digits, which
    /// round-trips f64 exactly).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "qdq-bath-kernel v1");
        let _ = writeln!(s, "alpha {:.16e}", self.params.alpha);
        let _ = writeln!(s, "omega_c {:.16e}", self.params.omega_c);
        let _ = writeln!(s, "temperature {:.16e}", self.temperature);
        let _ = writeln!(s, "dt {:.16e}", self.dt);
        let _ = writeln!(s, "kmax {}", self.kmax);
        let _ = writeln!(s, "self_mid {:.16e} {:.16e}", self.self_mid.re, self.self_mid.im);
        let _ = writeln!(s, "self_edge {:.16e} {:.16e}", self.self_edge.re, self.self_edge.im);
        for j in 0..self.kmax {
            let _ = writeln!(
                s,
                "pair {} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                j + 1,
                self.mid_mid[j].re,
                self.mid_mid[j].im,
                self.mid_start[j].re,
                self.mid_start[j].im,
                self.end_mid[j].re,
                self.end_mid[j].im,
                self.end_start[j].re,
                self.end_start[j].im,
            );
        }
        let _ = writeln!(s, "rtable {:.16e} {}", self.r_table.h, self.r_table.values.len());
        for v in &self.r_table.values {
            let _ = writeln!(s, "r {:.16e} {:.16e}", v.re, v.im);
        }
        let _ = writeln!(s, "end");
        s
    }

    /// Parse the text form produced by [`BathKernel::to_text`].
    pub fn from_text(text: &str) -> Result<Self, BathError> {
        let mut lines = text.lines();
        let err = |msg: &str| BathError::ParseError(String::from(msg));
        if lines.next() != Some("qdq-bath-kernel v1") {
            return Err(err("missing header"));
        }
        fn field<'a>(
            lines: &mut impl Iterator<Item = &'a str>,
            key: &str,
        ) -> Result<Vec<&'a str>, BathError> {
            let line = lines
                .next()
                .ok_or_else(|| BathError::ParseError(format!("missing field {key}")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(BathError::ParseError(format!("expected field {key}")));
            }
            Ok(parts.collect())
        }
        fn f(s: &str) -> Result<f64, BathError> {
            s.parse::<f64>()
                .map_err(|_| BathError::ParseError(format!("bad number {s}")))
        }
        let alpha = f(field(&mut lines, "alpha")?[0])?;
        let omega_c = f(field(&mut lines, "omega_c")?[0])?;
        let temperature = f(field(&mut lines, "temperature")?[0])?;
        let dt = f(field(&mut lines, "dt")?[0])?;
        let kmax: usize = field(&mut lines, "kmax")?[0]
            .parse()
            .map_err(|_| err("bad kmax"))?;
        let sm = field(&mut lines, "self_mid")?;
        let se = field(&mut lines, "self_edge")?;
        let self_mid = Complex64::new(f(sm[0])?, f(sm[1])?);
        let self_edge = Complex64::new(f(se[0])?, f(se[1])?);
        let (mut mid_mid, mut mid_start, mut end_mid, mut end_start) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for j in 0..kmax {
            let p = field(&mut lines, "pair")?;
            if p.len() != 9 || p[0].parse::<usize>().ok() != Some(j + 1) {
                return Err(err("malformed pair line"));
            }
            mid_mid.push(Complex64::new(f(p[1])?, f(p[2])?));
            mid_start.push(Complex64::new(f(p[3])?, f(p[4])?));
            end_mid.push(Complex64::new(f(p[5])?, f(p[6])?));
            end_start.push(Complex64::new(f(p[7])?, f(p[8])?));
        }
        let rt = field(&mut lines, "rtable")?;
        let h = f(rt[0])?;
        let n: usize = rt[1].parse().map_err(|_| err("bad rtable count"))?;
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            let r = field(&mut lines, "r")?;
            values.push(Complex64::new(f(r[0])?, f(r[1])?));
        }
        if lines.next() != Some("end") {
            return Err(err("missing end marker"));
        }
        Ok(BathKernel {
            params: SpectralDensityParams { alpha, omega_c },
            temperature,
            dt,
            kmax,
            self_mid,
            self_edge,
            mid_mid,
            mid_start,
            end_mid,
            end_start,
            r_table: RTable { h, values },
        })
    }
}

/// Composite-Simpson integral of `R(tau) * weight(tau)` over the grid range
/// `[i0 h, i1 h]` (grid indices; `i1 - i0` must be even).
fn weighted_table_integral(
    table: &RTable,
    i0: i64,
    i1: i64,
    weight: impl Fn(f64) -> f64,
) -> Complex64 {
    debug_assert!(i0 >= 0 && i1 > i0 && (i1 - i0) % 2 == 0);
    let vals: Vec<Complex64> = (i0..=i1)
        .map(|i| table.values[i as usize] * weight(i as f64 * table.h))
        .collect();
    quad::simpson_table(&vals, table.h)
}

/// Double integral of `R(t' - t'')` over `t' in [a1, a2] x t'' in [b1, b2]`
/// with `a1 >= b2` (grid indices). Reduced to a single integral over the
/// difference `tau` weighted by the overlap length of the two windows.
fn pair_integral(table: &RTable, a1: i64, a2: i64, b1: i64, b2: i64) -> Complex64 {
    debug_assert!(a1 >= b2);
    let h = table.h;
    weighted_table_integral(table, a1 - b2, a2 - b1, |tau| {
        let lo = (a1 as f64 * h - tau).max(b1 as f64 * h);
        let hi = (a2 as f64 * h - tau).min(b2 as f64 * h);
        (hi - lo).max(0.0)
    })
}

/// Ordered self integral over a window of `w` grid steps:
/// `int_0^w dtau (w h - tau) R(tau)`.
fn self_integral(table: &RTable, w: i64) -> Complex64 {
    let wt = w as f64 * table.h;
    weighted_table_integral(table, 0, w, |tau| wt - tau)
}

/// Build the influence-functional coefficient table for a `(dt, kmax)` grid
/// at the given temperature.
pub fn build_bath_kernel(
    p: &SpectralDensityParams,
    temperature: f64,
    dt: f64,
    kmax: usize,
) -> Result<BathKernel, BathError> {
    if temperature <= 0.0 {
        return Err(BathError::NonPositiveTemperature(temperature));
    }
    if dt <= 0.0 {
        return Err(BathError::InvalidParams("dt must be > 0".into()));
    }
    let h = dt / SUBDIV as f64;
    let n_samples = SUBDIV * (kmax as i64 + 1);
    let mut values = Vec::with_capacity(n_samples as usize + 1);
    for i in 0..=n_samples {
        values.push(bath_correlation(i as f64 * h, p, temperature)?);
    }
    let table = RTable { h, values };

    // Window of point k (grid units): interior [64k - 32, 64k + 32],
    // path start [0, 32], path terminal at k: [64k - 32, 64k].
    let half = SUBDIV / 2;
    let mid = |k: i64| (SUBDIV * k - half, SUBDIV * k + half);
    let start = (0i64, half);
    let end = |k: i64| (SUBDIV * k - half, SUBDIV * k);

    let self_mid = self_integral(&table, SUBDIV);
    let self_edge = self_integral(&table, half);

    let (mut mid_mid, mut mid_start, mut end_mid, mut end_start) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for j in 1..=kmax as i64 {
        let (a1, a2) = mid(j);
        let (b1, b2) = mid(0);
        mid_mid.push(pair_integral(&table, a1, a2, b1, b2));
        mid_start.push(pair_integral(&table, a1, a2, start.0, start.1));
        let (e1, e2) = end(j);
        end_mid.push(pair_integral(&table, e1, e2, b1, b2));
        end_start.push(pair_integral(&table, e1, e2, start.0, start.1));
    }

    Ok(BathKernel {
        params: *p,
        temperature,
        dt,
        kmax,
        self_mid,
        self_edge,
        mid_mid,
        mid_start,
        end_mid,
        end_start,
        r_table: table,
    })
}

/// Smallest time on a fixed scan grid (0.05 ps steps to 25 ps) from which
/// `|R(t)| / |R(0)|` stays below `threshold`.
pub fn memory_time(
    p: &SpectralDensityParams,
    temperature: f64,
    threshold: f64,
) -> Result<f64, BathError> {
    if !(0.0 < threshold && threshold < 1.0) {
        return Err(BathError::InvalidParams("threshold must be in (0, 1)".into()));
    }
    if p.alpha == 0.0 {
        return Err(BathError::UndefinedMemory);
    }
    const STEP: f64 = 0.05;
    const N: usize = 500; // 25 ps
    let r0 = bath_correlation(0.0, p, temperature)?.norm();
    if r0 == 0.0 {
        return Err(BathError::UndefinedMemory);
    }
    let mut last_above: Option<usize> = Some(0); // ratio at t = 0 is 1
    for i in 1..=N {
        let r = bath_correlation(i as f64 * STEP, p, temperature)?.norm();
        if r / r0 >= threshold {
            last_above = Some(i);
        }
    }
    match last_above {
        Some(i) if i == N => Err(BathError::InvalidParams(
            "correlation function does not decay below threshold within the 25 ps scan".into(),
        )),
        Some(i) => Ok((i + 1) as f64 * STEP),
        None => Ok(0.0),
    }
}
