//! Adaptive quadrature for smooth, possibly oscillatory complex integrands.

use alloc::format;
use num_complex::Complex64;

use crate::error::BathError;

const MAX_DEPTH: u32 = 40;

/// Integrate `f` over `[a, b]` with adaptive Simpson refinement.
///
/// `n_panels` controls the initial uniform subdivision; callers integrating
/// oscillatory functions should size it so each panel spans at most a
/// fraction of an oscillation period. `rel_tol` is relative to the overall
/// magnitude of the integral (with a small absolute floor so an integral
/// that is genuinely zero converges immediately).
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64, n_panels: usize) -> Result<Complex64, BathError>
where
    F: Fn(f64) -> Complex64,
{
    assert!(b >= a);
    if a == b {
        return Ok(Complex64::ZERO);
    }
    let n = n_panels.max(1);
    let width = (b - a) / n as f64;

    // First pass: coarse Simpson estimate per panel to set the error scale.
    let mut coarse = 0.0f64;
    for i in 0..n {
        let lo = a + i as f64 * width;
        coarse += simpson(&f, lo, lo + width).norm();
    }
    let scale = coarse.max(1e-300);
    let abs_tol_floor = 1e-305;

    let mut total = Complex64::ZERO;
    for i in 0..n {
        let lo = a + i as f64 * width;
        let hi = lo + width;
        let panel_tol = (rel_tol * scale * width / (b - a)).max(abs_tol_floor);
        total += adaptive(&f, lo, hi, simpson(&f, lo, hi), panel_tol, 0)?;
    }
    Ok(total)
}

fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64, BathError> {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let err = (left + right - whole).norm();
    if err <= 15.0 * tol {
        // Richardson correction for the accepted pair of halves.
        return Ok(left + right + (left + right - whole) / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(BathError::QuadratureFailure(format!(
            "adaptive Simpson did not converge on [{a}, {b}] (residual {err:.3e})"
        )));
    }
    Ok(adaptive(f, a, m, left, 0.5 * tol, depth + 1)?
        + adaptive(f, m, b, right, 0.5 * tol, depth + 1)?)
}

/// Composite Simpson over uniformly spaced samples `values` with step `h`.
///
/// `values.len()` must be odd (an even number of steps).
pub fn simpson_table(values: &[Complex64], h: f64) -> Complex64 {
    assert!(values.len() >= 3 && values.len() % 2 == 1, "need an even step count");
    let mut acc = values[0] + values[values.len() - 1];
    for (i, v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * (h / 3.0)
}
