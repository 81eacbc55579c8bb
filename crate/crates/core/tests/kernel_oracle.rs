//! Checks the tabulated influence coefficients against a brute-force 2D
//! midpoint Riemann sum over the same time windows, evaluated directly from
//! the bath correlation function with no shared discretization.

use qdq_core::bath::{bath_correlation_with_tol, build_bath_kernel, SpectralDensityParams};
use qdq_core::Complex64;

const QUAD_TOL: f64 = 1e-9;

struct Corr {
    p: SpectralDensityParams,
    temperature: f64,
}

impl Corr {
    fn r(&self, t: f64) -> Complex64 {
        bath_correlation_with_tol(t, &self.p, self.temperature, QUAD_TOL).unwrap()
    }
}

/// Full-rectangle double integral of R(t' - t'') over [a1, a2] x [b1, b2]
/// with a1 >= b2, midpoint rule with cell size `h` on both axes. Terms are
/// grouped by the difference index so only ~na + nb correlation values are
/// needed.
fn pair_oracle(c: &Corr, a: (f64, f64), b: (f64, f64), h: f64) -> Complex64 {
    let na = ((a.1 - a.0) / h).round() as i64;
    let nb = ((b.1 - b.0) / h).round() as i64;
    let tau0 = a.0 - b.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in (1 - nb)..na {
        let count = (na - 1).min(m + nb - 1) - 0i64.max(m) + 1;
        assert!(count > 0);
        sum += c.r(tau0 + m as f64 * h) * (count as f64);
    }
    sum * (h * h)
}

/// Time-ordered double integral of R(t' - t'') over the lower triangle of a
/// square window of width `w`: midpoint rule for whole cells below the
/// diagonal plus half-cells on the diagonal itself.
fn self_oracle(c: &Corr, w: f64, h: f64) -> Complex64 {
    let n = (w / h).round() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..n {
        sum += c.r(m as f64 * h) * ((n - m) as f64);
    }
    sum *= h * h;
    // Diagonal cells: triangles of area h^2/2 with mean difference h/3.
    sum + c.r(h / 3.0) * (n as f64 * h * h / 2.0)
}

#[test]
fn influence_table_matches_riemann_oracle() {
    let p = SpectralDensityParams::gaas();
    let temperature = 77.0;
    let dt = 1.0;
    let kmax = 3;
    let kernel = build_bath_kernel(&p, temperature, dt, kmax).unwrap();
    let c = Corr { p, temperature };

    let h = dt / 512.0;
    let mid = |k: f64| (k * dt - dt / 2.0, k * dt + dt / 2.0);
    let start = (0.0, dt / 2.0);
    let end = |k: f64| (k * dt - dt / 2.0, k * dt);

    let mut pairs: Vec<(&str, Complex64, Complex64)> = vec![
        ("self_mid", kernel.self_eta(false), self_oracle(&c, dt, h)),
        ("self_edge", kernel.self_eta(true), self_oracle(&c, dt / 2.0, h)),
    ];
    for j in 1..=kmax {
        let k = j as f64;
        pairs.push((
            "mid_mid",
            kernel.pair_eta(j, false, false),
            pair_oracle(&c, mid(k), mid(0.0), h),
        ));
        pairs.push((
            "mid_start",
            kernel.pair_eta(j, true, false),
            pair_oracle(&c, mid(k), start, h),
        ));
        pairs.push((
            "end_mid",
            kernel.pair_eta(j, false, true),
            pair_oracle(&c, end(k), mid(0.0), h),
        ));
        pairs.push((
            "end_start",
            kernel.pair_eta(j, true, true),
            pair_oracle(&c, end(k), start, h),
        ));
    }

    let scale = pairs
        .iter()
        .map(|(_, t, _)| t.norm())
        .fold(0.0f64, f64::max);
    assert!(scale > 0.0);
    for (name, table, oracle) in pairs {
        let diff = (table - oracle).norm() / scale;
        assert!(diff < 1e-4, "{name}: table {table}, oracle {oracle}, rel diff {diff:.2e}");
    }
}
