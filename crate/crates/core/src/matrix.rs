//! Dense complex matrices of small dimension and a cyclic Jacobi
//! eigensolver for Hermitian matrices.
//!
//! The system Hilbert spaces here are tiny (d = 2^n_dots with a handful of
//! dots), so a hand-rolled row-major store with an O(d^3)-per-sweep Jacobi
//! diagonalization is more than enough and keeps the crate `no_std`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Row-major d x d complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_data(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "data length must be dim^2");
        CMatrix { dim, data }
    }

    /// Build from a row-major slice of real entries.
    pub fn from_real(dim: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), dim * dim);
        CMatrix {
            dim,
            data: rows.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Rank-1 projector |v><v| (the vector is not normalized here).
    pub fn projector(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..d {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    /// Largest elementwise |a_ij - conj(a_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest elementwise |a_ij - b_ij|.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the unitary of column
    /// eigenvectors, so that `self = V diag(w) V^dagger`. The caller is
    /// responsible for passing a (numerically) Hermitian matrix; only the
    /// Hermitian part is diagonalized.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let d = self.dim;
        let mut a = self.clone();
        // Work on the Hermitian part so tiny asymmetries cannot stall the sweep.
        for i in 0..d {
            for j in 0..d {
                let h = 0.5 * (a[(i, j)] + self[(j, i)].conj());
                a[(i, j)] = h;
            }
        }
        let mut v = CMatrix::identity(d);
        let scale = a.max_abs().max(1e-300);
        let tol = 1e-15 * scale;

        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for p in 0..d {
                for q in (p + 1)..d {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let g = a[(p, q)];
                    let gn = g.norm();
                    if gn <= tol * 1e-2 {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let phase = g / gn;
                    let tau = (aqq - app) / (2.0 * gn);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                    } else {
                        -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                    };
                    let c = 1.0 / libm::sqrt(1.0 + t * t);
                    let s = phase * (t * c);

                    // A <- R^H A R with R = [[c, s], [-conj(s), c]] on (p, q).
                    for k in 0..d {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s.conj() * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..d {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s.conj() * apk + c * aqk;
                    }
                    for k in 0..d {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s.conj() * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let evals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vecs = CMatrix::zeros(d);
        for (col, &src) in order.iter().enumerate() {
            for row in 0..d {
                vecs[(row, col)] = v[(row, src)];
            }
        }
        (evals, vecs)
    }

    /// exp(-i H t) for Hermitian `self`, via eigendecomposition.
    pub fn expm_minus_i_t(&self, t: f64) -> CMatrix {
        let d = self.dim;
        let (w, v) = self.eigh();
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::ZERO;
                for (k, &wk) in w.iter().enumerate() {
                    let phase = Complex64::new(libm::cos(wk * t), -libm::sin(wk * t));
                    acc += v[(i, k)] * phase * v[(j, k)].conj();
                }
                m[(i, j)] = acc;
            }
        }
        m
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}
