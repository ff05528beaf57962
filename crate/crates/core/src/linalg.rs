//! Dense complex matrices and vectors for the small spin-orbit space.
//!
//! Dimensions here are tiny (14 by default), so everything is stored dense
//! and row-major with no attempt at sparsity or blocking.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Conjugate-linear-in-the-first-argument inner product of two complex vectors.
pub fn vdot(a: &[C64], b: &[C64]) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let out = self
            .data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect();
        Ok(out)
    }

    pub fn mul_mat(&self, other: &CMat) -> Result<CMat> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        CMat::from_fn(n, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry of (self - other).
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry of (U^dag U - I); zero for a unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().mul_mat(self).expect("same dim");
        prod.max_abs_diff(&CMat::identity(self.dim))
    }

    /// Kronecker product of a 2x2 polarization block with an OAM block,
    /// matching the pol-major state layout.
    pub fn kron_pol_oam(pol: &[[C64; 2]; 2], oam: &CMat) -> CMat {
        let n = oam.dim;
        CMat::from_fn(2 * n, |i, j| {
            let (pi, oi) = (i / n, i % n);
            let (pj, oj) = (j / n, j % n);
            pol[pi][pj] * oam.get(oi, oj)
        })
    }
}

/// Density operator on the spin-orbit space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    pub fn from_matrix(mat: CMat) -> Self {
        Self { mat }
    }

    /// Rank-one density operator |psi><psi| from amplitude data.
    pub fn from_pure(amps: &[C64]) -> Self {
        let n = amps.len();
        let mat = CMat::from_fn(n, |i, j| amps[i] * amps[j].conj());
        Self { mat }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// tr(rho^2); equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.mat.mul_mat(&self.mat).expect("same dim").trace().re
    }

    /// Largest absolute entry of (rho - rho^dag).
    pub fn hermiticity_defect(&self) -> f64 {
        self.mat.max_abs_diff(&self.mat.adjoint())
    }

    /// Smallest eigenvalue; should be >= -1e-9 for a physical state.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigenvalues of a Hermitian complex matrix, ascending.
///
/// The matrix H = X + iY is embedded as the real symmetric [[X, -Y], [Y, X]],
/// whose spectrum is that of H doubled; a cyclic Jacobi sweep diagonalizes it
/// and adjacent pairs are averaged back out.
#[allow(clippy::needless_range_loop)]
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let n = m.dim();
    let mut a = vec![vec![0.0f64; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            a[i][j] = v.re;
            a[i + n][j + n] = v.re;
            a[i][j + n] = -v.im;
            a[i + n][j] = v.im;
        }
    }
    let mut evals = jacobi_symmetric_eigenvalues(&mut a);
    evals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    (0..n)
        .map(|k| 0.5 * (evals[2 * k] + evals[2 * k + 1]))
        .collect()
}

#[allow(clippy::needless_range_loop)] // rotations touch paired indices; indexed form is the math
fn jacobi_symmetric_eigenvalues(a: &mut [Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
