//! Dense complex square matrices and a cyclic Jacobi hermitian eigensolver.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense square complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row slices. Returns `None` if the rows are ragged
    /// or not square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Option<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Self { dim, data: rows.concat() })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    /// Diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { Complex64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|u><v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * factor).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^H|`
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `<u|A|v>`
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter().zip(self.mul_vec(v)).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Eigendecomposition `A = V diag(values) V^H` of a hermitian matrix.
///
/// `values` are ascending; column `j` of `vectors` belongs to `values[j]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V^H`
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<Complex64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        CMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum())
    }

    /// Column `j` of the eigenvector matrix.
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }
}

/// Relative hermiticity tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues and eigenvectors of a hermitian matrix by cyclic complex
/// Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot `A[p][q]` and then
/// applies the real two-by-two Jacobi rotation that annihilates it.
pub fn hermitian_eig(matrix: &CMatrix) -> Result<HermitianEigen> {
    let n = matrix.dim();
    let deviation = matrix.hermiticity_deviation();
    if deviation > HERMITIAN_TOLERANCE * matrix.max_abs().max(1.0) || !deviation.is_finite() {
        return Err(Error::NonHermitianInput { deviation });
    }

    // work on the exactly hermitian part
    let mut a = CMatrix::from_fn(n, |i, j| 0.5 * (matrix[(i, j)] + matrix[(j, i)].conj()));
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = f64::EPSILON * scale * n as f64;

    let off_norm = |a: &CMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = n <= 1 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        if off_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 || r < f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, e^{-i alpha}) * [[c, s], [-s, c]]
                let gqp = -s * phase.conj();
                let gqq = c * phase.conj();

                // A <- A G, V <- V G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * gqp;
                    a[(k, q)] = akp * s + akq * gqq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * gqp;
                    v[(k, q)] = vkp * s + vkq * gqq;
                }
                // A <- G^H A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * gqp.conj();
                    a[(q, k)] = apk * s + aqk * gqq.conj();
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(app - t * r, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
            }
        }
    }
    if !converged {
        let residual = off_norm(&a);
        if residual > target {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, residual });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}
