//! Thin wrappers around LAPACK for the dense complex algebra used throughout.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Determinant, Eig, EigVals, Factorize, SVD, Solve};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Map an angle onto `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Max-entry norm of `M M† − I`.
pub fn unitarity_defect(m: &CMatrix) -> Result<f64> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::InvalidDimension(format!("unitarity defect of a {r}×{c} matrix")));
    }
    let prod = m.dot(&dagger(&m.view()));
    let mut worst = 0.0f64;
    for ((i, j), v) in prod.indexed_iter() {
        let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        worst = worst.max((v - target).norm());
    }
    Ok(worst)
}

/// Conjugate transpose.
pub fn dagger(m: &ArrayView2<C64>) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// Max-entry norm of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn eigvals(m: &CMatrix) -> Result<Array1<C64>> {
    Ok(m.eigvals()?)
}

/// Eigenvalues and right eigenvectors (columns, unit norm).
pub fn eig(m: &CMatrix) -> Result<(Array1<C64>, CMatrix)> {
    Ok(m.eig()?)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Result<Array1<f64>> {
    let (_, s, _) = m.svd(false, false)?;
    Ok(s)
}

/// `log|det M|` and the phase `det M / |det M|`, accumulated through a pivoted LU.
pub fn log_det(m: &CMatrix) -> Result<(f64, C64)> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::InvalidDimension(format!("determinant of a {r}×{c} matrix")));
    }
    let (phase, log_abs) = m.sln_det()?;
    Ok((log_abs, phase))
}

/// Pivoted LU factorisation reused for several right-hand sides.
pub struct Lu {
    inner: ndarray_linalg::LUFactorized<ndarray::OwnedRepr<C64>>,
    n: usize,
}

impl Lu {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::InvalidDimension(format!("LU of a {r}×{c} matrix")));
        }
        Ok(Self { inner: m.factorize()?, n: r })
    }

    pub fn solve(&self, b: &Array1<C64>) -> Result<Array1<C64>> {
        Ok(self.inner.solve(b)?)
    }

    /// Solve with the transposed (not conjugated) matrix.
    pub fn solve_transposed(&self, b: &Array1<C64>) -> Result<Array1<C64>> {
        Ok(self.inner.solve_t(b)?)
    }

    /// `log|det|` and phase of the factorised matrix.
    pub fn log_det(&self) -> Result<(f64, C64)> {
        let (phase, log_abs) = self.inner.sln_det()?;
        Ok((log_abs, phase))
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Bilinear form `conj(a)ᵀ b`.
pub fn bra_ket(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
