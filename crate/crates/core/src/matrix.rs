//! Dense Hermitian matrices, real or complex.
//!
//! Every linear statistic in this crate is a function of the spectrum of a
//! Hermitian matrix, so this is the one matrix type the statistics layer
//! consumes. Products go through `ndarray`'s gemm; eigendecompositions go
//! through `nalgebra`.

use std::fmt::Debug;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array2, LinalgScalar, ScalarOperand};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative symmetry residual accepted by [`HermitianMatrix::new_real`] and
/// [`HermitianMatrix::new_complex`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Relative eigenpair residual accepted by [`HermitianMatrix::eigenvalues`].
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Scalar field of a matrix entry: `f64` or `Complex64`.
pub trait Scalar: LinalgScalar + ScalarOperand + Send + Sync + Debug + PartialEq {
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn from_f64(x: f64) -> Self;
    /// Real part for `f64`, identity for `Complex64`.
    fn from_complex(z: Complex64) -> Self;
    fn norm_sqr(self) -> f64;
}

impl Scalar for f64 {
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
}

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub enum HermitianMatrix {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

impl HermitianMatrix {
    pub fn new_real(m: Array2<f64>) -> Result<Self> {
        check_hermitian(&m)?;
        Ok(HermitianMatrix::Real(m))
    }

    pub fn new_complex(m: Array2<Complex64>) -> Result<Self> {
        check_hermitian(&m)?;
        Ok(HermitianMatrix::Complex(m))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        HermitianMatrix::Real(Array2::from_diag(&ndarray::arr1(values)))
    }

    pub fn dim(&self) -> usize {
        match self {
            HermitianMatrix::Real(m) => m.nrows(),
            HermitianMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, HermitianMatrix::Real(_))
    }

    pub fn trace(&self) -> f64 {
        match self {
            HermitianMatrix::Real(m) => trace(m),
            HermitianMatrix::Complex(m) => trace(m),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        match self {
            HermitianMatrix::Real(m) => frobenius(m),
            HermitianMatrix::Complex(m) => frobenius(m),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            HermitianMatrix::Real(m) => HermitianMatrix::Real(m * factor),
            HermitianMatrix::Complex(m) => HermitianMatrix::Complex(m * Complex64::new(factor, 0.0)),
        }
    }

    /// Entry `(i, j)` as a complex number.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self {
            HermitianMatrix::Real(m) => Complex64::new(m[[i, j]], 0.0),
            HermitianMatrix::Complex(m) => m[[i, j]],
        }
    }

    /// Eigenvalues in ascending order.
    ///
    /// Every eigenpair is checked: `|Mv - λv| <= 1e-8 * |M|` where `|M|` is
    /// the spectral norm. A failed check or a non-converging solver is an
    /// error.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut values = match self {
            HermitianMatrix::Real(m) => checked_eigen(to_nalgebra(m))?,
            HermitianMatrix::Complex(m) => checked_eigen(to_nalgebra(m))?,
        };
        values.sort_by(f64::total_cmp);
        Ok(values)
    }
}

fn checked_eigen<T>(m: DMatrix<T>) -> Result<Vec<f64>>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigensolver(format!("no convergence for {n}x{n} matrix")))?;
    let spectral = eig.eigenvalues.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let mv = &m * &eig.eigenvectors;
    for (col, &lambda) in eig.eigenvalues.iter().enumerate() {
        let mut residual = 0.0;
        for row in 0..n {
            let r = mv[(row, col)].clone() - eig.eigenvectors[(row, col)].clone() * T::from_real(lambda);
            residual += r.modulus_squared();
        }
        let residual = residual.sqrt();
        if residual > EIGEN_RESIDUAL_TOLERANCE * spectral {
            return Err(Error::Eigensolver(format!(
                "eigenpair {col} residual {residual:.3e} exceeds tolerance (|M| = {spectral:.3e})"
            )));
        }
    }
    Ok(eig.eigenvalues.iter().copied().collect())
}

fn to_nalgebra<S: Scalar + nalgebra::Scalar>(m: &Array2<S>) -> DMatrix<S> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

pub(crate) fn check_hermitian<S: Scalar>(m: &Array2<S>) -> Result<()> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let mut residual = 0.0;
    for i in 0..rows {
        for j in 0..=i {
            let d = m[[i, j]] - m[[j, i]].conj();
            residual += if i == j { d.norm_sqr() } else { 2.0 * d.norm_sqr() };
        }
    }
    let residual = residual.sqrt();
    let tolerance = HERMITIAN_TOLERANCE * frobenius(m);
    if residual > tolerance {
        return Err(Error::NotHermitian { residual, tolerance });
    }
    Ok(())
}

pub(crate) fn trace<S: Scalar>(m: &Array2<S>) -> f64 {
    m.diag().iter().map(|x| x.re()).sum()
}

pub(crate) fn frobenius<S: Scalar>(m: &Array2<S>) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `Re Tr(XY)` for Hermitian `Y`, i.e. `Re Σ x_ij conj(y_ij)`, without a product.
pub(crate) fn trace_of_product<S: Scalar>(x: &Array2<S>, y: &Array2<S>) -> f64 {
    x.iter().zip(y.iter()).map(|(&a, &b)| (a * b.conj()).re()).sum()
}

pub(crate) fn identity<S: Scalar>(n: usize) -> Array2<S> {
    let mut m = Array2::from_elem((n, n), S::zero());
    for i in 0..n {
        m[[i, i]] = S::one();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_non_symmetric() {
        let m = array![[1.0, 2.0], [2.5, 1.0]];
        assert!(matches!(HermitianMatrix::new_real(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square() {
        let m = Array2::<f64>::zeros((2, 3));
        assert!(matches!(HermitianMatrix::new_real(m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn complex_hermitian_accepted() {
        let i = Complex64::new(0.0, 1.0);
        let m = array![[Complex64::new(1.0, 0.0), i], [-i, Complex64::new(-1.0, 0.0)]];
        let h = HermitianMatrix::new_complex(m).unwrap();
        assert_eq!(h.trace(), 0.0);
        let ev = h.eigenvalues().unwrap();
        let s = 2f64.sqrt();
        assert!((ev[0] + s).abs() < 1e-12 && (ev[1] - s).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let h = HermitianMatrix::diagonal(&[0.5, -0.25, 0.0]);
        assert_eq!(h.eigenvalues().unwrap(), vec![-0.25, 0.0, 0.5]);
    }

    #[test]
    fn trace_of_product_matches_gemm() {
        let x = array![[1.0, 2.0], [2.0, -3.0]];
        let y = array![[0.5, -1.0], [-1.0, 4.0]];
        let direct = trace(&x.dot(&y));
        assert!((trace_of_product(&x, &y) - direct).abs() < 1e-14);
    }
}
