//! Dense complex linear-algebra kernels shared by all modules.
//!
//! All operations are pure functions of their inputs and safe to call from
//! concurrent contexts.

mod eig;
mod expm;
mod pinv;
mod quad;

pub use eig::{eigendecomposition, hermitian_eigen, Eigendecomposition};
pub use expm::matrix_exponential;
pub use pinv::{regularized_inverse, RegularizedInverse};
pub use quad::{
    adaptive_simpson, discretize_midpoint, gauss_quadrature, stieltjes_recurrence,
    DiscretizedMeasure, Quadrature, RecurrenceCoefficients,
};
pub use quad::sample_lookup as quad_sample_lookup;

use crate::error::NumericsError;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) fn check_square(a: &CMat) -> Result<usize, NumericsError> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub(crate) fn check_finite(a: &CMat) -> Result<(), NumericsError> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(NumericsError::NonFinite)
    }
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}
