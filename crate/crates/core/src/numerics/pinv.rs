//! Regularized (pseudo-)inversion via singular value truncation.

use super::{check_finite, check_square, CMat, C64};
use crate::error::NumericsError;

#[derive(Debug, Clone)]
pub struct RegularizedInverse {
    pub inverse: CMat,
    /// Number of singular values truncated below `rcond * sigma_max`.
    pub truncated: usize,
    pub rank: usize,
}

/// Moore-Penrose pseudo-inverse with singular values below
/// `rcond * sigma_max` truncated to zero.
pub fn regularized_inverse(a: &CMat, rcond: f64) -> Result<RegularizedInverse, NumericsError> {
    let n = check_square(a)?;
    check_finite(a)?;
    if !(rcond > 0.0 && rcond < 1.0) {
        return Err(NumericsError::BadRcond(rcond));
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd: U requested");
    let vt = svd.v_t.as_ref().expect("svd: V^T requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax <= 0.0 {
        return Err(NumericsError::SingularMap);
    }
    let cut = rcond * smax;
    let mut truncated = 0;
    let mut sinv = nalgebra::DVector::<C64>::zeros(svd.singular_values.len());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            sinv[k] = C64::new(1.0 / s, 0.0);
        } else {
            truncated += 1;
        }
    }
    let rank = n - truncated;
    // A = U S V^H  =>  A^+ = V S^+ U^H
    let inverse = vt.adjoint() * CMat::from_diagonal(&sinv) * u.adjoint();
    Ok(RegularizedInverse {
        inverse,
        truncated,
        rank,
    })
}
