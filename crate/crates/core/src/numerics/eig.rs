//! Eigendecompositions of dense complex matrices.

use super::{check_finite, check_square, frobenius, CMat, CVec, C64};
use crate::error::NumericsError;
use nalgebra::DVector;

/// Right eigendecomposition `A V = V diag(values)`.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: CVec,
    pub vectors: CMat,
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues, unitary
/// eigenvector matrix. The input is assumed Hermitian; only its lower
/// triangle is referenced by the underlying solver.
pub fn hermitian_eigen(a: &CMat) -> Result<(DVector<f64>, CMat), NumericsError> {
    check_square(a)?;
    check_finite(a)?;
    let se = a.clone().symmetric_eigen();
    Ok((se.eigenvalues, se.eigenvectors))
}

/// General eigendecomposition of a square complex matrix.
///
/// Computed from the complex Schur form `A = Q T Q^dag`: eigenvalues are the
/// diagonal of `T`, right eigenvectors follow from back-substitution on the
/// triangular factor. Signals `NonDiagonalizable` when the residual
/// `max_col ||A v - lambda v|| / ||A||` exceeds 1e-10; callers fall back to
/// numeric-only paths in that case.
pub fn eigendecomposition(a: &CMat) -> Result<Eigendecomposition, NumericsError> {
    let n = check_square(a)?;
    check_finite(a)?;
    if n == 0 {
        return Ok(Eigendecomposition {
            values: CVec::zeros(0),
            vectors: CMat::zeros(0, 0),
        });
    }
    let norm_a = frobenius(a).max(f64::MIN_POSITIVE);

    // Hermitian fast path: exactly unitary eigenvectors, no residual risk.
    let herm_dev = (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm_dev <= 1e-14 * norm_a {
        let (vals, vecs) = hermitian_eigen(a)?;
        return Ok(Eigendecomposition {
            values: vals.map(|x| C64::new(x, 0.0)),
            vectors: vecs,
        });
    }

    let schur = a
        .clone()
        .try_schur(1.0e-14, 10_000)
        .ok_or(NumericsError::SchurFailure)?;
    let (q, t) = schur.unpack();

    let values = CVec::from_iterator(n, (0..n).map(|k| t[(k, k)]));
    let mut y = CMat::zeros(n, n);
    let tnorm = frobenius(&t).max(f64::MIN_POSITIVE);
    let smin = 1.0e-15 * tnorm;
    for k in 0..n {
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut denom = values[k] - t[(i, i)];
            if denom.norm() < smin {
                // Repeated eigenvalue: nudge the denominator so the
                // back-substitution stays finite; the conditioning check
                // below rejects genuinely defective matrices.
                denom = C64::new(smin, 0.0);
            }
            y[(i, k)] = s / denom;
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
    }

    let residual = {
        let av = a * &vectors;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let r = av.column(k) - vectors.column(k) * values[k];
            worst = worst.max(r.norm());
        }
        worst / norm_a
    };
    if residual > 1.0e-10 {
        return Err(NumericsError::NonDiagonalizable { residual });
    }
    // A defective matrix can still satisfy A V = V D with a singular V
    // (parallel eigenvectors); reject those too.
    let sv = vectors.clone().singular_values();
    let smax_v = sv.iter().cloned().fold(0.0, f64::max);
    let smin_v = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smin_v > 1.0e-12 * smax_v) {
        return Err(NumericsError::NonDiagonalizable {
            residual: smin_v / smax_v,
        });
    }
    Ok(Eigendecomposition { values, vectors })
}
