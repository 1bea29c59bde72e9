//! Matrix exponential `e^{At}`.

use super::eig::eigendecomposition;
use super::{check_finite, check_square, CMat, C64};
use crate::error::NumericsError;

/// Compute `e^{At}` for a square complex matrix.
///
/// Uses the eigendecomposition when `A` is diagonalizable with a
/// well-conditioned eigenvector matrix, otherwise falls back to
/// scaling-and-squaring with a Pade(13) approximant.
pub fn matrix_exponential(a: &CMat, t: f64) -> Result<CMat, NumericsError> {
    let n = check_square(a)?;
    check_finite(a)?;
    if !t.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    if n == 0 {
        return Ok(CMat::zeros(0, 0));
    }

    if let Ok(e) = eigendecomposition(a) {
        if let Some(vinv) = e.vectors.clone().lu().try_inverse() {
            let cond = vinv.norm() * e.vectors.norm();
            if cond < 1.0e8 {
                let phases =
                    CMat::from_diagonal(&e.values.map(|lam| (lam * C64::new(t, 0.0)).exp()));
                return Ok(&e.vectors * phases * vinv);
            }
        }
    }
    Ok(expm_pade(&(a * C64::new(t, 0.0))))
}

// Pade(13,13) coefficients, Higham (2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn expm_pade(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    let theta13 = 5.371_920_351_148_152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let a = a * C64::new(1.0 / (2.0f64).powi(s as i32), 0.0);

    let eye = CMat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let c = |x: f64| C64::new(x, 0.0);

    let w1 = &a6 * c(PADE13[13]) + &a4 * c(PADE13[11]) + &a2 * c(PADE13[9]);
    let w2 = &w1 * &a6 + &a6 * c(PADE13[7]) + &a4 * c(PADE13[5]) + &a2 * c(PADE13[3]) + &eye * c(PADE13[1]);
    let u = &a * w2;
    let v1 = &a6 * c(PADE13[12]) + &a4 * c(PADE13[10]) + &a2 * c(PADE13[8]);
    let v = &v1 * &a6 + &a6 * c(PADE13[6]) + &a4 * c(PADE13[4]) + &a2 * c(PADE13[2]) + &eye * c(PADE13[0]);

    let num = &v + &u;
    let den = &v - &u;
    let mut r = den
        .lu()
        .solve(&num)
        .unwrap_or_else(|| CMat::identity(n, n));
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::frobenius;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_of_zero_is_identity() {
        let a = CMat::zeros(3, 3);
        let r = matrix_exponential(&a, 1.7).unwrap();
        assert!(frobenius(&(r - CMat::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn diagonal_case() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(-1.0, 0.0),
            C64::new(-2.0, 0.0),
        ]));
        let r = matrix_exponential(&a, 1.0).unwrap();
        assert_abs_diff_eq!(r[(0, 0)].re, (-1.0f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(r[(1, 1)].re, (-2.0f64).exp(), epsilon = 1e-14);
        assert!(r[(0, 1)].norm() < 1e-15 && r[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn anti_hermitian_gives_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = CMat::from_fn(6, 6, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = (&b + b.adjoint()) * C64::new(0.5, 0.0);
        let a = h * C64::new(0.0, -1.0);
        let r = matrix_exponential(&a, 0.7).unwrap();
        let dev = frobenius(&(r.adjoint() * &r - CMat::identity(6, 6)));
        assert!(dev < 1e-12, "unitarity deviation {dev:e}");
    }

    #[test]
    fn semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut a = CMat::from_fn(4, 4, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            // shift towards stability
            for i in 0..4 {
                a[(i, i)] -= C64::new(2.0, 0.0);
            }
            let t = rng.gen_range(-1.0..1.0);
            let s = rng.gen_range(-1.0..1.0);
            let lhs = matrix_exponential(&a, t + s).unwrap();
            let rhs = matrix_exponential(&a, t).unwrap() * matrix_exponential(&a, s).unwrap();
            assert!(frobenius(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn pade_fallback_handles_jordan_block() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = C64::new(1.0, 0.0);
        let r = matrix_exponential(&a, 2.0).unwrap();
        // exp([[0,1],[0,0]] * 2) = [[1,2],[0,1]]
        assert_abs_diff_eq!(r[(0, 1)].re, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r[(0, 0)].re, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r[(1, 1)].re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn large_norm_requires_scaling() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(40.0, 0.0),
            C64::new(-40.0, 0.0),
        ]));
        let r = matrix_exponential(&a, 1.0).unwrap();
        assert!((r[(0, 0)].re - 40f64.exp()).abs() / 40f64.exp() < 1e-10);
    }
}
