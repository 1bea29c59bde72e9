//! Superoperator algebra in the column-stacking convention,
//! `vec(X)_{r + d c} = X_{r c}`, so `vec(A X B) = (B^T kron A) vec(X)`.
//! The convention is fixed repository-wide.

use crate::numerics::{CMat, CVec, C64};

pub fn vectorize(x: &CMat) -> CVec {
    let d = x.nrows();
    CVec::from_fn(d * d, |k, _| x[(k % d, k / d)])
}

pub fn unvectorize(v: &CVec, d: usize) -> CMat {
    CMat::from_fn(d, d, |r, c| v[r + d * c])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Superoperator of `X -> A X`.
pub fn left_mul(a: &CMat) -> CMat {
    let d = a.nrows();
    kron(&CMat::identity(d, d), a)
}

/// Superoperator of `X -> X B`.
pub fn right_mul(b: &CMat) -> CMat {
    let d = b.nrows();
    kron(&b.transpose(), &CMat::identity(d, d))
}

/// Superoperator of the unitary conjugation `X -> U X U^dag`.
pub fn conjugation(u: &CMat) -> CMat {
    kron(&u.conjugate(), u)
}

/// Superoperator of `X -> -i [H, X]`.
pub fn commutator_generator(h: &CMat) -> CMat {
    let mi = C64::new(0.0, -1.0);
    (left_mul(h) - right_mul(h)) * mi
}

/// Lindblad generator `-i[H, .] + sum_k gamma_k (J X J^dag - {J^dag J, X}/2)`.
pub fn lindblad_generator(h: &CMat, jumps: &[(CMat, f64)]) -> CMat {
    let mut l = commutator_generator(h);
    for (j, gamma) in jumps {
        let g = C64::new(*gamma, 0.0);
        let jdj = j.adjoint() * j;
        l += (kron(&j.conjugate(), j)
            - (left_mul(&jdj) + right_mul(&jdj)) * C64::new(0.5, 0.0))
            * g;
    }
    l
}

/// Choi matrix of a map given as a superoperator matrix:
/// `C_{(s,a),(s',a')} = (1/d) Lambda[s + d s', a + d a']` with composite
/// index `s + d a`.
pub fn choi_of_map(lambda: &CMat, d: usize) -> CMat {
    let scale = C64::new(1.0 / d as f64, 0.0);
    CMat::from_fn(d * d, d * d, |row, col| {
        let (s, a) = (row % d, row / d);
        let (sp, ap) = (col % d, col / d);
        scale * lambda[(s + d * sp, a + d * ap)]
    })
}

/// Apply a superoperator matrix to a density matrix.
pub fn apply_map(lambda: &CMat, rho: &CMat) -> CMat {
    let d = rho.nrows();
    unvectorize(&(lambda * vectorize(rho)), d)
}
