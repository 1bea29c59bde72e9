//! Quadrature against tabulated measures.
//!
//! A tabulated density `J(omega) >= 0` on a finite support is discretized on
//! a dense uniform grid; the three-term recurrence of its monic orthogonal
//! polynomials then follows from the discretized Stieltjes procedure. The
//! recurrence feeds both Gauss quadrature (Golub-Welsch) and the
//! environment chain mapping.

use crate::error::NumericsError;
use nalgebra::DMatrix;

/// Positive measure discretized as point masses on a uniform grid.
#[derive(Debug, Clone)]
pub struct DiscretizedMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscretizedMeasure {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Midpoint-rule discretization of `f(omega) d omega` on `[lo, hi]`.
pub fn discretize_midpoint<F: Fn(f64) -> f64>(
    f: F,
    support: (f64, f64),
    m: usize,
) -> Result<DiscretizedMeasure, NumericsError> {
    let (lo, hi) = support;
    let h = (hi - lo) / m as f64;
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for k in 0..m {
        let x = lo + (k as f64 + 0.5) * h;
        let v = f(x);
        if v < 0.0 {
            return Err(NumericsError::NegativeDensity { omega: x, value: v });
        }
        nodes.push(x);
        weights.push(v * h);
    }
    Ok(DiscretizedMeasure { nodes, weights })
}

/// Monic three-term recurrence coefficients
/// `pi_{n+1}(x) = (x - alpha_n) pi_n(x) - beta_n pi_{n-1}(x)`,
/// with `beta_0 = integral of the measure`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Discretized Stieltjes procedure: recurrence coefficients of the monic
/// orthogonal polynomials of a discrete measure, `n` of each.
pub fn stieltjes_recurrence(
    measure: &DiscretizedMeasure,
    n: usize,
) -> Result<RecurrenceCoefficients, NumericsError> {
    let m = measure.nodes.len();
    let total = measure.total_weight();
    if !(total > 1e-300) {
        return Err(NumericsError::EmptyMeasure(total));
    }
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    beta.push(total);

    let mut p_prev = vec![0.0f64; m];
    let mut p_cur = vec![1.0f64; m];
    let mut norm_cur = total;
    for k in 0..n {
        // alpha_k = <x p_k, p_k> / <p_k, p_k>
        let mut xs = 0.0;
        for i in 0..m {
            xs += measure.weights[i] * measure.nodes[i] * p_cur[i] * p_cur[i];
        }
        let a = xs / norm_cur;
        alpha.push(a);
        if k + 1 < n {
            let b_prev = *beta.last().unwrap();
            let mut norm_next = 0.0;
            let mut p_next = vec![0.0f64; m];
            for i in 0..m {
                let v = (measure.nodes[i] - a) * p_cur[i]
                    - if k == 0 { 0.0 } else { b_prev * p_prev[i] };
                p_next[i] = v;
                norm_next += measure.weights[i] * v * v;
            }
            let b_next = norm_next / norm_cur;
            beta.push(b_next);
            p_prev = p_cur;
            p_cur = p_next;
            norm_cur = norm_next;
            if !(norm_cur > 1e-300) {
                return Err(NumericsError::EmptyMeasure(norm_cur));
            }
        }
    }
    Ok(RecurrenceCoefficients { alpha, beta })
}

/// Gauss quadrature rule: nodes and positive weights.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss rule with `n_points` nodes for the measure `J(omega) d omega`,
/// where `J` is given by uniform samples over `support` (midpoint
/// convention: sample `k` sits at the center of cell `k`).
///
/// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix built from
/// the Stieltjes recurrence, weights follow from the first eigenvector
/// components.
pub fn gauss_quadrature(
    samples: &[f64],
    support: (f64, f64),
    n_points: usize,
) -> Result<Quadrature, NumericsError> {
    if n_points < 2 {
        return Err(NumericsError::TooFewPoints(n_points));
    }
    let m = samples.len().max(4 * n_points);
    let (lo, hi) = support;
    let h = (hi - lo) / samples.len() as f64;
    // Re-sample onto the working grid by linear interpolation of the tabulated values.
    let measure = if m == samples.len() {
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for (k, &v) in samples.iter().enumerate() {
            if v < 0.0 {
                return Err(NumericsError::NegativeDensity {
                    omega: lo + (k as f64 + 0.5) * h,
                    value: v,
                });
            }
            nodes.push(lo + (k as f64 + 0.5) * h);
            weights.push(v * h);
        }
        DiscretizedMeasure { nodes, weights }
    } else {
        discretize_midpoint(|x| sample_lookup(samples, support, x), support, m)?
    };
    let rec = stieltjes_recurrence(&measure, n_points)?;
    golub_welsch(&rec)
}

pub fn sample_lookup(samples: &[f64], support: (f64, f64), x: f64) -> f64 {
    let (lo, hi) = support;
    let m = samples.len();
    let u = (x - lo) / (hi - lo) * m as f64 - 0.5;
    if u <= 0.0 {
        return samples[0];
    }
    if u >= (m - 1) as f64 {
        return samples[m - 1];
    }
    let i = u.floor() as usize;
    let frac = u - i as f64;
    samples[i] * (1.0 - frac) + samples[i + 1] * frac
}

fn golub_welsch(rec: &RecurrenceCoefficients) -> Result<Quadrature, NumericsError> {
    let n = rec.alpha.len();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = rec.alpha[k];
        if k + 1 < n {
            let off = rec.beta[k + 1].sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let se = jac.symmetric_eigen();
    let total = rec.beta[0];
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let w = total * se.eigenvectors[(0, k)].powi(2);
            (se.eigenvalues[k], w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(Quadrature {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let mid = 0.5 * (a + b);
        let left = simpson(f, a, mid);
        let right = simpson(f, mid, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, mid, left, tol / 2.0, depth - 1)
                + recurse(f, mid, b, right, tol / 2.0, depth - 1)
        }
    }
    let whole = simpson(&f, a, b);
    recurse(&f, a, b, whole, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_measure_two_points_integrates_linear() {
        let samples = vec![1.0; 100_000];
        let q = gauss_quadrature(&samples, (0.0, 1.0), 2).unwrap();
        let i1 = q.integrate(|x| x);
        assert_abs_diff_eq!(i1, 0.5, epsilon = 1e-14);
        // degree-3 exactness for a 2-point rule, up to grid discretization
        let i3 = q.integrate(|x| x * x * x);
        assert_abs_diff_eq!(i3, 0.25, epsilon = 1e-10);
    }

    #[test]
    fn semi_elliptical_total_weight() {
        // J(w) = 2 Gamma / pi^2 sqrt(1 - w^2); integral = Gamma D / pi.
        let gamma = 0.05;
        let j = |w: f64| 2.0 * gamma / (PI * PI) * (1.0 - w * w).max(0.0).sqrt();
        let m = 400_000;
        let samples: Vec<f64> = (0..m)
            .map(|k| j(-1.0 + (k as f64 + 0.5) * 2.0 / m as f64))
            .collect();
        let q = gauss_quadrature(&samples, (-1.0, 1.0), 40).unwrap();
        // Oracle: adaptive quadrature of the same integrand.
        let oracle = adaptive_simpson(j, -1.0, 1.0, 1e-13);
        assert_abs_diff_eq!(oracle, gamma / PI, epsilon = 1e-9);
        assert!((q.total_weight() - oracle).abs() / oracle < 1e-8);
    }

    #[test]
    fn caldeira_leggett_total_weight_matches_gamma_function() {
        // J(w) = Gamma w_c^{1-s} w^s e^{-w/w_c}; s = 1, Gamma = 0.25, w_c = 1
        // on [0, 40]: integral = Gamma * w_c * Gammafn(2) = 0.25.
        let g = 0.25;
        let j = |w: f64| g * w * (-w).exp();
        let m = 400_000;
        let samples: Vec<f64> = (0..m).map(|k| j((k as f64 + 0.5) * 40.0 / m as f64)).collect();
        let q = gauss_quadrature(&samples, (0.0, 40.0), 60).unwrap();
        assert!((q.total_weight() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn nodes_stay_inside_support_and_weights_positive() {
        let samples: Vec<f64> = (0..10_000)
            .map(|k| {
                let x = (k as f64 + 0.5) / 10_000.0;
                x * (1.0 - x)
            })
            .collect();
        let q = gauss_quadrature(&samples, (0.0, 1.0), 25).unwrap();
        for (&x, &w) in q.nodes.iter().zip(&q.weights) {
            assert!(x > 0.0 && x < 1.0);
            assert!(w > 0.0);
        }
    }

    #[test]
    fn negative_sample_is_rejected() {
        let samples = vec![1.0, -0.5, 1.0];
        assert!(matches!(
            gauss_quadrature(&samples, (0.0, 1.0), 2),
            Err(NumericsError::NegativeDensity { .. })
        ));
    }

    #[test]
    fn adaptive_simpson_on_smooth_integrands() {
        let v = adaptive_simpson(|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-11);
        let v = adaptive_simpson(|x: f64| (-x).exp(), 0.0, 30.0, 1e-12);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn stieltjes_on_chebyshev_measure_reproduces_known_recurrence() {
        // sqrt(1 - x^2) on [-1, 1]: alpha_n = 0, beta_n = 1/4 (n >= 1),
        // beta_0 = pi / 2.
        let m = 200_000;
        let meas = discretize_midpoint(|x| (1.0 - x * x).max(0.0).sqrt(), (-1.0, 1.0), m).unwrap();
        let rec = stieltjes_recurrence(&meas, 30).unwrap();
        assert_abs_diff_eq!(rec.beta[0], PI / 2.0, epsilon = 1e-7);
        for k in 0..30 {
            assert!(rec.alpha[k].abs() < 1e-12, "alpha[{k}] = {}", rec.alpha[k]);
            if k >= 1 {
                assert!((rec.beta[k] - 0.25).abs() < 1e-7, "beta[{k}] = {}", rec.beta[k]);
            }
        }
    }
}
