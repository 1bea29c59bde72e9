//! Spectral densities, thermofield splitting, and orthogonal-polynomial
//! chain mapping of the environment.
//!
//! A continuum environment `J(omega)` in a grand-canonical Gibbs state is
//! purified into two rotated branches with effective densities
//! `J_1 = (1 -+ n) J` and `J_2 = n J` (upper sign fermions). Each branch is
//! then mapped onto a nearest-neighbour tight-binding chain whose
//! coefficients are the three-term recurrence coefficients of the monic
//! orthogonal polynomials of `J_i(omega) d omega`.

use crate::error::{EnvironmentError, NumericsError};
use crate::numerics::{
    stieltjes_recurrence, DiscretizedMeasure, RecurrenceCoefficients,
};
use serde::{Deserialize, Serialize};

/// Total weight below which a branch is treated as empty and dropped from
/// assembly (zero-temperature bosons need only one chain).
pub const EMPTY_BRANCH_WEIGHT: f64 = 1e-14;

/// Default upper cutoff for the Caldeira-Leggett support, in units of
/// omega_c. The exponential tail is below 1e-17 there.
pub const DEFAULT_CL_OMEGA_MAX: f64 = 40.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SpectralDensityKind {
    /// `J(w) = 2 Gamma / pi^2 sqrt(1 - (w/D)^2)` on `[-D, D]`.
    SemiElliptical { gamma: f64, half_bandwidth: f64 },
    /// `J(w) = Gamma w_c^{1-s} w^s e^{-w/w_c}` on `[0, omega_max]`.
    CaldeiraLeggett {
        gamma: f64,
        cutoff: f64,
        ohmicity: f64,
        omega_max: f64,
    },
    /// Uniform samples over the support (midpoint convention).
    Tabulated { samples: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDensitySpec {
    pub kind: SpectralDensityKind,
    pub support: (f64, f64),
}

impl SpectralDensitySpec {
    pub fn semi_elliptical(gamma: f64, half_bandwidth: f64) -> Self {
        Self {
            kind: SpectralDensityKind::SemiElliptical {
                gamma,
                half_bandwidth,
            },
            support: (-half_bandwidth, half_bandwidth),
        }
    }

    pub fn caldeira_leggett(gamma: f64, cutoff: f64, ohmicity: f64, omega_max: Option<f64>) -> Self {
        let omega_max = omega_max.unwrap_or(DEFAULT_CL_OMEGA_MAX * cutoff);
        Self {
            kind: SpectralDensityKind::CaldeiraLeggett {
                gamma,
                cutoff,
                ohmicity,
                omega_max,
            },
            support: (0.0, omega_max),
        }
    }

    pub fn tabulated(samples: Vec<f64>, support: (f64, f64)) -> Self {
        Self {
            kind: SpectralDensityKind::Tabulated { samples },
            support,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        self.support.1 - self.support.0
    }

    /// Evaluate `J(omega)`; signals out-of-band outside the support.
    pub fn evaluate(&self, omega: f64) -> Result<f64, EnvironmentError> {
        let (lo, hi) = self.support;
        if omega < lo || omega > hi {
            return Err(EnvironmentError::OutOfBand { omega, lo, hi });
        }
        Ok(self.evaluate_unchecked(omega))
    }

    fn evaluate_unchecked(&self, omega: f64) -> f64 {
        match &self.kind {
            SpectralDensityKind::SemiElliptical {
                gamma,
                half_bandwidth,
            } => {
                let x = omega / half_bandwidth;
                2.0 * gamma / (std::f64::consts::PI * std::f64::consts::PI)
                    * (1.0 - x * x).max(0.0).sqrt()
            }
            SpectralDensityKind::CaldeiraLeggett {
                gamma,
                cutoff,
                ohmicity,
                ..
            } => {
                gamma * cutoff.powf(1.0 - ohmicity) * omega.powf(*ohmicity)
                    * (-omega / cutoff).exp()
            }
            SpectralDensityKind::Tabulated { samples } => {
                crate::numerics::quad_sample_lookup(samples, self.support, omega)
            }
        }
    }

    pub fn validate(&self) -> Result<(), EnvironmentError> {
        let (lo, hi) = self.support;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(EnvironmentError::BadSpectralDensity(format!(
                "support [{lo}, {hi}] must be a finite interval"
            )));
        }
        match &self.kind {
            SpectralDensityKind::SemiElliptical {
                gamma,
                half_bandwidth,
            } => {
                if *gamma <= 0.0 || *half_bandwidth <= 0.0 {
                    return Err(EnvironmentError::BadSpectralDensity(
                        "semi-elliptical density needs gamma > 0 and D > 0".into(),
                    ));
                }
            }
            SpectralDensityKind::CaldeiraLeggett {
                gamma,
                cutoff,
                ohmicity,
                omega_max,
            } => {
                if *gamma <= 0.0 || *cutoff <= 0.0 || *ohmicity <= 0.0 || *omega_max <= 0.0 {
                    return Err(EnvironmentError::BadSpectralDensity(
                        "Caldeira-Leggett density needs positive gamma, omega_c, s, omega_max"
                            .into(),
                    ));
                }
            }
            SpectralDensityKind::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(EnvironmentError::BadSpectralDensity(
                        "tabulated density needs at least 2 samples".into(),
                    ));
                }
                if let Some(v) = samples.iter().find(|v| **v < 0.0 || !v.is_finite()) {
                    return Err(EnvironmentError::BadSpectralDensity(format!(
                        "tabulated density has invalid sample {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistics {
    Fermion,
    Boson,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Inverse temperature; `f64::INFINITY` is the zero-temperature limit.
    pub beta: f64,
    pub mu: f64,
    pub statistics: Statistics,
}

impl ThermalParams {
    pub fn validate(&self, support: (f64, f64)) -> Result<(), EnvironmentError> {
        if !(self.beta > 0.0) {
            return Err(EnvironmentError::BadThermalParams(format!(
                "beta must be positive or infinite, got {}",
                self.beta
            )));
        }
        if self.statistics == Statistics::Boson && self.mu > support.0 {
            return Err(EnvironmentError::BadThermalParams(format!(
                "bosonic mu = {} must not exceed the lower band edge {}",
                self.mu, support.0
            )));
        }
        Ok(())
    }
}

/// Occupation `n_omega = 1 / (e^{beta (omega - mu)} +- 1)`, upper sign
/// fermions. `beta = inf` is the step / vacuum limit.
pub fn occupation(thermal: &ThermalParams, omega: f64) -> Result<f64, EnvironmentError> {
    let x = omega - thermal.mu;
    match thermal.statistics {
        Statistics::Fermion => {
            if thermal.beta.is_infinite() {
                Ok(if x < 0.0 {
                    1.0
                } else if x > 0.0 {
                    0.0
                } else {
                    0.5
                })
            } else {
                let e = (thermal.beta * x).exp();
                Ok(1.0 / (e + 1.0))
            }
        }
        Statistics::Boson => {
            if x == 0.0 {
                return Err(EnvironmentError::DivergentOccupation(omega));
            }
            if thermal.beta.is_infinite() {
                Ok(0.0)
            } else if x < 0.0 {
                Err(EnvironmentError::BadThermalParams(format!(
                    "bosonic occupation below mu at omega = {omega}"
                )))
            } else {
                let e = (thermal.beta * x).exp();
                Ok(1.0 / (e - 1.0))
            }
        }
    }
}

/// One thermofield branch density, tabulated on a uniform midpoint grid.
#[derive(Debug, Clone)]
pub struct BranchDensity {
    pub support: (f64, f64),
    pub samples: Vec<f64>,
}

impl BranchDensity {
    pub fn total_weight(&self) -> f64 {
        let h = (self.support.1 - self.support.0) / self.samples.len() as f64;
        self.samples.iter().sum::<f64>() * h
    }

    pub fn measure(&self) -> DiscretizedMeasure {
        let (lo, hi) = self.support;
        let m = self.samples.len();
        let h = (hi - lo) / m as f64;
        DiscretizedMeasure {
            nodes: (0..m).map(|k| lo + (k as f64 + 0.5) * h).collect(),
            weights: self.samples.iter().map(|v| v * h).collect(),
        }
    }
}

/// Split `J` into the rotated-branch densities `(J_1, J_2)`.
///
/// Fermions: `J_1 = (1 - n) J`, `J_2 = n J`, so `J_1 + J_2 = J` pointwise.
/// Bosons: `J_1 = (1 + n) J`, `J_2 = n J`, so `J_1 - J_2 = J` pointwise.
/// At fermionic `beta = inf` the branch supports shrink to the two sides
/// of `mu`.
pub fn thermofield_split(
    spec: &SpectralDensitySpec,
    thermal: &ThermalParams,
    grid_points: usize,
) -> Result<(BranchDensity, BranchDensity), EnvironmentError> {
    spec.validate()?;
    thermal.validate(spec.support)?;
    let (lo, hi) = spec.support;

    // Zero-temperature fermions: sharp step at mu; emit each branch on its
    // own sub-support so the chain map sees a smooth measure.
    if thermal.statistics == Statistics::Fermion && thermal.beta.is_infinite() {
        let mu = thermal.mu.clamp(lo, hi);
        let above = tabulate(spec, (mu, hi), grid_points)?;
        let below = tabulate(spec, (lo, mu), grid_points)?;
        return Ok((above, below));
    }

    let j1 = tabulate_scaled(spec, (lo, hi), grid_points, |w| {
        let n = occupation(thermal, w)?;
        Ok(match thermal.statistics {
            Statistics::Fermion => 1.0 - n,
            Statistics::Boson => 1.0 + n,
        })
    })?;
    let j2 = tabulate_scaled(spec, (lo, hi), grid_points, |w| occupation(thermal, w))?;
    Ok((j1, j2))
}

fn tabulate(
    spec: &SpectralDensitySpec,
    support: (f64, f64),
    grid_points: usize,
) -> Result<BranchDensity, EnvironmentError> {
    tabulate_scaled(spec, support, grid_points, |_| Ok(1.0))
}

fn tabulate_scaled<F>(
    spec: &SpectralDensitySpec,
    support: (f64, f64),
    grid_points: usize,
    factor: F,
) -> Result<BranchDensity, EnvironmentError>
where
    F: Fn(f64) -> Result<f64, EnvironmentError>,
{
    let (lo, hi) = support;
    let m = grid_points.max(2);
    let h = (hi - lo) / m as f64;
    let mut samples = Vec::with_capacity(m);
    for k in 0..m {
        let w = lo + (k as f64 + 0.5) * h;
        let v = spec.evaluate_unchecked(w) * factor(w)?;
        if v < 0.0 {
            return Err(NumericsError::NegativeDensity { omega: w, value: v }.into());
        }
        samples.push(v);
    }
    Ok(BranchDensity { support, samples })
}

/// Chain coefficients of one branch: `coupling` is the system-chain coupling
/// `g_{i,0} = sqrt(total weight)`, `onsite[n]` the site energies, and
/// `hopping[n-1]` the bond `n-1 <-> n` amplitude `sqrt(beta_n)` of the monic
/// recurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainBranch {
    pub coupling: f64,
    pub onsite: Vec<f64>,
    pub hopping: Vec<f64>,
}

impl ChainBranch {
    pub fn len(&self) -> usize {
        self.onsite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsite.is_empty()
    }

    pub fn max_hopping(&self) -> f64 {
        self.hopping
            .iter()
            .cloned()
            .fold(self.coupling.abs(), f64::max)
    }
}

/// Per-branch chain map result; `Empty` marks a branch with negligible
/// weight, dropped from assembly.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchCoefficients {
    Active(ChainBranch),
    Empty,
}

/// Map one branch density to tight-binding chain coefficients via the
/// discretized Stieltjes procedure.
pub fn chain_map(
    density: &BranchDensity,
    n_b: usize,
) -> Result<BranchCoefficients, EnvironmentError> {
    let total = density.total_weight();
    if total < EMPTY_BRANCH_WEIGHT {
        return Ok(BranchCoefficients::Empty);
    }
    if n_b == 0 {
        return Ok(BranchCoefficients::Active(ChainBranch {
            coupling: total.sqrt(),
            onsite: Vec::new(),
            hopping: Vec::new(),
        }));
    }
    let rec = stieltjes_recurrence(&density.measure(), n_b)?;
    Ok(BranchCoefficients::Active(recurrence_to_chain(&rec)))
}

fn recurrence_to_chain(rec: &RecurrenceCoefficients) -> ChainBranch {
    ChainBranch {
        coupling: rec.beta[0].sqrt(),
        onsite: rec.alpha.clone(),
        hopping: rec.beta[1..].iter().map(|b| b.sqrt()).collect(),
    }
}

/// Orthonormalized polynomial values on the measure grid, for the
/// orthogonality checks.
pub fn orthonormal_polynomials(
    measure: &DiscretizedMeasure,
    rec: &RecurrenceCoefficients,
    count: usize,
) -> Vec<Vec<f64>> {
    let m = measure.nodes.len();
    let mut result = Vec::with_capacity(count);
    let mut p_prev = vec![0.0; m];
    let mut p_cur = vec![1.0; m];
    let mut norm = rec.beta[0];
    for k in 0..count {
        let scale = 1.0 / norm.sqrt();
        result.push(p_cur.iter().map(|v| v * scale).collect());
        if k + 1 < count {
            let mut p_next = vec![0.0; m];
            let mut norm_next = 0.0;
            for i in 0..m {
                let v = (measure.nodes[i] - rec.alpha[k]) * p_cur[i]
                    - if k == 0 { 0.0 } else { rec.beta[k] * p_prev[i] };
                p_next[i] = v;
                norm_next += measure.weights[i] * v * v;
            }
            p_prev = p_cur;
            p_cur = p_next;
            norm = norm_next;
        }
    }
    result
}

/// Chain coefficients for both thermofield branches.
#[derive(Debug, Clone)]
pub struct ChainCoefficients {
    /// Branch 1: rotated branch weighted by `1 -+ n`.
    pub branch1: BranchCoefficients,
    /// Branch 2: rotated branch weighted by `n` (filled for fermions).
    pub branch2: BranchCoefficients,
    pub statistics: Statistics,
    pub n_b: usize,
}

impl ChainCoefficients {
    pub fn active_branches(&self) -> Vec<(usize, &ChainBranch)> {
        let mut out = Vec::new();
        if let BranchCoefficients::Active(b) = &self.branch1 {
            out.push((1, b));
        }
        if let BranchCoefficients::Active(b) = &self.branch2 {
            out.push((2, b));
        }
        out
    }

    pub fn max_hopping(&self) -> f64 {
        self.active_branches()
            .iter()
            .map(|(_, b)| b.max_hopping())
            .fold(0.0, f64::max)
    }

    /// Total environment sites across active branches.
    pub fn total_sites(&self) -> usize {
        self.active_branches().iter().map(|(_, b)| b.len()).sum()
    }
}

/// Default dense-grid size for the measure discretization.
pub fn default_grid_points(n_b: usize) -> usize {
    (4 * n_b).max(400_000)
}

/// Split the environment and chain-map both branches.
pub fn build_chain_coefficients(
    spec: &SpectralDensitySpec,
    thermal: &ThermalParams,
    n_b: usize,
    grid_points: Option<usize>,
) -> Result<ChainCoefficients, EnvironmentError> {
    let m = grid_points.unwrap_or_else(|| default_grid_points(n_b));
    let (j1, j2) = thermofield_split(spec, thermal, m)?;
    let branch1 = chain_map(&j1, n_b)?;
    let branch2 = chain_map(&j2, n_b)?;
    Ok(ChainCoefficients {
        branch1,
        branch2,
        statistics: thermal.statistics,
        n_b,
    })
}

/// Write coefficients as CSV with columns `branch,n,onsite,hopping`.
/// Row `n = 0` carries the system-chain coupling in the hopping column.
pub fn export_chain_csv<W: std::io::Write>(
    chains: &ChainCoefficients,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "branch,n,onsite,hopping")?;
    for (idx, branch) in chains.active_branches() {
        for n in 0..branch.len() {
            let hop = if n == 0 {
                branch.coupling
            } else {
                branch.hopping[n - 1]
            };
            writeln!(w, "{},{},{:?},{:?}", idx, n, branch.onsite[n], hop)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn fermion(beta: f64, mu: f64) -> ThermalParams {
        ThermalParams {
            beta,
            mu,
            statistics: Statistics::Fermion,
        }
    }

    fn boson(beta: f64) -> ThermalParams {
        ThermalParams {
            beta,
            mu: 0.0,
            statistics: Statistics::Boson,
        }
    }

    #[test]
    fn semi_elliptical_values() {
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        assert_abs_diff_eq!(
            spec.evaluate(0.0).unwrap(),
            2.0 * 0.05 / (PI * PI),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(spec.evaluate(0.0).unwrap(), 0.0101321, epsilon = 1e-7);
        assert_abs_diff_eq!(spec.evaluate(1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.evaluate(-1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            spec.evaluate(1.5),
            Err(EnvironmentError::OutOfBand { .. })
        ));
    }

    #[test]
    fn caldeira_leggett_values() {
        let spec = SpectralDensitySpec::caldeira_leggett(0.25, 1.0, 1.0, None);
        assert_eq!(spec.support, (0.0, 40.0));
        assert_abs_diff_eq!(
            spec.evaluate(1.0).unwrap(),
            0.25 * (-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(spec.evaluate(1.0).unwrap(), 0.091970, epsilon = 1e-6);
    }

    #[test]
    fn occupation_limits() {
        assert_abs_diff_eq!(
            occupation(&fermion(f64::INFINITY, 0.0), -0.5).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(occupation(&fermion(10.0, 0.3), 0.3).unwrap(), 0.5);
        assert_abs_diff_eq!(occupation(&boson(f64::INFINITY), 0.7).unwrap(), 0.0);
        assert!(matches!(
            occupation(&boson(2.0), 0.0),
            Err(EnvironmentError::DivergentOccupation(_))
        ));
    }

    #[test]
    fn fermion_zero_temperature_split_is_a_step() {
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let (j1, j2) = thermofield_split(&spec, &fermion(f64::INFINITY, 0.0), 2000).unwrap();
        assert_eq!(j1.support, (0.0, 1.0));
        assert_eq!(j2.support, (-1.0, 0.0));
        let w = -0.433;
        assert_abs_diff_eq!(
            crate::numerics::quad_sample_lookup(&j2.samples, j2.support, w),
            spec.evaluate(w).unwrap(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn boson_zero_temperature_keeps_single_branch() {
        let spec = SpectralDensitySpec::caldeira_leggett(0.25, 1.0, 1.0, None);
        let (j1, j2) = thermofield_split(&spec, &boson(f64::INFINITY), 2000).unwrap();
        assert!(j2.total_weight() < EMPTY_BRANCH_WEIGHT);
        assert_abs_diff_eq!(j1.total_weight(), 0.25, epsilon = 1e-4);
        let chains =
            build_chain_coefficients(&spec, &boson(f64::INFINITY), 4, Some(5000)).unwrap();
        assert!(matches!(chains.branch2, BranchCoefficients::Empty));
        assert_eq!(chains.active_branches().len(), 1);
    }

    #[test]
    fn fermion_split_sums_to_density() {
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let th = fermion(10.0, 0.0);
        let (j1, j2) = thermofield_split(&spec, &th, 4096).unwrap();
        for (k, (a, b)) in j1.samples.iter().zip(&j2.samples).enumerate() {
            let w = -1.0 + (k as f64 + 0.5) * 2.0 / 4096.0;
            let j = spec.evaluate(w).unwrap();
            assert_abs_diff_eq!(a + b, j, epsilon = 1e-14);
            assert!(*a >= 0.0 && *b >= 0.0);
        }
        // at omega = mu both branches carry J / 2
        let j_mu = spec.evaluate(0.0).unwrap();
        let mid1 = crate::numerics::quad_sample_lookup(&j1.samples, j1.support, 0.0);
        assert_abs_diff_eq!(mid1, j_mu / 2.0, epsilon = 1e-5);
    }

    #[test]
    fn boson_split_difference_is_density() {
        let spec = SpectralDensitySpec::caldeira_leggett(0.25, 1.0, 1.0, Some(10.0));
        let th = boson(2.0);
        let (j1, j2) = thermofield_split(&spec, &th, 4096).unwrap();
        for (k, (a, b)) in j1.samples.iter().zip(&j2.samples).enumerate() {
            let w = (k as f64 + 0.5) * 10.0 / 4096.0;
            let j = spec.evaluate(w).unwrap();
            assert_abs_diff_eq!(a - b, j, epsilon = 1e-12);
            assert!(*a >= 0.0 && *b >= 0.0);
        }
    }

    #[test]
    fn chebyshev_chain_coefficients() {
        // Full semi-elliptical measure (no split): onsite 0, hopping D/2,
        // coupling sqrt(Gamma D / pi).
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let density = BranchDensity {
            support: spec.support,
            samples: (0..400_000)
                .map(|k| {
                    spec.evaluate(-1.0 + (k as f64 + 0.5) * 2.0 / 400_000.0)
                        .unwrap()
                })
                .collect(),
        };
        let BranchCoefficients::Active(chain) = chain_map(&density, 120).unwrap() else {
            panic!("branch should be active")
        };
        assert_abs_diff_eq!(chain.coupling, (0.05 / PI).sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(chain.coupling, 0.12616, epsilon = 1e-5);
        for (n, w) in chain.onsite.iter().enumerate() {
            assert!(w.abs() < 1e-10, "onsite[{n}] = {w}");
        }
        for (n, g) in chain.hopping.iter().enumerate() {
            assert!((g - 0.5).abs() < 1e-6, "hopping[{n}] = {g}");
        }
    }

    #[test]
    fn flat_measure_first_moments() {
        // Flat J = c on [0, 1]: onsite_0 = 1/2, coupling sqrt(c).
        let c = 0.37;
        let density = BranchDensity {
            support: (0.0, 1.0),
            samples: vec![c; 100_000],
        };
        let BranchCoefficients::Active(chain) = chain_map(&density, 3).unwrap() else {
            panic!()
        };
        assert_abs_diff_eq!(chain.onsite[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(chain.coupling, c.sqrt(), epsilon = 1e-12);
        // coupling^2 equals the measure total weight by definition
        assert_abs_diff_eq!(
            chain.coupling * chain.coupling,
            density.total_weight(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn orthogonality_of_generated_polynomials() {
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let th = fermion(10.0, 0.0);
        let (j1, _) = thermofield_split(&spec, &th, 100_000).unwrap();
        let measure = j1.measure();
        let rec = stieltjes_recurrence(&measure, 21).unwrap();
        let polys = orthonormal_polynomials(&measure, &rec, 21);
        for n in 0..21 {
            for m in 0..=n {
                let mut dot = 0.0;
                for i in 0..measure.nodes.len() {
                    dot += measure.weights[i] * polys[n][i] * polys[m][i];
                }
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!(
                    (dot - expect).abs() < 1e-6,
                    "orthogonality failure at ({n}, {m}): {dot}"
                );
            }
        }
    }

    #[test]
    fn asymptotic_coefficients_for_smooth_density() {
        // Smooth J on [w1, w2]: onsite -> (w1 + w2)/2, hopping -> (w2 - w1)/4
        // by n = 50. Uses the hole branch of a finite-temperature split.
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let th = fermion(10.0, 0.0);
        let (j1, _) = thermofield_split(&spec, &th, 400_000).unwrap();
        let BranchCoefficients::Active(chain) = chain_map(&j1, 60).unwrap() else {
            panic!()
        };
        let center = 0.0;
        let quarter = 0.5;
        for n in 50..60 {
            assert!(
                (chain.onsite[n] - center).abs() < 1e-4,
                "onsite[{n}] = {}",
                chain.onsite[n]
            );
        }
        for n in 49..59 {
            assert!(
                (chain.hopping[n] - quarter).abs() < 1e-4,
                "hopping[{n}] = {}",
                chain.hopping[n]
            );
        }
    }

    #[test]
    fn split_conserves_total_weight_for_fermions() {
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let th = fermion(10.0, 0.0);
        let (j1, j2) = thermofield_split(&spec, &th, 400_000).unwrap();
        let total = j1.total_weight() + j2.total_weight();
        let oracle =
            crate::numerics::adaptive_simpson(|w| spec.evaluate(w).unwrap(), -1.0, 1.0, 1e-13);
        assert!((total - oracle).abs() < 1e-10);
    }

    #[test]
    fn chain_map_is_deterministic() {
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let th = fermion(10.0, 0.0);
        let a = build_chain_coefficients(&spec, &th, 32, Some(50_000)).unwrap();
        let b = build_chain_coefficients(&spec, &th, 32, Some(50_000)).unwrap();
        assert_eq!(a.branch1, b.branch1);
        assert_eq!(a.branch2, b.branch2);
    }

    #[test]
    fn coefficients_stable_under_grid_doubling() {
        let spec = SpectralDensitySpec::semi_elliptical(0.05, 1.0);
        let th = fermion(10.0, 0.0);
        let a = build_chain_coefficients(&spec, &th, 24, None).unwrap();
        let b = build_chain_coefficients(&spec, &th, 24, Some(2 * default_grid_points(24))).unwrap();
        let (BranchCoefficients::Active(ba), BranchCoefficients::Active(bb)) =
            (&a.branch1, &b.branch1)
        else {
            panic!()
        };
        for n in 0..24 {
            assert!((ba.onsite[n] - bb.onsite[n]).abs() < 1e-8);
        }
        for n in 0..23 {
            assert!((ba.hopping[n] - bb.hopping[n]).abs() < 1e-8);
        }
        assert!((ba.coupling - bb.coupling).abs() < 1e-8);
    }

    #[test]
    fn csv_export_format() {
        let chains = ChainCoefficients {
            branch1: BranchCoefficients::Active(ChainBranch {
                coupling: 0.5,
                onsite: vec![0.25, -0.125],
                hopping: vec![0.75],
            }),
            branch2: BranchCoefficients::Empty,
            statistics: Statistics::Fermion,
            n_b: 2,
        };
        let mut buf = Vec::new();
        export_chain_csv(&chains, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "branch,n,onsite,hopping");
        assert_eq!(lines[1], "1,0,0.25,0.5");
        assert_eq!(lines[2], "1,1,-0.125,0.75");
        assert_eq!(lines.len(), 3);
    }
}
