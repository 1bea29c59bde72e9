//! Exact free-fermion backend: quadratic Hamiltonians propagated through
//! the single-particle correlation matrix `C_{ij} = <d_j^dag d_i>`.
//!
//! `U(t) = e^{-iHt}` comes from one cached Hermitian eigendecomposition;
//! single-site quantities then need only one propagator row per time, so
//! long grids stay cheap even for hundreds of chain sites.

use super::{ComponentSeries, EvolverCaps, PerturbedSeries, TimeGrid};
use crate::environment::ChainCoefficients;
use crate::error::BackendError;
use crate::models::{assemble_single_particle, env_site_order, ModelSpec, OperatorTag};
use crate::numerics::{hermitian_eigen, CMat, CVec, C64};
use nalgebra::DVector;

/// Single-particle correlation matrix state.
#[derive(Debug, Clone)]
pub struct CorrelationMatrixState {
    pub c: CMat,
    pub time: f64,
}

impl CorrelationMatrixState {
    /// Hermiticity within 1e-12 and spectrum inside [-1e-10, 1 + 1e-10].
    pub fn validate(&self) -> Result<(), BackendError> {
        let dev = crate::numerics::frobenius(&(&self.c - self.c.adjoint()));
        if dev > 1e-12 * (1.0 + crate::numerics::frobenius(&self.c)) {
            return Err(BackendError::UnphysicalState(format!(
                "correlation matrix not Hermitian (deviation {dev:.3e})"
            )));
        }
        let (vals, _) = hermitian_eigen(&self.c).map_err(BackendError::Numerics)?;
        for v in vals.iter() {
            if *v < -1e-10 || *v > 1.0 + 1e-10 {
                return Err(BackendError::UnphysicalState(format!(
                    "correlation matrix eigenvalue {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

pub struct FfBackend {
    evals: DVector<f64>,
    evecs: CMat,
    dt: f64,
    /// Initial thermofield occupation per matrix index (impurity excluded).
    env_occupations: Vec<f64>,
    n_b: usize,
    max_hopping: f64,
}

impl FfBackend {
    /// Build from a quadratic model; only the resonant level model has a
    /// quadratic representation.
    pub fn new(
        model: &ModelSpec,
        chains: &ChainCoefficients,
        dt: f64,
    ) -> Result<Self, BackendError> {
        let h = assemble_single_particle(model, chains)?;
        let (evals, evecs) = hermitian_eigen(&h)?;
        let order = env_site_order(chains);
        let env_occupations = order
            .iter()
            .map(|&(b, _)| if b == 2 { 1.0 } else { 0.0 })
            .collect();
        Ok(Self {
            evals,
            evecs,
            dt,
            env_occupations,
            n_b: chains.n_b,
            max_hopping: chains.max_hopping(),
        })
    }

    pub fn caps(&self) -> EvolverCaps {
        EvolverCaps {
            supports_choi_replicas: false,
            supports_interactions: false,
            supports_bosons: false,
            dt: self.dt,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn system_dim(&self) -> usize {
        2
    }

    /// Total single-particle dimension (impurity + chains).
    pub fn dim(&self) -> usize {
        self.evals.len()
    }

    pub fn horizon(&self) -> f64 {
        super::finite_size_horizon(self.n_b, self.max_hopping, super::HORIZON_SAFETY)
    }

    /// Block-diagonal initial state: impurity occupancy, branch-1 chain
    /// empty, branch-2 chain filled.
    pub fn initial_state(&self, sys_occupancy: f64) -> Result<CorrelationMatrixState, BackendError> {
        if !(0.0..=1.0).contains(&sys_occupancy) {
            return Err(BackendError::OccupancyRange(sys_occupancy));
        }
        let n = self.dim();
        let mut c = CMat::zeros(n, n);
        c[(0, 0)] = C64::new(sys_occupancy, 0.0);
        for (k, &occ) in self.env_occupations.iter().enumerate() {
            c[(k + 1, k + 1)] = C64::new(occ, 0.0);
        }
        Ok(CorrelationMatrixState { c, time: 0.0 })
    }

    /// Full propagator `U(t) = e^{-iHt}`.
    pub fn propagator(&self, t: f64) -> CMat {
        let phases = CMat::from_diagonal(&self.evals.map(|e| C64::new(0.0, -e * t).exp()));
        &self.evecs * phases * self.evecs.adjoint()
    }

    /// Row `i` of `U(t)` in O(dim^2).
    pub fn propagator_row(&self, i: usize, t: f64) -> CVec {
        let n = self.dim();
        let mut phase = CVec::zeros(n);
        for m in 0..n {
            phase[m] = self.evecs[(i, m)] * C64::new(0.0, -self.evals[m] * t).exp();
        }
        let mut row = CVec::zeros(n);
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for m in 0..n {
                s += phase[m] * self.evecs[(j, m)].conj();
            }
            row[j] = s;
        }
        row
    }

    /// `U_{00}(t)` in O(dim).
    pub fn impurity_amplitude(&self, t: f64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for m in 0..self.dim() {
            s += self.evecs[(0, m)].norm_sqr() * C64::new(0.0, -self.evals[m] * t).exp();
        }
        s
    }

    /// `C(t) = U C U^dag`.
    pub fn evolve(
        &self,
        state: &CorrelationMatrixState,
        t: f64,
    ) -> Result<CorrelationMatrixState, BackendError> {
        if state.c.nrows() != self.dim() {
            return Err(BackendError::DimensionMismatch(format!(
                "state dimension {} vs backend {}",
                state.c.nrows(),
                self.dim()
            )));
        }
        let u = self.propagator(t - state.time);
        Ok(CorrelationMatrixState {
            c: &u * &state.c * u.adjoint(),
            time: t,
        })
    }

    /// Impurity occupancy along a grid for a block-diagonal initial state,
    /// `n(t) = sum_k |U_{0k}(t)|^2 C_{kk}(0)`.
    pub fn impurity_density_series(&self, sys_occupancy: f64, grid: &TimeGrid) -> Vec<f64> {
        let n = self.dim();
        let mut occ0 = vec![0.0; n];
        occ0[0] = sys_occupancy;
        for (k, &o) in self.env_occupations.iter().enumerate() {
            occ0[k + 1] = o;
        }
        grid.times()
            .iter()
            .map(|&t| {
                let row = self.propagator_row(0, t);
                (0..n).map(|k| row[k].norm_sqr() * occ0[k]).sum()
            })
            .collect()
    }

    /// Greater/lesser single-particle functions of Appendix-style closed
    /// form: `G^<(t) = [U(t) C]_{ii}`, `G^>(t) = [U(t)(1 - C)]_{ii}`.
    pub fn green_functions(
        &self,
        c_ss: &CorrelationMatrixState,
        site: usize,
        grid: &TimeGrid,
    ) -> Result<(Vec<C64>, Vec<C64>), BackendError> {
        if c_ss.c.nrows() != self.dim() {
            return Err(BackendError::DimensionMismatch(
                "correlation matrix dimension".into(),
            ));
        }
        let col = c_ss.c.column(site).into_owned();
        let mut lesser = Vec::with_capacity(grid.len());
        let mut greater = Vec::with_capacity(grid.len());
        for &t in &grid.times() {
            let row = self.propagator_row(site, t);
            let uc: C64 = (0..self.dim()).map(|k| row[k] * col[k]).sum();
            lesser.push(uc);
            greater.push(row[site] - uc);
        }
        Ok((lesser, greater))
    }

    /// Evolve a diagonal system state to `tau`; returns the full
    /// correlation-matrix state (the operational equilibrium when `tau`
    /// exceeds the thermalization time).
    pub fn thermalize(
        &self,
        rho0: &CMat,
        tau: f64,
    ) -> Result<CorrelationMatrixState, BackendError> {
        let occ = diagonal_occupancy(rho0)?;
        let init = self.initial_state(occ)?;
        self.evolve(&init, tau)
    }

    pub fn reduced_density(&self, state: &CorrelationMatrixState) -> CMat {
        let n = state.c[(0, 0)].re;
        CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(1.0 - n, 0.0),
            C64::new(n, 0.0),
        ]))
    }

    pub fn density_series(
        &self,
        rho0: &CMat,
        grid: &TimeGrid,
    ) -> Result<Vec<CMat>, BackendError> {
        let occ = diagonal_occupancy(rho0)?;
        Ok(self
            .impurity_density_series(occ, grid)
            .into_iter()
            .map(|n| {
                CMat::from_diagonal(&CVec::from_vec(vec![
                    C64::new(1.0 - n, 0.0),
                    C64::new(n, 0.0),
                ]))
            })
            .collect())
    }

    /// Greater/lesser perturbed evolutions for the impurity mode. The
    /// reduced perturbed operators live in the single-charge sectors:
    /// `rho~_>(t) = G^>(t) |1><0|` and `rho~_<(t) = conj(G^<(t)) |0><1|`.
    pub fn perturbed_series(
        &self,
        state: &CorrelationMatrixState,
        tag: OperatorTag,
        grid: &TimeGrid,
    ) -> Result<PerturbedSeries, BackendError> {
        match tag {
            OperatorTag::Annihilate(0) | OperatorTag::Create(0) => {}
            _ => {
                return Err(BackendError::Unsupported(format!(
                    "free-fermion backend supports impurity-mode operators only, got {tag:?}"
                )))
            }
        }
        let (lesser_vals, greater_vals) = self.green_functions(state, 0, grid)?;
        let greater = ComponentSeries {
            rho_tilde: greater_vals
                .iter()
                .map(|&g| {
                    let mut m = CMat::zeros(2, 2);
                    m[(1, 0)] = g;
                    m
                })
                .collect(),
            values: greater_vals,
            conjugated: false,
        };
        let lesser_inner: Vec<C64> = lesser_vals.iter().map(|v| v.conj()).collect();
        let lesser = ComponentSeries {
            rho_tilde: lesser_inner
                .iter()
                .map(|&w| {
                    let mut m = CMat::zeros(2, 2);
                    m[(0, 1)] = w;
                    m
                })
                .collect(),
            values: lesser_inner,
            conjugated: true,
        };
        Ok(PerturbedSeries {
            grid: *grid,
            greater: Some(greater),
            lesser: Some(lesser),
            even: None,
        })
    }
}

fn diagonal_occupancy(rho: &CMat) -> Result<f64, BackendError> {
    if rho.nrows() != 2 || rho.ncols() != 2 {
        return Err(BackendError::DimensionMismatch(
            "free-fermion system state must be 2x2".into(),
        ));
    }
    if rho[(0, 1)].norm() > 1e-12 || rho[(1, 0)].norm() > 1e-12 {
        return Err(BackendError::UnphysicalState(
            "free-fermion backend requires a number-diagonal system state".into(),
        ));
    }
    let occ = rho[(1, 1)].re;
    if !(-1e-10..=1.0 + 1e-10).contains(&occ) {
        return Err(BackendError::OccupancyRange(occ));
    }
    Ok(occ.clamp(0.0, 1.0))
}
