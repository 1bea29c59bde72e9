//! Time-evolution engines behind a common contract: exact free-fermion
//! correlation-matrix propagation and truncated-Fock exact diagonalization
//! with Krylov short-time stepping.

pub mod checkpoint;
pub mod ed;
pub mod ff;

pub use ed::{EdBackend, FockStateVector};
pub use ff::{CorrelationMatrixState, FfBackend};

use crate::error::BackendError;
use crate::models::OperatorTag;
use crate::numerics::{CMat, C64};
use serde::{Deserialize, Serialize};

/// Capability flags of a time evolver; honored by construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvolverCaps {
    pub supports_choi_replicas: bool,
    pub supports_interactions: bool,
    pub supports_bosons: bool,
    pub dt: f64,
}

/// Uniform time grid `t_k = k * dt`, `k = 0..steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Self {
        assert!(dt > 0.0 && dt.is_finite());
        Self { dt, steps }
    }

    pub fn to_time(dt: f64, t_max: f64) -> Self {
        let steps = (t_max / dt).round().max(1.0) as usize;
        Self { dt, steps }
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.steps)
    }

    /// Grid index closest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        ((t / self.dt).round() as usize).min(self.steps)
    }
}

/// One perturbed-evolution component: the correlation values
/// `Tr(M rho~(t))` and the reduced perturbed operator at every grid time.
/// `rho_tilde` carries the parity-corrected object for odd fermionic
/// perturbations and is not a physical density matrix.
#[derive(Debug, Clone)]
pub struct ComponentSeries {
    pub values: Vec<C64>,
    pub rho_tilde: Vec<CMat>,
    /// Conjugate `Tr(M rho~)` when reporting the correlation value.
    pub conjugated: bool,
}

impl ComponentSeries {
    pub fn value(&self, k: usize) -> C64 {
        if self.conjugated {
            self.values[k].conj()
        } else {
            self.values[k]
        }
    }
}

/// Output of a perturb-and-evolve run. Odd fermionic perturbations carry
/// greater/lesser parts; even perturbations a single component.
#[derive(Debug, Clone)]
pub struct PerturbedSeries {
    pub grid: TimeGrid,
    pub greater: Option<ComponentSeries>,
    pub lesser: Option<ComponentSeries>,
    pub even: Option<ComponentSeries>,
}

/// Thermalized full-state handle, backend specific.
#[derive(Debug, Clone)]
pub enum ThermalizedState {
    Ff(CorrelationMatrixState),
    Ed(FockStateVector),
}

/// Dispatch wrapper over the two engines.
pub enum Backend {
    Ff(FfBackend),
    Ed(EdBackend),
}

impl Backend {
    pub fn caps(&self) -> EvolverCaps {
        match self {
            Backend::Ff(b) => b.caps(),
            Backend::Ed(b) => b.caps(),
        }
    }

    pub fn system_dim(&self) -> usize {
        match self {
            Backend::Ff(b) => b.system_dim(),
            Backend::Ed(b) => b.system_dim(),
        }
    }

    pub fn system_parity_diagonal(&self) -> Vec<f64> {
        match self {
            Backend::Ff(_) => vec![1.0, -1.0],
            Backend::Ed(b) => b.model().system_parity_diagonal(),
        }
    }

    pub fn thermalize(
        &self,
        rho0: &CMat,
        tau: f64,
    ) -> Result<(ThermalizedState, CMat), BackendError> {
        match self {
            Backend::Ff(b) => {
                let st = b.thermalize(rho0, tau)?;
                let red = b.reduced_density(&st);
                Ok((ThermalizedState::Ff(st), red))
            }
            Backend::Ed(b) => {
                let st = b.thermalize(rho0, tau)?;
                let red = b.reduced_density(&st);
                Ok((ThermalizedState::Ed(st), red))
            }
        }
    }

    /// Reduced system density series from a physical initial state.
    pub fn density_series(&self, rho0: &CMat, grid: &TimeGrid) -> Result<Vec<CMat>, BackendError> {
        match self {
            Backend::Ff(b) => b.density_series(rho0, grid),
            Backend::Ed(b) => b.density_series(rho0, grid),
        }
    }

    pub fn perturbed_series(
        &self,
        state: &ThermalizedState,
        tag: OperatorTag,
        grid: &TimeGrid,
    ) -> Result<PerturbedSeries, BackendError> {
        match (self, state) {
            (Backend::Ff(b), ThermalizedState::Ff(st)) => b.perturbed_series(st, tag, grid),
            (Backend::Ed(b), ThermalizedState::Ed(st)) => b.perturbed_series(st, tag, grid),
            _ => Err(BackendError::DimensionMismatch(
                "thermalized state belongs to a different backend".into(),
            )),
        }
    }

    /// Finite-size validity horizon of the assembled chains.
    pub fn horizon(&self) -> f64 {
        match self {
            Backend::Ff(b) => b.horizon(),
            Backend::Ed(b) => b.horizon(),
        }
    }
}

pub const HORIZON_SAFETY: f64 = 1.5;

/// Lieb-Robinson style horizon: sites further than about `2 g_max t` from
/// the system have negligible effect, so an `N_B`-site chain stays faithful
/// up to `N_B / (2 g_max)` over the safety factor.
pub fn finite_size_horizon(n_b: usize, max_hopping: f64, safety: f64) -> f64 {
    if max_hopping <= 0.0 {
        return f64::INFINITY;
    }
    n_b as f64 / (2.0 * max_hopping * safety)
}

/// Chain length needed to keep `t_max` inside the horizon.
pub fn required_chain_length(t_max: f64, max_hopping: f64, safety: f64) -> usize {
    (t_max * 2.0 * max_hopping * safety).ceil() as usize
}
