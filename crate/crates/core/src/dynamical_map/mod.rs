//! Dynamical-map extraction, the time-convolutionless generator, memory
//! times, the fast-thermalization initial state, slippage extrapolation,
//! and the fermionic parity correction.

mod accelerate;
mod extract;
pub mod superop;
mod tcl;

pub use accelerate::{
    extrapolate_density, mpemba_fast_state, parity_transform_generator, FastStateResult,
    GeneratorPropagator,
};
pub use extract::{extract_map_from_basis, extract_map_from_choi, extract_map_from_choi_route};
pub use tcl::{
    estimate_memory_time, plateau_generator, steady_state_from_generator, tcl_generator,
    Convergence, MemoryEstimate, MemoryTimescales, TCLGeneratorSeries,
};

use crate::backends::TimeGrid;
use crate::error::MapError;
use crate::numerics::{frobenius, hermitian_eigen, CMat, C64};
use superop::{apply_map, choi_of_map, vectorize};

/// System density operator (or flagged non-physical perturbed object).
#[derive(Debug, Clone)]
pub struct DensityOperator {
    pub matrix: CMat,
    pub physical: bool,
}

impl DensityOperator {
    /// Wrap and validate a physical state: Hermitian within 1e-10, trace 1
    /// within 1e-10, eigenvalues above -1e-10.
    pub fn physical(matrix: CMat) -> Result<Self, MapError> {
        let out = Self {
            matrix,
            physical: true,
        };
        out.validate()?;
        Ok(out)
    }

    /// Wrap a perturbed (non-physical) operator.
    pub fn perturbed(matrix: CMat) -> Self {
        Self {
            matrix,
            physical: false,
        }
    }

    pub fn validate(&self) -> Result<(), MapError> {
        if !self.physical {
            return Ok(());
        }
        let m = &self.matrix;
        let herm = frobenius(&(m - m.adjoint()));
        if herm > 1e-10 {
            return Err(MapError::DimensionMismatch(format!(
                "state not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(MapError::DimensionMismatch(format!(
                "state trace {tr} differs from 1"
            )));
        }
        let (vals, _) = hermitian_eigen(m)?;
        if let Some(min) = vals.iter().cloned().reduce(f64::min) {
            if min < -1e-10 {
                return Err(MapError::DimensionMismatch(format!(
                    "state has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Dynamical maps `Lambda(t_k)` as d^2 x d^2 matrices on a uniform grid,
/// column-stacking convention.
#[derive(Debug, Clone)]
pub struct DynamicalMapSeries {
    pub grid: TimeGrid,
    pub maps: Vec<CMat>,
    pub dim: usize,
}

/// Deviations from the contract of a map series; all should sit at the
/// numerical noise floor for a valid extraction.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MapPropertyReport {
    /// `||Lambda(0) - 1||`.
    pub identity_at_zero: f64,
    /// worst `||Lambda^dag vec(1) - vec(1)||` over the grid.
    pub max_trace_violation: f64,
    /// worst Hermiticity violation of `Lambda[X]` over Hermitian probes.
    pub max_hermiticity_violation: f64,
    /// most negative Choi eigenvalue over the grid (complete positivity).
    pub min_choi_eigenvalue: f64,
}

impl DynamicalMapSeries {
    pub fn new(grid: TimeGrid, maps: Vec<CMat>, dim: usize) -> Result<Self, MapError> {
        if maps.len() != grid.len() {
            return Err(MapError::BadGrid);
        }
        Ok(Self { grid, maps, dim })
    }

    pub fn at(&self, k: usize) -> &CMat {
        &self.maps[k]
    }

    /// Apply `Lambda(t_k)` to a state.
    pub fn apply(&self, k: usize, rho: &CMat) -> CMat {
        apply_map(&self.maps[k], rho)
    }

    /// Contract checks; `probes` are Hermitian matrices for the
    /// hermiticity-preservation test.
    pub fn verify(&self, probes: &[CMat]) -> MapPropertyReport {
        let d = self.dim;
        let eye = CMat::identity(d, d);
        let vec_id = vectorize(&eye);
        let identity_at_zero = frobenius(&(&self.maps[0] - CMat::identity(d * d, d * d)));
        let mut max_trace_violation: f64 = 0.0;
        let mut max_herm: f64 = 0.0;
        let mut min_choi = f64::INFINITY;
        for lam in &self.maps {
            let tv = (lam.adjoint() * &vec_id - &vec_id).norm();
            max_trace_violation = max_trace_violation.max(tv);
            for p in probes {
                let out = apply_map(lam, p);
                let dev = frobenius(&(&out - out.adjoint())) * 0.5;
                max_herm = max_herm.max(dev);
            }
            let choi = choi_of_map(lam, d);
            let choi_h = (&choi + choi.adjoint()) * C64::new(0.5, 0.0);
            if let Ok((vals, _)) = hermitian_eigen(&choi_h) {
                for v in vals.iter() {
                    min_choi = min_choi.min(*v);
                }
            }
        }
        MapPropertyReport {
            identity_at_zero,
            max_trace_violation,
            max_hermiticity_violation: max_herm,
            min_choi_eigenvalue: min_choi,
        }
    }
}
