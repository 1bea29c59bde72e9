//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not diagonalizable within tolerance (residual {residual:.3e})")]
    NonDiagonalizable { residual: f64 },
    #[error("Schur iteration failed to converge")]
    SchurFailure,
    #[error("singular map: all singular values below threshold")]
    SingularMap,
    #[error("rcond must lie in (0, 1), got {0}")]
    BadRcond(f64),
    #[error("quadrature needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("spectral density sample is negative at omega = {omega}: {value}")]
    NegativeDensity { omega: f64, value: f64 },
    #[error("measure has near-zero total weight ({0:.3e})")]
    EmptyMeasure(f64),
}

#[derive(Debug, Error)]
pub enum EnvironmentError {
    #[error("omega = {omega} outside spectral density support [{lo}, {hi}]")]
    OutOfBand { omega: f64, lo: f64, hi: f64 },
    #[error("bosonic occupation diverges at omega = mu = {0}")]
    DivergentOccupation(f64),
    #[error("invalid thermal parameters: {0}")]
    BadThermalParams(String),
    #[error("invalid spectral density: {0}")]
    BadSpectralDensity(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),
    #[error("Fock dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("boson cutoff must be >= 1, got {0}")]
    BadCutoff(usize),
    #[error("unregistered system operator: {0}")]
    UnregisteredOperator(String),
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("system occupancy {0} outside [0, 1]")]
    OccupancyRange(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("time grid must be ascending")]
    GridNotAscending,
    #[error("Krylov iteration stalled; reduce the step size (residual {residual:.3e} at dim {dim})")]
    KrylovStall { residual: f64, dim: usize },
    #[error("state is unphysical: {0}")]
    UnphysicalState(String),
    #[error("requested time {time} exceeds the finite-size horizon {horizon}; increase N_B to at least {needed_nb}")]
    HorizonExceeded {
        time: f64,
        horizon: f64,
        needed_nb: usize,
    },
    #[error("backend does not support this operation: {0}")]
    Unsupported(String),
    #[error("checkpoint format error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("time grid must be uniform with at least 3 points")]
    BadGrid,
    #[error("map is singular beyond regularization at t = {0}; shift the evaluation time")]
    ShiftEvaluationTime(f64),
    #[error("generator series has no plateau: not converged")]
    NotConverged,
    #[error("no physical fast state after retries; best candidate min eigenvalue {min_eig:.3e}, trace error {trace_err:.3e}")]
    NoPhysicalFastState { min_eig: f64, trace_err: f64 },
    #[error("parity operator must be diagonal in the occupation basis")]
    NonDiagonalParity,
    #[error("operator basis does not span the system operator space")]
    BasisNotSpanning,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Error)]
pub enum CorrelatorError {
    #[error("time grids do not match")]
    GridMismatch,
    #[error("series have empty overlap")]
    EmptyOverlap,
    #[error("generator eigenvalue with positive real part {0:.3e}: unstable Fourier tail")]
    UnstableTail(f64),
    #[error("extrapolation requested at t = {t} before tau_star = {tau_star}")]
    BeforeSplit { t: f64, tau_star: f64 },
    #[error("generator not converged; refusing to extrapolate (derivative jump {jump:.3e})")]
    NotConverged { jump: f64 },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Crate-level error wrapper.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Environment(#[from] EnvironmentError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Correlator(#[from] CorrelatorError),
}
