use thiserror::Error;

/// Errors surfaced by state constructors, protocol operations and readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector has length {got}, expected {expected}")]
    AmplitudeLength { expected: usize, got: usize },

    #[error("atom counts differ: {left} vs {right}")]
    AtomCountMismatch { left: usize, right: usize },

    #[error("state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid z-projection 2m = {two_m} for {atom_count} atoms")]
    InvalidProjection { atom_count: usize, two_m: i64 },

    #[error("polar angle {theta} outside [0, pi]")]
    ThetaOutOfRange { theta: f64 },

    #[error("2*k0 = {two_k0} has the wrong parity for order n = {order}")]
    GaussSumParity { order: u32, two_k0: i64 },

    #[error("decomposition built for {expected} atoms applied to a {got}-atom state")]
    DecompositionMismatch { expected: usize, got: usize },

    #[error("reconstruction residual {residual:.3e} exceeds {tolerance:.1e}; state is not the squeezed image of the given source")]
    ReconstructionResidual { residual: f64, tolerance: f64 },

    #[error("operation requires a single control atom, got {control_count}")]
    ControlCountNotOne { control_count: usize },

    #[error("state has zero norm")]
    ZeroNormState,

    #[error("grid must have at least 2 samples per axis, got {n_theta} x {n_phi}")]
    GridTooSmall { n_theta: usize, n_phi: usize },

    #[error("row index {row} out of range for {control_count}-atom control group")]
    RowOutOfRange { row: usize, control_count: usize },

    #[error("product-space oracle capped at {cap} atoms, requested {total}")]
    OracleSizeCap { total: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
