//! Error types shared across the crate.

use alloc::string::String;
use core::fmt;

/// Errors from building system operators.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// Requested dot count exceeds the configured capacity.
    CapacityExceeded { n_dots: usize, max: usize },
    /// A builder only defined for a specific configuration was asked for
    /// something else (e.g. the rotating-wave pair matrix for n_dots != 2).
    UnsupportedConfiguration(String),
    /// A parameter violates its type invariant.
    InvalidParams(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::CapacityExceeded { n_dots, max } => {
                write!(f, "n_dots = {n_dots} exceeds the configured maximum of {max}")
            }
            ModelError::UnsupportedConfiguration(msg) => {
                write!(f, "unsupported configuration: {msg}")
            }
            ModelError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
        }
    }
}

/// Errors from bath quadrature and kernel construction.
#[derive(Debug, Clone, PartialEq)]
pub enum BathError {
    /// Temperature must be strictly positive.
    NonPositiveTemperature(f64),
    /// Adaptive quadrature failed to reach the requested tolerance.
    QuadratureFailure(String),
    /// Memory time is undefined because the correlation function vanishes
    /// identically (alpha = 0).
    UndefinedMemory,
    /// A parameter violates its type invariant.
    InvalidParams(String),
    /// Kernel text form could not be parsed.
    ParseError(String),
}

impl fmt::Display for BathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BathError::NonPositiveTemperature(t) => {
                write!(f, "temperature must be > 0 K, got {t}")
            }
            BathError::QuadratureFailure(msg) => write!(f, "quadrature failed: {msg}"),
            BathError::UndefinedMemory => {
                write!(f, "memory time undefined: correlation function is identically zero")
            }
            BathError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            BathError::ParseError(msg) => write!(f, "kernel parse error: {msg}"),
        }
    }
}

/// Errors from the path-integral engine.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    /// Inputs have inconsistent dimensions.
    DimensionMismatch(String),
    /// The augmented path tensor would exceed the configured budget.
    Capacity { required: u128, budget: u128 },
    /// The trace of the propagated state drifted beyond tolerance; carries
    /// the step at which the drift was detected.
    TraceDrift { step: usize, drift: f64 },
    Bath(BathError),
    Model(ModelError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            EngineError::Capacity { required, budget } => {
                write!(f, "path tensor needs {required} amplitudes, budget is {budget}")
            }
            EngineError::TraceDrift { step, drift } => {
                write!(f, "trace drift {drift:.3e} at step {step} exceeds tolerance")
            }
            EngineError::Bath(e) => write!(f, "{e}"),
            EngineError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<BathError> for EngineError {
    fn from(e: BathError) -> Self {
        EngineError::Bath(e)
    }
}

impl From<ModelError> for EngineError {
    fn from(e: ModelError) -> Self {
        EngineError::Model(e)
    }
}

/// Errors from coherence extraction and rate fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// Density-matrix element indices out of range.
    IndexOutOfRange { index: (usize, usize), dim: usize },
    /// The requested fit window does not satisfy its preconditions.
    InvalidWindow(String),
    /// Fewer than the minimum number of usable points remain after
    /// smoothing and flooring.
    InsufficientData { usable: usize, required: usize },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::IndexOutOfRange { index, dim } => {
                write!(f, "element ({}, {}) out of range for dimension {dim}", index.0, index.1)
            }
            AnalysisError::InvalidWindow(msg) => write!(f, "invalid fit window: {msg}"),
            AnalysisError::InsufficientData { usable, required } => {
                write!(f, "only {usable} usable points, need at least {required}")
            }
        }
    }
}
