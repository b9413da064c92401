use alloc::string::String;
use core::fmt;

use thiserror::Error;

/// A non-finite value appeared somewhere in the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelFault {
    #[error("non-finite {quantity}: {value}")]
    NonFinite { quantity: &'static str, value: f64 },
}

impl ModelFault {
    pub(crate) fn check(quantity: &'static str, value: f64) -> Result<f64, ModelFault> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ModelFault::NonFinite { quantity, value })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("grid needs at least 3 points per axis, got {0}")]
    GridTooSmall(usize),
    #[error("empty range [{lo}, {hi}] for {axis}")]
    EmptyRange { axis: &'static str, lo: f64, hi: f64 },
    #[error("normal matrix is singular")]
    Singular,
    #[error(transparent)]
    Model(#[from] ModelFault),
}

/// One violated invariant, addressed by a dotted field path such as `params.xi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl Issue {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Issue { path: path.into(), message: message.into() }
    }

    /// Prefixes the path, e.g. `xi` becomes `params.xi`.
    pub fn under(mut self, prefix: &str) -> Self {
        self.path = alloc::format!("{prefix}.{}", self.path);
        self
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}
