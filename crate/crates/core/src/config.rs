//! Numerical tolerances and the global dimension cap.

use std::sync::OnceLock;

/// Environment variable overriding [`DEFAULT_MAX_DIMENSION`].
pub const MAX_DIMENSION_ENV: &str = "MEMCHAN_MAX_DIM";

/// Largest matrix dimension any kernel will build unless overridden.
pub const DEFAULT_MAX_DIMENSION: usize = 1024;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as round-off and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-9;

/// Eigenvalues at or below this magnitude contribute nothing to entropies.
pub const ENTROPY_ZERO: f64 = 1e-12;

/// Eigenvalues below `-ENTROPY_NEGATIVE_LIMIT` make an entropy evaluation fail.
pub const ENTROPY_NEGATIVE_LIMIT: f64 = 1e-8;

/// Validation tolerances for density matrices and unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub psd: f64,
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-9,
            trace: 1e-9,
            psd: 1e-9,
            reconstruction: 1e-9,
        }
    }
}

/// The dimension cap in effect, read once from [`MAX_DIMENSION_ENV`].
pub fn max_dimension() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_DIMENSION_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_DIMENSION)
    })
}

pub(crate) fn check_dimension(requested: usize) -> crate::Result<()> {
    let cap = max_dimension();
    if requested > cap {
        return Err(crate::Error::DimensionCap { requested, cap });
    }
    Ok(())
}
