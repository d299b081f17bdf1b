use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// [`Error::is_config`] separates bad input (config, CSV, schedule) from
/// numerical failures; the CLI maps them to different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("solid height reached: deflection {deflection} m exceeds limit {limit} m")]
    SolidHeight { deflection: f64, limit: f64 },
    #[error("singular geometry: {0}")]
    SingularGeometry(String),
    #[error("arc design infeasible: {reason} (best residual {residual:.3e} m)")]
    Design { reason: String, residual: f64 },
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("range error: {value} outside [{min}, {max}]")]
    Range { value: f64, min: f64, max: f64 },
    #[error("grid error: {0}")]
    Grid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("fit rejected: {0}")]
    Fit(String),
    #[error("calibration failed: {reason} (best residual {residual})")]
    Calibration { reason: String, residual: f64 },
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("unstable transfer function: {0}")]
    Unstable(String),
    #[error("identification failed: {0}")]
    Identification(String),
    #[error("closed loop diverged with gains {gains}: |y| = {magnitude:.3e} at t = {t:.3} s")]
    Instability { gains: String, magnitude: f64, t: f64 },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for input-side errors (bad config, CSV or schedule).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse { .. }
                | Error::Grid(_)
                | Error::InsufficientData { .. }
                | Error::Io(_)
        )
    }
}

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} is not finite ({v})")))
    }
}
