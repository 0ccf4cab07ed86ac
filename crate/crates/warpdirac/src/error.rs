use thiserror::Error;

/// Error type shared across the crate.
///
/// Hypothesis violations (inputs outside the range an estimate is stated
/// for) are kept distinct from conclusion violations (a verified inequality
/// failing, which would indicate a bug) and from plain numerical failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("step size underflow at x = {x:.6e} (h = {h:.3e}); system too stiff for the tolerance")]
    StepSizeUnderflow { x: f64, h: f64 },

    #[error("step budget exhausted after {steps} steps at x = {x:.6e}")]
    StepBudgetExhausted { steps: usize, x: f64 },

    #[error("profile evaluation failed: {0}")]
    ProfileEvaluation(String),

    #[error("interval [{lo:.6e}, {hi:.6e}] outside trajectory coverage [{cov_lo:.6e}, {cov_hi:.6e}]")]
    IntervalOutsideCoverage {
        lo: f64,
        hi: f64,
        cov_lo: f64,
        cov_hi: f64,
    },

    #[error("eigenvalue {value:.12e} collides with window endpoint ±{edge:.6e}")]
    WindowEdgeCollision { value: f64, edge: f64 },

    #[error("mode cutoff failed: {0}")]
    ModeCutoff(String),

    #[error("no crossing guaranteed: signed eigenvalue counts do not change balance ({at_a} at left endpoint, {at_b} at right)")]
    NoCrossingGuaranteed { at_a: i64, at_b: i64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
