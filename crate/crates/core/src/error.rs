use crate::{Complex, Scalar};

/// Failure modes shared by every module.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("|z| = {modulus} exceeds the overflow guard on the growing side")]
    OverflowGuard { modulus: Scalar },
    #[error("{what} did not converge in {iterations} iterations")]
    ConvergenceFailure { what: &'static str, iterations: usize },
    #[error("branch tracking of the phase correction failed at u = {u}")]
    BranchAmbiguity { u: Scalar },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("evaluation budget exceeded (partial value {value}, error bound {error:e})")]
    BudgetExceeded { value: Complex, error: Scalar },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("mode index {k} outside table of size {size}")]
    IndexOutOfTable { k: usize, size: usize },
    #[error("normalization mismatch for mode {k}: identity {identity}, quadrature {quadrature}")]
    NormalizationMismatch { k: usize, identity: Scalar, quadrature: Scalar },
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("root tracking failed: {0}")]
    RootTrackingFailure(String),
    #[error("wavefront slice is empty")]
    EmptySlice,
    #[error("classification ambiguous: {0}")]
    ClassificationAmbiguous(String),
    #[error("no local maximum within 15% of t_{n} = {t_pred}")]
    PeakNotFound { n: usize, t_pred: Scalar },
    #[error("localization violated: {0}")]
    LocalizationViolated(String),
    #[error("inadmissible exponent pair: {0}")]
    AdmissibilityViolated(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by invalid configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::PreconditionViolated(_)
                | Error::RegimeViolation(_)
                | Error::DomainViolation(_)
                | Error::AdmissibilityViolated(_)
                | Error::LocalizationViolated(_)
                | Error::IndexOutOfTable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
