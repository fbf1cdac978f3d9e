use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A point left the function's domain of definition, or a
    /// sub-expression was evaluated at an invalid argument.
    #[error("domain error at t = {t}: {reason}")]
    Domain { t: f64, reason: String },

    /// Malformed function text.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// Requested jet order exceeds the supported cap.
    #[error("jet order {requested} exceeds cap {cap}")]
    OrderCap { requested: usize, cap: usize },

    /// A structural precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The perturbing function is not strictly convex of the required order
    /// at the base point.
    #[error("invalid perturber: {0}")]
    InvalidPerturber(String),

    /// Even the smallest sampled perturbation produced a negative minor.
    #[error("no positive perturbation window at t0 = {t0} (minor D_{minor} = {value:e} at eps = {eps:e})")]
    NoPositiveWindow {
        t0: f64,
        minor: usize,
        value: f64,
        eps: f64,
    },

    /// A matrix argument has an eigenvalue outside the function's domain.
    #[error("spectrum outside domain: eigenvalue {eigenvalue} not interior to [{lo}, {hi}]")]
    SpectrumOutOfDomain { eigenvalue: f64, lo: f64, hi: f64 },

    /// The pair (A, B) does not satisfy A <= B.
    #[error("matrices not comparable: min eigenvalue of B - A is {min_eigenvalue:e}")]
    NotComparable { min_eigenvalue: f64 },

    /// Random matrix sampling needs a bounded spectrum window.
    #[error("unbounded interval: no truncation window configured")]
    UnboundedInterval,

    /// A randomized search ran out of budget.
    #[error("search exhausted after {attempts} attempts: {diagnostics}")]
    SearchExhausted { attempts: usize, diagnostics: String },

    /// f' (resp. f'') was not positive where a representation function
    /// requires it; this itself refutes 2-monotonicity (resp. 2-convexity).
    #[error("positivity failure at t = {t}: {what} = {value:e} is not positive")]
    Positivity { t: f64, what: String, value: f64 },

    /// Precondition of the antiderivative remark: f must pass the order-2
    /// monotonicity grid first.
    #[error("not 2-monotone: grid test failed at t = {t}")]
    NotMonotone { t: f64 },

    /// A theorem hypothesis on the domain shape is not met.
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
