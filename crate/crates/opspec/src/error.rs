//! Error type shared by every module of the crate.

/// Failure modes of the numeric pipeline.
///
/// Validation problems (bad kernel parameters, malformed input) are reported
/// as data by the `validate` methods instead; this enum covers conditions
/// detected while computing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// All polynomial coefficients are zero; roots are undefined.
    #[error("zero polynomial has no well-defined root set")]
    ZeroPolynomial,

    /// A scalar function was not finite anywhere it was sampled, or an
    /// argument left the mathematical domain of an operation.
    #[error("domain error: {0}")]
    DomainError(String),

    /// The quadratic form of a Gaussian integrand is numerically singular:
    /// `|det M|` fell below `2^-(P/2) * ||M||^n`.
    #[error("singular quadratic form: determinant below tolerance")]
    SingularForm,

    /// A Gaussian integral diverges: the real part of its quadratic form is
    /// not positive definite.
    #[error("divergent Gaussian integral: quadratic form not positive definite")]
    Divergent,

    /// The polynomial prefactor degree exceeds the integral engine cap.
    #[error("polynomial degree {degree} exceeds the engine cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    /// A moment sequence is too short for the requested order.
    #[error("moment sequence holds orders 1..={have}, but order {need} is required")]
    InsufficientMoments { have: usize, need: usize },

    /// The 1-norm budget `c` fails `|e_k| <= c^k/k!`, so it is not a valid
    /// upper bound for the operator 1-norm.
    #[error("1-norm budget violated at k = {k}: |e_k| > c^k/k!")]
    BoundViolated { k: usize },

    /// The decomposition parameter `w` lies outside the allowed intervals
    /// `(0, min(A,C))` and `(max(A,C), inf)`.
    #[error("decomposition parameter w = {w} outside the allowed intervals")]
    DisallowedW { w: String },

    /// The radicand of the factor normalization is negative. Cannot happen
    /// for `w` inside the allowed intervals; checked anyway.
    #[error("negative radicand in factor kernel normalization")]
    NegativeRadicand,

    /// The linear system matching polynomial prefactor coefficients in a
    /// decomposition is rank-deficient at tolerance `2^-(P/2)`.
    #[error("prefactor matching system is rank-deficient")]
    SingularSystem,

    /// The discretized kernel matrix is not symmetric to tolerance; this
    /// signals a kernel that is not self-adjoint (or a bug upstream).
    #[error("discretized kernel matrix asymmetric: residual {residual}")]
    NonHermitianResidual { residual: String },

    /// Hausdorff distance of an empty set is undefined.
    #[error("Hausdorff distance requires non-empty sets")]
    EmptySet,
}
