use crate::arith::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate deformation parameter q = {0}: q must stay away from +1 and -1")]
    DegenerateQ(Scalar),
    #[error("|q| = 1 is not supported (generic q required), got q = {0}")]
    UnitModulusQ(Scalar),
    #[error("theta series does not converge for |p| = {0} (need |p| < 1)")]
    NonConvergent(f64),
    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
    #[error("eta must be -1, 0 or 1, got {0}")]
    InvalidEta(i64),
    #[error("invalid spin `{0}`: expected a nonnegative integer or half-integer such as `3/2`")]
    InvalidSpin(String),
    #[error("casimir inversion hit a double root at c = {0}")]
    DoubleRoot(Scalar),
    #[error("casimir inversion at c = {0} has roots of unit modulus; branch is ambiguous")]
    AmbiguousBranch(Scalar),
    #[error("resonant coefficient at k = {k}: q^k and q^-k coincide")]
    Resonance { k: i64 },
    #[error("coefficient table line {line}: {message}")]
    CoefficientTable { line: usize, message: String },
    #[error("tensor factors disagree on {0}")]
    ParameterMismatch(&'static str),
    #[error("eigenvalue {value} in weight block M = {block} matches no coupled casimir value")]
    EigenvalueIdentification { block: String, value: Scalar },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
