use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid L-function data: {0}")]
    InvalidData(String),

    #[error("invalid precision: {0}")]
    InvalidPrecision(String),

    #[error("gamma factor has a pole at s - {nu} = {at}")]
    PoleOfGamma { nu: usize, at: String },

    #[error("insufficient coefficients: need about {required}, have {available}")]
    InsufficientCoefficients { required: usize, available: usize },

    #[error("quadrature did not converge: {0}")]
    NonconvergentQuadrature(String),

    #[error("argument outside the region of absolute convergence: {0}")]
    OutsideConvergence(String),

    #[error("missing special value at s = {0}")]
    MissingSpecialValue(i64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("prime {p} exceeds point-counting bound {bound}")]
    CountingBound { p: u64, bound: u64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("division by a quantity indistinguishable from zero: {0}")]
    DivisionByZero(String),

    #[error("degenerate polynomial: {0}")]
    Degenerate(String),

    #[error("root finding did not converge after {iterations} iterations")]
    RootNonConvergence { iterations: usize },

    #[error("term budget exceeded: {0}")]
    TailBudget(String),

    #[error("cannot certify zero count: {0}")]
    CannotCertify(String),

    #[error("deflation failed: {0}")]
    Deflation(String),

    #[error("closed form matches the transform under no convention: {0}")]
    ConventionMismatch(String),

    #[error("data contradicts a structural prediction: {0}")]
    DataError(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
