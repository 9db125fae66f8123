use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::model::Regime;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One violated condition of a chain specification. Sites are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecViolation {
    NoSites,
    SiteCountMismatch { declared: usize, spins: usize, inhom: usize },
    InvalidSpin { site: usize, label: String },
    ZeroEta,
    NonFinite,
    /// `eta_a − eta_b` is (numerically) an integer multiple of `eta`.
    SovCondition { a: usize, b: usize, multiple: i64 },
    RegimeMismatch { declared: Regime, reason: &'static str },
    UnknownRegime(String),
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoSites => write!(f, "chain needs at least one site"),
            Self::SiteCountMismatch { declared, spins, inhom } => write!(
                f,
                "N = {declared} but {spins} spins and {inhom} inhomogeneities were given"
            ),
            Self::InvalidSpin { site, label } => {
                write!(f, "site {site}: spin {label:?} is not a positive half-integer")
            }
            Self::ZeroEta => write!(f, "eta must be nonzero"),
            Self::NonFinite => write!(f, "parameters must be finite"),
            Self::SovCondition { a, b, multiple } => write!(
                f,
                "separation condition violated by sites ({a},{b}): eta_{a} - eta_{b} = {multiple}*eta"
            ),
            Self::RegimeMismatch { declared, reason } => {
                write!(f, "declared regime {declared} invalid: {reason}")
            }
            Self::UnknownRegime(s) => write!(f, "unknown regime {s:?}"),
        }
    }
}

fn join(v: &[SpecViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("interpolation nodes {0} and {1} coincide")]
    DegenerateNodes(usize, usize),
    #[error("invalid chain specification: {}", join(.0))]
    InvalidSpec(Vec<SpecViolation>),
    #[error("site {site} out of range 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("fusion label 2s = {0} is not a nonnegative integer")]
    InvalidFusion(f64),
    #[error("twist matrix is singular")]
    SingularTwist,
    #[error("matrix is numerically singular (condition number {cond:.3e})")]
    Singular { cond: f64 },
    #[error("transfer factor at site {site} (eta_k = {point}) is singular (condition number {cond:.3e})")]
    SingularFactor { site: usize, point: Complex64, cond: f64 },
    #[error("{0} regime has no Hermitian evaluation point")]
    RegimeUnsupported(Regime),
    #[error("spectrum not simple after {attempts} attempts (smallest gap {gap:.3e})")]
    SimpleSpectrum { attempts: usize, gap: f64 },
    #[error("closure residual {residual:.3e} at site {site} exceeds tolerance; not an eigenvalue")]
    InconsistentEigenvalue { site: usize, residual: f64 },
    #[error("eigenstate residual {residual:.3e} exceeds tolerance (worst component at h = {worst_h:?})")]
    Assembly { residual: f64, worst_h: Vec<usize> },
    #[error("Newton iteration did not converge (residual trace {trace:?})")]
    Convergence { trace: Vec<f64> },
    #[error("orthogonality witness needs two distinct eigenvalues")]
    DegenerateWitness,
    #[error("fused eigenvalue vanishes at {point}")]
    Pole { point: Complex64 },
    #[error("eigenstate norm vanishes")]
    DegenerateNorm,
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the input rather than by the numerics.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::SiteOutOfRange { .. }
                | Error::InvalidFusion(_)
                | Error::SingularTwist
                | Error::RegimeUnsupported(_)
                | Error::Config(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
