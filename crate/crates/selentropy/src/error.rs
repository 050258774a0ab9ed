use thiserror::Error;

/// Errors for state construction, linear algebra and bound evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("unknown subsystem label `{0}`")]
    Layout(String),

    #[error("operator is not Hermitian (deviation {dev:.3e} exceeds {tol:.3e})")]
    NotHermitian { dev: f64, tol: f64 },

    #[error("operator is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace {0:.6} outside (0, 1]")]
    BadTrace(f64),

    #[error("state is not pure within tolerance (secondary eigenvalue {0:.3e})")]
    Rank(f64),

    #[error("scalar function undefined at support eigenvalue {0:.6e}")]
    Domain(f64),

    #[error("Kraus operators exceed trace preservation ({0:.3e} above identity)")]
    Channel(f64),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("register `{0}` is not classical (off-diagonal norm {1:.3e})")]
    Classicality(String, f64),

    #[error("support of first operator not contained in support of second")]
    Support,

    #[error("candidate measurement does not commute with the setup (deviation {0:.3e})")]
    Commutation(f64),

    #[error("parameter point below validity threshold: need n >= {threshold}, got {n}")]
    Validity { threshold: u64, n: u64 },

    #[error("POVM elements do not sum to identity (deviation {0:.3e})")]
    Povm(f64),

    #[error("measurement is not projective (deviation {0:.3e})")]
    Projective(f64),

    #[error("SDP solver failed: {0}")]
    Sdp(String),

    #[error("simulation size infeasible: {0} work units exceeds {1}")]
    Infeasible(u64, u64),

    #[error("arithmetic on a non-finite entropy value")]
    NonFinite,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
