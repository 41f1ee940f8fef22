use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or missing configuration field, reported with its dotted path.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// A documented parameter invariant does not hold.
    #[error("invariant violated ({name}): {detail}")]
    Invariant { name: String, detail: String },

    #[error("capacitance matrix is ill-conditioned (condition number ~{condition:.3e})")]
    Conditioning { condition: f64 },

    #[error("operator is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NonHermitian { max_asymmetry: f64 },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("time step too large: 2*pi*|H|*dt = {phase:.3e} (limit {limit})")]
    StepSize { phase: f64, limit: f64 },

    #[error("dispersive formulas are invalid at resonance: |Delta_{mode}| = {delta_ghz:.3e} GHz")]
    Resonance { mode: usize, delta_ghz: f64 },

    #[error("no zero crossing of the effective coupling in [{lo}, {hi}] GHz; {summary}")]
    ZeroNotFound { lo: f64, hi: f64, summary: String },

    #[error("Fock truncation too small: N = {n}, need at least {suggested}")]
    Truncation { n: usize, suggested: usize },

    #[error("unphysical coherence times: {0}")]
    Physicality(String),

    #[error("unstable potential minimum: c2 = {c2:.6}")]
    UnstableMinimum { c2: f64 },

    #[error("Kerr coefficient {target_mhz} MHz is unreachable; flux scan covers [{min_mhz:.3}, {max_mhz:.3}] MHz")]
    UnreachableKerr {
        target_mhz: f64,
        min_mhz: f64,
        max_mhz: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invariant(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Invariant {
            name: name.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Invariant { .. } | Error::Physicality(_) => 1,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{other:?}"),
            )),
        }
    }
}
