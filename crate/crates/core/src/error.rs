use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{func}: argument outside domain ({msg})")]
    Domain { func: &'static str, msg: String },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergent { what: String, iterations: usize },

    #[error("family `{0}` has no closed-form weight function")]
    UnsupportedWeight(String),

    #[error("family `{0}` has no tabulated growth exponents; estimate them with the growth module")]
    MissingExponents(String),

    #[error("inner product between functions of different families (`{0}` vs `{1}`)")]
    FamilyMismatch(String, String),

    #[error("Fock truncation {given} leaves tail mass {tail_mass:e}; at least {required} amplitudes are required")]
    TruncationTooSmall {
        given: usize,
        required: usize,
        tail_mass: f64,
    },

    #[error("sequence of {len} points only reaches modulus {reach}; radius {radius} needs at least {required} points")]
    InsufficientLength {
        len: usize,
        reach: f64,
        radius: f64,
        required: usize,
    },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error in `{input}` at position {position}: {msg}")]
    Parse {
        input: String,
        position: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }

    /// True for errors caused by malformed user input rather than a
    /// violated numerical contract.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::InvalidInput(_) | Error::Io(_)
        )
    }
}
