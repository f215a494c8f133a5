use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit reports. The `E_*` code is stable and part of
/// the machine-readable output.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("E_PARSE: {0}")]
    Parse(String),

    #[error("E_DISJOINT: state `{0}` is declared in both the source and the target language")]
    Disjoint(String),

    #[error("E_UNKNOWN_STATE: unknown state `{state}` in {context}")]
    UnknownState { state: String, context: String },

    #[error("E_PARTIAL_ENCODING: source state `{0}` has no translation")]
    PartialEncoding(String),

    #[error("E_PRECONDITION: {0}")]
    Precondition(String),

    #[error("E_UNKNOWN_LEMMA: `{0}` is not in the lemma catalogue")]
    UnknownLemma(String),

    #[error("E_UNKNOWN_FIXTURE: `{0}` (expected fig1, fig2 or fig3)")]
    UnknownFixture(String),

    #[error("E_TOO_LARGE: {states} states exceed the enumeration bound of {limit}")]
    TooLarge { states: usize, limit: usize },

    #[error("E_USAGE: {0}")]
    Usage(String),

    #[error("E_IO: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "E_PARSE",
            Error::Disjoint(_) => "E_DISJOINT",
            Error::UnknownState { .. } => "E_UNKNOWN_STATE",
            Error::PartialEncoding(_) => "E_PARTIAL_ENCODING",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::UnknownLemma(_) => "E_UNKNOWN_LEMMA",
            Error::UnknownFixture(_) => "E_UNKNOWN_FIXTURE",
            Error::TooLarge { .. } => "E_TOO_LARGE",
            Error::Usage(_) => "E_USAGE",
            Error::Io(_) => "E_IO",
        }
    }

    pub(crate) fn unknown_state(state: impl Into<String>, context: impl Into<String>) -> Self {
        Error::UnknownState { state: state.into(), context: context.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
