use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol `{0}` is not in the alphabet")]
    SymbolNotInAlphabet(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("malformed class atom: {0}")]
    MalformedClassAtom(String),
    #[error("unknown monoid `{0}`")]
    UnknownMonoid(String),
    #[error("element {0} is not in the monoid")]
    ElementNotInMonoid(usize),
    #[error("monoid `{0}` is not aperiodic")]
    NotAperiodic(String),
    #[error("input is not normalized: {0}")]
    NonNormalized(String),
    #[error("label conflict at copy {copy}, position {position}: {first} and {second}")]
    LabelConflict {
        copy: String,
        position: usize,
        first: String,
        second: String,
    },
    #[error("determinism violation: {0}")]
    DeterminismViolation(String),
    #[error("direction ambiguity: {0}")]
    DirectionAmbiguity(String),
    #[error("too many look-around tests: {found} exceeds the cap of {cap}")]
    TooManyTests { found: usize, cap: usize },
    #[error("compiled formula is not counter-free: {0}")]
    NonAperiodicCompilation(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("incompatible alphabets: {0}")]
    IncompatibleAlphabets(String),
    #[error("{0}")]
    Io(String),
    #[error("`{0}` artifacts do not denote word functions")]
    NotAFunction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
