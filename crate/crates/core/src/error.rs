use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty word")]
    EmptyWord,
    #[error("unknown character {0:?} at position {1}")]
    UnknownCharacter(char, usize),
    #[error("word mixes the xyz and abc alphabets")]
    MixedAlphabet,
    #[error("word has odd length {0} and is not an element of G")]
    OddLength(usize),
    #[error("word is not reduced")]
    NotReduced,
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("word is a proper power")]
    Imprimitive,
    #[error("word is too short (length {0}, need at least 4 letters)")]
    TooShort(usize),
    #[error("{0} is not a run of the word")]
    NotARun(String),
    #[error("run of length {0} cannot be contracted (need at least 3)")]
    RunTooShort(usize),
    #[error("word has equal adjacent letters; chord undefined")]
    RepeatedLetter,
    #[error("matrix is not hyperbolic (trace {0})")]
    NotHyperbolic(i64),
    #[error("coset count did not stabilize up to radius {0}")]
    Unstable(usize),
    #[error("odd number of linked cosets: {0}")]
    OddCosetCount(u64),
    #[error("closed form available only for defect -1, 0 or 1, got {0}")]
    UnsupportedDefect(i64),
    #[error("polynomial for defect {delta} disagrees with the motif formula at L = {length}")]
    PolynomialMismatch { delta: i64, length: i64 },
    #[error("requested limit {requested} exceeds the cap {cap} for {what}")]
    LimitExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("malformed cache record {0:?}")]
    BadRecord(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
