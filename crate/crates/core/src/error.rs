use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("tableau is not square: row {row} has {found} symbols, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("symbol {symbol:?} is outside the alphabet of size {size}")]
    SymbolOutOfRange { symbol: String, size: usize },
    #[error("alphabet size must be between 2 and 256, got {0}")]
    InvalidAlphabet(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("not a bijection on an alphabet of size {0}")]
    InvalidBijection(usize),
    #[error("operation requires a binary alphabet, got size {0}")]
    NotBinary(usize),
    #[error("size {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("work estimate {needed} exceeds the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("map {index} fixes the symbol {symbol}")]
    FixedPoint { index: usize, symbol: u8 },
    #[error("duplicate word at position {0}")]
    DuplicateWord(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed json: {0}")]
    Json(String),
}
