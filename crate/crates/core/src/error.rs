use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptySupport,
    /// Values and probabilities have different lengths.
    LengthMismatch {
        values: usize,
        probs: usize,
    },
    InvalidProbability(f64),
    ProbSumNotOne(f64),
    DuplicateValue(f64),
    NonFiniteValue,
    NoCoordinates,
    TooManyCoordinates(usize),
    SpaceTooLarge {
        outcomes: u128,
        cap: usize,
    },
    SpaceTooLargeForFullDecomposition {
        entries: u128,
        budget: usize,
    },
    SubsetOutOfRange {
        mask: u64,
        coords: usize,
    },
    CoordinateOutOfRange {
        k: usize,
        coords: usize,
    },
    TableLength {
        expected: usize,
        got: usize,
    },
    SpaceMismatch,
    NotCentered(f64),
    NotNormalized(f64),
    NotDegenerate {
        order: usize,
    },
    NotTwoPoint {
        k: usize,
    },
    OutOfRange(f64),
    BadColors(usize),
    EmptyGraph,
    DegenerateN,
    InvalidSpec(String),
    InvalidParameter(String),
    TooFewSamples(usize),
    ParseError {
        line: usize,
        message: String,
    },
    SelfLoop {
        line: usize,
    },
    DuplicateEdge {
        line: usize,
    },
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySupport => "EmptySupport",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidProbability(_) => "InvalidProbability",
            Error::ProbSumNotOne(_) => "ProbSumNotOne",
            Error::DuplicateValue(_) => "DuplicateValue",
            Error::NonFiniteValue => "NonFiniteValue",
            Error::NoCoordinates => "NoCoordinates",
            Error::TooManyCoordinates(_) => "TooManyCoordinates",
            Error::SpaceTooLarge { .. } => "SpaceTooLarge",
            Error::SpaceTooLargeForFullDecomposition { .. } => "SpaceTooLargeForFullDecomposition",
            Error::SubsetOutOfRange { .. } => "SubsetOutOfRange",
            Error::CoordinateOutOfRange { .. } => "CoordinateOutOfRange",
            Error::TableLength { .. } => "TableLength",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::NotCentered(_) => "NotCentered",
            Error::NotNormalized(_) => "NotNormalized",
            Error::NotDegenerate { .. } => "NotDegenerate",
            Error::NotTwoPoint { .. } => "NotTwoPoint",
            Error::OutOfRange(_) => "OutOfRange",
            Error::BadColors(_) => "BadColors",
            Error::EmptyGraph => "EmptyGraph",
            Error::DegenerateN => "DegenerateN",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::TooFewSamples(_) => "TooFewSamples",
            Error::ParseError { .. } => "ParseError",
            Error::SelfLoop { .. } => "SelfLoop",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySupport => write!(f, "distribution has empty support"),
            Error::LengthMismatch { values, probs } => {
                write!(f, "{values} values but {probs} probabilities")
            }
            Error::InvalidProbability(p) => write!(f, "probability {p} is not in (0, 1]"),
            Error::ProbSumNotOne(s) => write!(f, "probabilities sum to {s}, not 1"),
            Error::DuplicateValue(v) => write!(f, "support value {v} appears twice"),
            Error::NonFiniteValue => write!(f, "non-finite value"),
            Error::NoCoordinates => write!(f, "product space needs at least one coordinate"),
            Error::TooManyCoordinates(n) => write!(f, "{n} coordinates exceed the limit of 63"),
            Error::SpaceTooLarge { outcomes, cap } => {
                write!(f, "{outcomes} outcomes exceed the cap of {cap}")
            }
            Error::SpaceTooLargeForFullDecomposition { entries, budget } => {
                write!(f, "full decomposition needs {entries} table entries, budget is {budget}")
            }
            Error::SubsetOutOfRange { mask, coords } => {
                write!(f, "subset {mask:#x} is not within {coords} coordinates")
            }
            Error::CoordinateOutOfRange { k, coords } => {
                write!(f, "coordinate {k} out of range for {coords} coordinates")
            }
            Error::TableLength { expected, got } => {
                write!(f, "table has {got} entries, expected {expected}")
            }
            Error::SpaceMismatch => write!(f, "functionals live on different spaces"),
            Error::NotCentered(m) => write!(f, "functional has mean {m}, expected 0"),
            Error::NotNormalized(s) => write!(f, "functional has second moment {s}, expected 1"),
            Error::NotDegenerate { order } => {
                write!(f, "functional is not a degenerate U-statistic of order {order}")
            }
            Error::NotTwoPoint { k } => write!(f, "coordinate {k} is not a ±1 variable"),
            Error::OutOfRange(x) => write!(f, "argument {x} out of range"),
            Error::BadColors(c) => write!(f, "need at least 2 colors, got {c}"),
            Error::EmptyGraph => write!(f, "graph has no edges"),
            Error::DegenerateN => write!(f, "random index has zero mean"),
            Error::InvalidSpec(m) => write!(f, "invalid spec: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::TooFewSamples(n) => write!(f, "{n} samples, need at least 100"),
            Error::ParseError { line, message } => write!(f, "line {line}: {message}"),
            Error::SelfLoop { line } => write!(f, "line {line}: self-loop"),
            Error::DuplicateEdge { line } => write!(f, "line {line}: duplicate edge"),
        }
    }
}

impl core::error::Error for Error {}
