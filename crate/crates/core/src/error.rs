use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("free flight of length {length} from ({x}, {y}) exceeds the free-path bound {bound}")]
    HorizonViolated { x: f64, y: f64, length: f64, bound: f64 },

    #[error("grazing collision with obstacle {obstacle} (cos phi = {cos_phi:e})")]
    GrazingCollision { obstacle: usize, cos_phi: f64 },

    #[error("infinite horizon suspected: {0}")]
    InfiniteHorizonSuspected(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("target balls {0} and {1} overlap at the requested scale")]
    OverlappingTargets(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate cells: {0}")]
    DegenerateCells(String),

    #[error("all counts are zero")]
    ZeroMean,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
