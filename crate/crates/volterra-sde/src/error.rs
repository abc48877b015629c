use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {arg} outside tabulated range [{lo}, {hi}]")]
    Range { arg: f64, lo: f64, hi: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("resolvent-set violation: n = {n} must exceed eigenvalue {lambda}")]
    ResolventSet { n: u64, lambda: f64 },

    #[error("singular step at j = {step} (t = {t}): |1 - lambda*w| = {pivot:.3e}; refine the grid")]
    SingularStep { step: usize, t: f64, pivot: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("in mode {mode}: {source}")]
    Mode {
        mode: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_mode(self, mode: usize) -> Error {
        Error::Mode {
            mode,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
