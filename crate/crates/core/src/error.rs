use thiserror::Error;

/// Errors produced by the qho-core routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid oscillator configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Spectrum enumeration hit its entry budget. `partial` is the number of
    /// lattice points found before giving up.
    #[error("enumeration budget of {limit} entries exceeded (partial count {partial})")]
    CapacityExceeded { limit: u64, partial: u64 },

    #[error("grid of {cells} cells exceeds the cell budget of {limit}")]
    CellBudgetExceeded { cells: u128, limit: u64 },

    #[error("grid specification rejected: {0}")]
    InvalidGrid(String),

    #[error("sampled field is identically zero on the grid")]
    DegenerateField,

    /// Faber-Krahn volume bound for the outermost shell, where the
    /// denominator vanishes.
    #[error("volume lower bound is unbounded for shell index {i} of {m}")]
    UnboundedVolume { i: u64, m: u64 },

    #[error("nodal count result carries no label grid")]
    MissingLabelGrid,

    #[error("malformed label grid dump: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
