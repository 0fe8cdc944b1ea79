use thiserror::Error;

/// Errors raised while building or evaluating derated comb decimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// N = 0: b_0 is unbounded and the derating filter collapses to `z^-1`.
    #[error("order 0 is degenerate: the derating filter is the pure delay z^-1")]
    Degenerate,
    #[error("order {0} out of validity range (N < 12)")]
    InvalidOrder(u32),
    #[error("decimation factor {0} must be at least 2")]
    InvalidDecimation(u32),
    #[error("post-decimation factor {0} must be at least 2")]
    InvalidPostDecimation(u32),
    #[error("input width must be at least 1 bit, got {0}")]
    InvalidInputBits(u32),
    #[error("sample {value} at index {index} does not fit in {bits} bits")]
    SampleOutOfRange {
        index: usize,
        value: i128,
        bits: u32,
    },
    #[error("register width of {0} bits exceeds the 128-bit register limit")]
    WordLengthTooWide(u32),
    #[error("branches of orders {first} and {second} cannot be delay-aligned for M = {decim}")]
    Misaligned { first: u32, second: u32, decim: u32 },
    #[error("cascade preset needs order >= 2, got {0}")]
    CascadeOrder(u32),
    #[error("empty filter structure or sweep")]
    Empty,
    #[error("probe frequency {0} rad is at or above the input Nyquist limit")]
    ProbeAboveNyquist(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
