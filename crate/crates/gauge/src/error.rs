use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaugeError {
    #[error("matrix size N must be at least 2, got {0}")]
    SmallN(usize),
    #[error("box must have extent ≥ 2 along each of its {0} axes")]
    BadBox(usize),
    #[error("edge {0} is outside the region")]
    EdgeOutside(String),
    #[error("region too small: plaquette {0} is not inside the box")]
    RegionTooSmall(String),
    #[error("insufficient samples for batching: {samples} samples, batch length {batch}")]
    InsufficientSamples { samples: usize, batch: usize },
    #[error("the finite-N loop equation is implemented for SU(N) only")]
    NeedsSu,
    #[error("dimension mismatch: loops in d={loops}, region in d={region}")]
    Dimension { loops: usize, region: usize },
    #[error("bad config: {0}")]
    Config(String),
    #[error(transparent)]
    Op(#[from] lstring_core::OpError),
}
