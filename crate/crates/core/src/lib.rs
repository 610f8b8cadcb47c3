//! Geometric multiscale analysis on periodic grids.

pub mod error;
pub mod fit;
pub mod acceptance;
pub mod betascan;
pub mod cli;
pub mod curvelet;
pub mod dirframe;
pub mod estimate;
pub mod frame;
pub mod grid;
pub mod ridgelet;
pub mod wavelet;

pub use error::{Error, Result};
