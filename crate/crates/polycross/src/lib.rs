//! Annulus-crossing machinery for polyline curves and finite curve
//! collections in `R^d`: exact crossing enumeration, the uniform metric on
//! unparametrized curves, the bottleneck metric on curve collections,
//! net-based coarse-graining with certified error bounds, consistent-coupling
//! samplers for finite-support measure sequences, and Monte-Carlo regularity
//! diagnostics (tail estimates, power fits, rate tests, hotspot location).
//!
//! The crate is library-first; each major capability has a runnable example
//! under `examples/`, and a thin `polycross` binary exposes the same
//! operations as subcommands over a JSON curve-file format and CSV reports.

pub mod cli;
pub mod collection_metric;
pub mod coupling;
pub mod crossings;
pub mod curve_metric;
pub mod diagnostics;
pub mod ensembles;
pub mod files;
pub mod geometry;
pub mod nets;

pub use collection_metric::CurveCollection;
pub use geometry::{Annulus, Point, Polyline};

/// Crate-wide error type. Every failure path carries a machine-readable
/// variant and a human message.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch between inputs")]
    DimensionMismatch,
    #[error("non-finite coordinate")]
    NonFiniteCoordinate,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("zero-length segment")]
    ZeroLengthSegment,
    #[error("invalid annulus radii: require 0 < inner < outer, got ({inner}, {outer})")]
    InvalidAnnulus { inner: f64, outer: f64 },
    #[error("trivial path `{id}`: curves must have positive diameter")]
    TrivialPath { id: String },
    #[error("net density violation at time {time}: nearest net point at distance {dist} > {required}")]
    DensityViolation { time: f64, dist: f64, required: f64 },
    #[error("input too large: {0}")]
    InputTooLarge(&'static str),
    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),
    #[error("no crossings observed at subdivision level 0")]
    NoCrossingsObserved,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit-code class used by the CLI: 2 for input validation, 3 for
    /// runtime signals.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DensityViolation { .. }
            | Error::DegenerateFit(_)
            | Error::NoCrossingsObserved
            | Error::Io(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
