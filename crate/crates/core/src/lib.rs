//! Chebyshev polynomials, non-backtracking path identities and fluctuations
//! of linear statistics for overlapping random matrices.

pub mod chebyshev;
pub mod combinatorics;
pub mod ensembles;
pub mod error;
pub mod matrix;
pub mod nbt_paths;
pub mod statistics;

pub use chebyshev::{ChebSeries, Poly};
pub use ensembles::{
    DenseMatrix, DiagonalSpec, EntryDistribution, Geometry, MatrixPair, Normalization, RectOverlapSpec, Side,
    WignerOverlapSpec,
};
pub use error::{Error, Result};
pub use matrix::HermitianMatrix;
pub use nbt_paths::{BipartitePhasedGraph, Identity, IdentityCheck, Path, PhaseModel, PhasedGraph};
pub use statistics::{
    CovarianceRow, EntryMoments, Gaussianity, MCReport, Ratios, SmoothFunction, StatisticRequest, StatisticSummary,
    Target, TestFunction,
};

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
