//! Cross-manifold embedding analysis.
//!
//! Fit a two-dimensional manifold embedding on one set of feature vectors,
//! project a second set onto it, and quantify how much the two projections
//! overlap: Hausdorff distance, Procrustes disparity, and bottleneck distance
//! between Vietoris–Rips persistence diagrams. The `stats` module relates
//! overlap to attack success.
//!
//! Geometry, topology and statistics are generic over [`Real`] (`f32` or
//! `f64`); the aliases below fix the scalar to `f64`, which is what the
//! embedding code produces.

pub mod data;
pub mod embed;
mod embedding;
pub mod error;
pub mod geometry;
pub mod knn;
mod scalar;
pub mod stats;
pub mod topology;

pub use data::{zero_pad, FeatureMatrix, PadMode, PaddingPolicy};
pub use embedding::Embedding2D;
pub use error::{Error, ErrorClass, Result};
pub use knn::{KnnGraph, Metric};
pub use scalar::Real;

pub type Embedding = Embedding2D<f64>;
pub type Embedding32 = Embedding2D<f32>;
pub type Hausdorff = geometry::HausdorffResult<f64>;
pub type Procrustes = geometry::ProcrustesResult<f64>;
pub type Diagram = topology::PersistenceDiagram<f64>;
pub type Correlation = stats::CorrelationReport<f64>;
