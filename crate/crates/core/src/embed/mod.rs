//! Manifold embedding of feature vectors into the plane, and projection of
//! further feature vectors onto a fitted embedding.
//!
//! The construction is nearest-neighbor based: exact kNN, per-point distance
//! calibration, a fuzzy union of the directed neighbor graph, and an SGD
//! layout with negative sampling under the kernel `1 / (1 + a d^(2b))`.

mod calibrate;
mod curve;
mod graph;
mod layout;
mod model;
mod params;
mod spectral;
pub mod xmem;

pub use calibrate::{membership, smooth_knn_calibrate, SIGMA_MAX, SIGMA_MIN};
pub use curve::{curve_objective, fit_curve};
pub use graph::{fuzzy_union, FuzzyGraph};
pub use model::{fit, EmbeddingModel, Projection, ORPHAN_WEIGHT};
pub use params::{EmbedParams, Init};
pub use spectral::spectral_layout;
pub use xmem::{read_model, write_model};
