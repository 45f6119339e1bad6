//! Global overlap measures between two planar point sets.

mod hausdorff;
mod procrustes;

pub use hausdorff::{directed_hausdorff, hausdorff, union_diagonal, HausdorffResult};
pub use procrustes::{procrustes, ProcrustesResult};
