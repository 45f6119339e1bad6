//! Vietoris–Rips persistence (H0, H1) of planar point sets and the
//! bottleneck distance between diagrams.

mod bottleneck;
mod rips;

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::scalar::Real;

pub use bottleneck::bottleneck;
pub use rips::{rips_persistence, subsample_indices, RipsParams, DEFAULT_MAX_POINTS};

/// Birth-death pairs of one homology dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceDiagram<T> {
    pub dim: u8,
    /// Finite pairs `(birth, death)`, `death >= birth >= 0`.
    pub pairs: Vec<(T, T)>,
    /// Birth radius of every class still alive at the truncation radius.
    pub essential_births: Vec<T>,
}

impl<T: Real> PersistenceDiagram<T> {
    pub fn new(dim: u8, pairs: Vec<(T, T)>) -> Self {
        Self { dim, pairs, essential_births: Vec::new() }
    }

    pub fn with_essential(mut self, births: Vec<T>) -> Self {
        self.essential_births = births;
        self
    }

    /// Number of never-dying classes.
    pub fn essential(&self) -> usize {
        self.essential_births.len()
    }

    /// Finite plus essential classes.
    pub fn bar_count(&self) -> usize {
        self.pairs.len() + self.essential()
    }

    pub fn is_empty(&self) -> bool {
        self.bar_count() == 0
    }

    /// Largest `death - birth` over the finite pairs.
    pub fn max_persistence(&self) -> T {
        self.pairs.iter().map(|&(b, d)| d - b).fold(T::zero(), T::max)
    }
}

/// Writes `dim,birth,death,essential` rows. Essential classes get an empty death.
pub fn write_diagrams_csv<T: Real, W: Write>(mut out: W, diagrams: &[&PersistenceDiagram<T>]) -> Result<()> {
    let io = |e| crate::error::Error::io("<diagram csv>", e);
    writeln!(out, "dim,birth,death,essential").map_err(io)?;
    for dgm in diagrams {
        for (b, d) in &dgm.pairs {
            writeln!(out, "{},{:?},{:?},0", dgm.dim, b.to_f64_lossy(), d.to_f64_lossy()).map_err(io)?;
        }
        for b in &dgm.essential_births {
            writeln!(out, "{},{:?},,1", dgm.dim, b.to_f64_lossy()).map_err(io)?;
        }
    }
    Ok(())
}
