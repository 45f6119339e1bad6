use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::Embedding2D;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffResult<T> {
    /// Largest distance from a point of the first set to its nearest point in the second.
    pub directed_12: T,
    pub directed_21: T,
    pub symmetric: T,
    /// Diagonal of the bounding box of the union of both sets.
    pub diagonal: T,
    /// `symmetric / diagonal`, in `[0, 1]`; zero when the union is a single point.
    pub normalized: T,
}

/// Work size (pairs) above which the outer loop is split across threads.
const PARALLEL_PAIRS: usize = 1 << 16;

#[inline]
fn sq_dist<T: Real>(a: &[T; 2], b: &[T; 2]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn nearest_sq<T: Real>(p: &[T; 2], set: &[[T; 2]]) -> T {
    set.iter().map(|q| sq_dist(p, q)).fold(T::infinity(), T::min)
}

/// `max_{a in from} min_{b in to} |a - b|`, by exhaustive search.
pub fn directed_hausdorff<T: Real>(from: &Embedding2D<T>, to: &Embedding2D<T>) -> Result<T> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let (a, b) = (from.points(), to.points());
    // sqrt is monotone and correctly rounded, so taking it after the
    // max-min gives the same value as taking it per pair.
    let worst = if a.len() * b.len() >= PARALLEL_PAIRS {
        a.par_iter().map(|p| nearest_sq(p, b)).reduce(T::zero, T::max)
    } else {
        a.iter().map(|p| nearest_sq(p, b)).fold(T::zero(), T::max)
    };
    Ok(worst.sqrt())
}

/// Diagonal length of the axis-aligned bounding box of `a ∪ b`.
pub fn union_diagonal<T: Real>(a: &Embedding2D<T>, b: &Embedding2D<T>) -> T {
    let mut lo = [T::infinity(); 2];
    let mut hi = [T::neg_infinity(); 2];
    for p in a.points().iter().chain(b.points()) {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let w = hi[0] - lo[0];
    let h = hi[1] - lo[1];
    (w * w + h * h).sqrt()
}

pub fn hausdorff<T: Real>(e1: &Embedding2D<T>, e2: &Embedding2D<T>) -> Result<HausdorffResult<T>> {
    let directed_12 = directed_hausdorff(e1, e2)?;
    let directed_21 = directed_hausdorff(e2, e1)?;
    let symmetric = directed_12.max(directed_21);
    let diagonal = union_diagonal(e1, e2);
    let normalized = if diagonal > T::zero() { (symmetric / diagonal).min(T::one()) } else { T::zero() };
    Ok(HausdorffResult { directed_12, directed_21, symmetric, diagonal, normalized })
}
