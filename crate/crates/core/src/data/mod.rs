//! Feature-vector sets and the on-disk formats they travel in.

mod csv_io;
pub(crate) mod fvec;

pub use csv_io::{read_csv, write_csv};
pub use fvec::{read_fvec, write_fvec, FVEC_MAGIC, FVEC_VERSION};

use crate::error::{Error, Result};

/// An `rows × cols` matrix of feature vectors with optional integer class labels.
///
/// Values are stored row-major as `f32`. A matrix is immutable once built and
/// always satisfies: at least one row and column, every value finite, and a
/// label vector (if any) with one entry per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f32>,
    labels: Option<Vec<u32>>,
    source_tag: String,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f32>) -> Result<Self> {
        Self::with_labels(rows, cols, values, None)
    }

    pub fn with_labels(
        rows: usize,
        cols: usize,
        values: Vec<f32>,
        labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        let m = FeatureMatrix { rows, cols, values, labels, source_tag: String::new() };
        m.validate()?;
        Ok(m)
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(n * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::DimensionMismatch { left: d, right: r.len() });
            }
            values.extend_from_slice(r);
        }
        Self::new(n, d, values)
    }

    pub fn with_source_tag(mut self, tag: impl Into<String>) -> Self {
        self.source_tag = tag.into();
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if self.values.len() != self.rows * self.cols {
            return Err(Error::Truncated(format!(
                "expected {} values, got {}",
                self.rows * self.cols,
                self.values.len()
            )));
        }
        if let Some(pos) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / self.cols, col: pos % self.cols });
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.rows {
                return Err(Error::LabelCount { labels: labels.len(), rows: self.rows });
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    /// Returns the subset of rows at `indices`, labels carried along.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        let labels = self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect());
        Ok(Self::with_labels(indices.len(), self.cols, values, labels)?
            .with_source_tag(self.source_tag.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadMode {
    /// Append zeros after the last existing column.
    #[default]
    ZeroPadTail,
}

/// How feature matrices of different widths are brought to a shared width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaddingPolicy {
    pub target_dim: usize,
    pub mode: PadMode,
}

impl PaddingPolicy {
    pub const DEFAULT_TARGET_DIM: usize = 2048;

    pub fn to_dim(target_dim: usize) -> Self {
        PaddingPolicy { target_dim, mode: PadMode::ZeroPadTail }
    }
}

impl Default for PaddingPolicy {
    fn default() -> Self {
        Self::to_dim(Self::DEFAULT_TARGET_DIM)
    }
}

/// Widens every row of `m` to `policy.target_dim` by appending zeros.
///
/// Rows keep their original leading entries, so pairwise distances between
/// rows of the same source width are unchanged. Narrowing is an error.
pub fn zero_pad(m: &FeatureMatrix, policy: PaddingPolicy) -> Result<FeatureMatrix> {
    let target = policy.target_dim;
    if m.cols > target {
        return Err(Error::PadTooSmall { cols: m.cols, target });
    }
    if m.cols == target {
        return Ok(m.clone());
    }
    let mut values = vec![0.0f32; m.rows * target];
    match policy.mode {
        PadMode::ZeroPadTail => {
            for (dst, src) in values.chunks_exact_mut(target).zip(m.iter_rows()) {
                dst[..m.cols].copy_from_slice(src);
            }
        }
    }
    Ok(FeatureMatrix {
        rows: m.rows,
        cols: target,
        values,
        labels: m.labels.clone(),
        source_tag: m.source_tag.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(a: &[f32], b: &[f32]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (*x as f64 - *y as f64).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn pad_row_to_four() {
        let m = FeatureMatrix::from_rows(&[[1.5f32, -2.0]]).unwrap();
        let p = zero_pad(&m, PaddingPolicy::to_dim(4)).unwrap();
        assert_eq!(p.row(0), &[1.5, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn pad_mobilenet_width_to_default() {
        let m = FeatureMatrix::new(3, 1280, vec![0.25; 3 * 1280]).unwrap();
        let p = zero_pad(&m, PaddingPolicy::default()).unwrap();
        assert_eq!(p.cols(), 2048);
        assert!(p.row(2)[..1280].iter().all(|&v| v == 0.25));
        assert!(p.row(2)[1280..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pad_same_width_is_identity() {
        let m = FeatureMatrix::new(2, 2048, (0..4096).map(|i| i as f32).collect()).unwrap();
        assert_eq!(zero_pad(&m, PaddingPolicy::default()).unwrap(), m);
    }

    #[test]
    fn pad_rejects_truncation() {
        let m = FeatureMatrix::new(1, 5, vec![1.0; 5]).unwrap();
        assert!(matches!(
            zero_pad(&m, PaddingPolicy::to_dim(4)),
            Err(Error::PadTooSmall { cols: 5, target: 4 })
        ));
    }

    #[test]
    fn pad_keeps_labels() {
        let m = FeatureMatrix::with_labels(2, 1, vec![1.0, 2.0], Some(vec![7, 9])).unwrap();
        let p = zero_pad(&m, PaddingPolicy::to_dim(3)).unwrap();
        assert_eq!(p.labels(), Some(&[7u32, 9][..]));
    }

    #[test]
    fn construction_enforces_invariants() {
        assert!(matches!(FeatureMatrix::new(0, 3, vec![]), Err(Error::EmptyMatrix)));
        assert!(matches!(
            FeatureMatrix::new(1, 2, vec![1.0, f32::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            FeatureMatrix::with_labels(2, 1, vec![1.0, 2.0], Some(vec![0])),
            Err(Error::LabelCount { labels: 1, rows: 2 })
        ));
    }

    proptest! {
        #[test]
        fn padding_preserves_same_width_distances(
            a in prop::collection::vec(-100.0f32..100.0, 6),
            b in prop::collection::vec(-100.0f32..100.0, 6),
            extra in 0usize..20,
        ) {
            let m = FeatureMatrix::from_rows(&[a.clone(), b.clone()]).unwrap();
            let p = zero_pad(&m, PaddingPolicy::to_dim(6 + extra)).unwrap();
            prop_assert_eq!(dist(p.row(0), p.row(1)), dist(&a, &b));
        }

        #[test]
        fn padding_never_undercuts_truncation(
            short in prop::collection::vec(-10.0f32..10.0, 3),
            long in prop::collection::vec(-10.0f32..10.0, 7),
        ) {
            // Compare a padded short vector with a long one against the
            // truncation alternative that crops the long one to the short width.
            let padded = zero_pad(&FeatureMatrix::from_rows(&[short.clone()]).unwrap(),
                PaddingPolicy::to_dim(7)).unwrap();
            let padded_dist = dist(padded.row(0), &long);
            let truncated_dist = dist(&short, &long[..3]);
            prop_assert!(padded_dist >= truncated_dist);
        }
    }
}
