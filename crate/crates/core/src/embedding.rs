use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A set of points in the plane, one per sample, in sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding2D<T: Real> {
    coords: Vec<[T; 2]>,
    source_tag: String,
}

impl<T: Real> Embedding2D<T> {
    pub fn new(coords: Vec<[T; 2]>) -> Result<Self> {
        if let Some(row) = coords.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
            let col = usize::from(coords[row][0].is_finite());
            return Err(Error::NonFinite { row, col });
        }
        Ok(Embedding2D { coords, source_tag: String::new() })
    }

    pub fn from_xy(points: &[(T, T)]) -> Result<Self> {
        Self::new(points.iter().map(|&(x, y)| [x, y]).collect())
    }

    pub fn with_source_tag(mut self, tag: impl Into<String>) -> Self {
        self.source_tag = tag.into();
        self
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn points(&self) -> &[[T; 2]] {
        &self.coords
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        Embedding2D {
            coords: indices.iter().map(|&i| self.coords[i]).collect(),
            source_tag: self.source_tag.clone(),
        }
    }

    /// Applies `p -> scale * p + offset` to every point.
    pub fn map_affine(&self, scale: T, offset: [T; 2]) -> Self {
        Embedding2D {
            coords: self
                .coords
                .iter()
                .map(|p| [scale * p[0] + offset[0], scale * p[1] + offset[1]])
                .collect(),
            source_tag: self.source_tag.clone(),
        }
    }

    pub fn cast<U: Real>(&self) -> Embedding2D<U> {
        Embedding2D {
            coords: self.coords.iter().map(|p| [U::lit(p[0].to_f64_lossy()), U::lit(p[1].to_f64_lossy())]).collect(),
            source_tag: self.source_tag.clone(),
        }
    }

    /// Converts to a two-column feature matrix (narrowing to `f32`).
    pub fn to_feature_matrix(&self) -> Result<FeatureMatrix> {
        let values = self
            .coords
            .iter()
            .flat_map(|p| [p[0].to_f64_lossy() as f32, p[1].to_f64_lossy() as f32])
            .collect();
        Ok(FeatureMatrix::new(self.coords.len(), 2, values)?.with_source_tag(self.source_tag.clone()))
    }

    pub fn from_feature_matrix(m: &FeatureMatrix) -> Result<Self> {
        if m.cols() != 2 {
            return Err(Error::DimensionMismatch { left: 2, right: m.cols() });
        }
        let coords = m.iter_rows().map(|r| [T::lit(r[0] as f64), T::lit(r[1] as f64)]).collect();
        Ok(Embedding2D::new(coords)?.with_source_tag(m.source_tag().to_string()))
    }
}
