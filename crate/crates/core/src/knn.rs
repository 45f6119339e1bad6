//! Exact brute-force k-nearest neighbors.
//!
//! Distances are accumulated in `f64` in a fixed column order, so
//! `distance(a, b)` and `distance(b, a)` agree bit for bit and results do not
//! depend on how many worker threads rayon uses.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    /// `1 - cos(x, y)`; a zero vector is at distance 1 from everything.
    Cosine,
}

impl Metric {
    pub fn code(self) -> u8 {
        match self {
            Metric::Euclidean => 0,
            Metric::Cosine => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Metric::Euclidean),
            1 => Some(Metric::Cosine),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

/// Neighbor lists for a set of query rows, `k` per row, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph {
    k: usize,
    indices: Vec<u32>,
    distances: Vec<f64>,
    metric: Metric,
}

impl KnnGraph {
    pub(crate) fn from_parts(k: usize, indices: Vec<u32>, distances: Vec<f64>, metric: Metric) -> Self {
        debug_assert_eq!(indices.len(), distances.len());
        KnnGraph { k, indices, distances, metric }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.indices.len() / self.k.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn indices(&self, row: usize) -> &[u32] {
        &self.indices[row * self.k..(row + 1) * self.k]
    }

    pub fn distances(&self, row: usize) -> &[f64] {
        &self.distances[row * self.k..(row + 1) * self.k]
    }

    pub(crate) fn raw_indices(&self) -> &[u32] {
        &self.indices
    }

    pub(crate) fn raw_distances(&self) -> &[f64] {
        &self.distances
    }
}

pub fn euclidean(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

fn sq_norm(a: &[f32]) -> f64 {
    dot(a, a)
}

fn cosine_with_sq_norms(a: &[f32], b: &[f32], na: f64, nb: f64) -> f64 {
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    (1.0 - dot(a, b) / (na * nb).sqrt()).max(0.0)
}

pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    cosine_with_sq_norms(a, b, sq_norm(a), sq_norm(b))
}

pub fn distance(metric: Metric, a: &[f32], b: &[f32]) -> f64 {
    match metric {
        Metric::Euclidean => euclidean(a, b),
        Metric::Cosine => cosine(a, b),
    }
}

fn by_distance_then_index(a: &(f64, u32), b: &(f64, u32)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Neighbors of each row of `m` among the other rows of `m` (self excluded).
pub fn knn_fit(m: &FeatureMatrix, k: usize, metric: Metric) -> Result<KnnGraph> {
    if k == 0 || k >= m.rows() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must satisfy 1 <= k < rows = {}",
            m.rows()
        )));
    }
    Ok(search(m, m, k, metric, true))
}

/// Neighbors of each row of `queries` among the rows of `reference`.
pub fn knn_query(
    reference: &FeatureMatrix,
    queries: &FeatureMatrix,
    k: usize,
    metric: Metric,
) -> Result<KnnGraph> {
    if reference.cols() != queries.cols() {
        return Err(Error::DimensionMismatch { left: reference.cols(), right: queries.cols() });
    }
    if k == 0 || k > reference.rows() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must satisfy 1 <= k <= reference rows = {}",
            reference.rows()
        )));
    }
    Ok(search(reference, queries, k, metric, false))
}

fn search(
    reference: &FeatureMatrix,
    queries: &FeatureMatrix,
    k: usize,
    metric: Metric,
    exclude_self: bool,
) -> KnnGraph {
    let ref_norms: Vec<f64> = match metric {
        Metric::Cosine => reference.iter_rows().map(sq_norm).collect(),
        Metric::Euclidean => Vec::new(),
    };
    let rows: Vec<Vec<(f64, u32)>> = (0..queries.rows())
        .into_par_iter()
        .map(|qi| {
            let q = queries.row(qi);
            let qn = if metric == Metric::Cosine { sq_norm(q) } else { 0.0 };
            let mut cand: Vec<(f64, u32)> = reference
                .iter_rows()
                .enumerate()
                .filter(|&(ri, _)| !(exclude_self && ri == qi))
                .map(|(ri, r)| {
                    let d = match metric {
                        Metric::Euclidean => euclidean(q, r),
                        Metric::Cosine => cosine_with_sq_norms(q, r, qn, ref_norms[ri]),
                    };
                    (d, ri as u32)
                })
                .collect();
            if cand.len() > k {
                cand.select_nth_unstable_by(k - 1, by_distance_then_index);
                cand.truncate(k);
            }
            cand.sort_unstable_by(by_distance_then_index);
            cand
        })
        .collect();
    let mut indices = Vec::with_capacity(queries.rows() * k);
    let mut distances = Vec::with_capacity(queries.rows() * k);
    for row in rows {
        for (d, i) in row {
            indices.push(i);
            distances.push(d);
        }
    }
    KnnGraph::from_parts(k, indices, distances, metric)
}
