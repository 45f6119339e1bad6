use std::collections::BTreeMap;

use super::calibrate::membership;
use crate::knn::KnnGraph;

/// Symmetric sparse weight matrix in COO form, sorted by `(row, col)`.
///
/// Every stored weight lies in `(0, 1]`, both `(i, j)` and `(j, i)` are
/// present with identical weights, and the diagonal is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyGraph {
    n: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    weights: Vec<f64>,
}

impl FuzzyGraph {
    pub(crate) fn from_coo(n: usize, rows: Vec<u32>, cols: Vec<u32>, weights: Vec<f64>) -> Self {
        FuzzyGraph { n, rows, cols, weights }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.weights.len()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.weights)
            .map(|((&i, &j), &w)| (i as usize, j as usize, w))
    }

    /// Weighted degree of every vertex.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, _, w) in self.iter() {
            d[i] += w;
        }
        d
    }
}

/// Directed memberships `w_ij = exp(-max(0, d_ij - rho_i) / sigma_i)` for each kNN edge.
pub(crate) fn directed_memberships(knn: &KnnGraph, rho: &[f64], sigma: &[f64]) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::with_capacity(knn.len() * knn.k());
    for i in 0..knn.len() {
        for (&j, &d) in knn.indices(i).iter().zip(knn.distances(i)) {
            let w = membership(d, rho[i], sigma[i]);
            if w > 0.0 {
                out.push((i as u32, j, w));
            }
        }
    }
    out
}

/// Fuzzy union `B = W + Wᵀ - W∘Wᵀ` of the directed membership matrix.
pub fn fuzzy_union(n: usize, knn: &KnnGraph, rho: &[f64], sigma: &[f64]) -> FuzzyGraph {
    let mut pairs: BTreeMap<(u32, u32), (f64, f64)> = BTreeMap::new();
    for (i, j, w) in directed_memberships(knn, rho, sigma) {
        if i == j {
            continue;
        }
        if i < j {
            pairs.entry((i, j)).or_default().0 = w;
        } else {
            pairs.entry((j, i)).or_default().1 = w;
        }
    }
    let mut entries: Vec<(u32, u32, f64)> = Vec::with_capacity(pairs.len() * 2);
    for ((i, j), (a, b)) in pairs {
        let w = (a + b) - a * b;
        if w > 0.0 {
            entries.push((i, j, w));
            entries.push((j, i, w));
        }
    }
    entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
    let mut rows = Vec::with_capacity(entries.len());
    let mut cols = Vec::with_capacity(entries.len());
    let mut weights = Vec::with_capacity(entries.len());
    for (i, j, w) in entries {
        rows.push(i);
        cols.push(j);
        weights.push(w);
    }
    FuzzyGraph { n, rows, cols, weights }
}
