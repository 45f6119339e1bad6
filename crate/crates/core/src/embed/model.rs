use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::calibrate::{bandwidth, membership, smooth_knn_calibrate};
use super::curve::fit_curve;
use super::graph::{fuzzy_union, FuzzyGraph};
use super::layout::{optimize, EdgeSchedule, Kernel};
use super::params::{EmbedParams, Init};
use super::spectral::spectral_layout;
use crate::data::FeatureMatrix;
use crate::embedding::Embedding2D;
use crate::error::{Error, Result};
use crate::knn::{knn_fit, knn_query, KnnGraph};

/// Total membership below which a projected point counts as having no neighbors.
pub const ORPHAN_WEIGHT: f64 = 1e-12;

// Independent ChaCha streams per stage, all keyed by the user seed.
const STREAM_INIT: u64 = 1;
const STREAM_FIT_LAYOUT: u64 = 2;
const STREAM_TRANSFORM: u64 = 3;

fn stage_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A fitted embedding: everything `transform` needs to place new points.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub(crate) training_data: FeatureMatrix,
    pub(crate) knn: KnnGraph,
    pub(crate) rho: Vec<f64>,
    pub(crate) sigma: Vec<f64>,
    pub(crate) fuzzy_graph: FuzzyGraph,
    pub(crate) curve_a: f64,
    pub(crate) curve_b: f64,
    pub(crate) coords: Embedding2D<f64>,
    pub(crate) params: EmbedParams,
    pub(crate) init_used: Init,
}

/// Result of projecting new feature vectors onto a fitted embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub embedding: Embedding2D<f64>,
    /// Starting positions: an exact duplicate's coordinates when one exists,
    /// otherwise the membership-weighted mean of the neighbors.
    pub initial: Embedding2D<f64>,
    /// Rows whose total neighbor membership fell below [`ORPHAN_WEIGHT`].
    /// They are placed on their nearest training point rather than dropped.
    pub flagged: Vec<usize>,
}

impl EmbeddingModel {
    pub fn training_data(&self) -> &FeatureMatrix {
        &self.training_data
    }

    pub fn knn(&self) -> &KnnGraph {
        &self.knn
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn fuzzy_graph(&self) -> &FuzzyGraph {
        &self.fuzzy_graph
    }

    pub fn curve(&self) -> (f64, f64) {
        (self.curve_a, self.curve_b)
    }

    pub fn coords(&self) -> &Embedding2D<f64> {
        &self.coords
    }

    pub fn params(&self) -> &EmbedParams {
        &self.params
    }

    /// Which initialization actually ran; spectral falls back to random if
    /// the eigensolver does not converge.
    pub fn init_used(&self) -> Init {
        self.init_used
    }

    pub fn dim(&self) -> usize {
        self.training_data.cols()
    }

    /// Places `new_data` on this embedding without moving the training points.
    pub fn transform(&self, new_data: &FeatureMatrix) -> Result<Projection> {
        self.transform_seeded(new_data, self.params.seed)
    }

    /// [`transform`](Self::transform) with the optimizer stream seeded by `seed`.
    pub fn transform_seeded(&self, new_data: &FeatureMatrix, seed: u64) -> Result<Projection> {
        if new_data.cols() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: new_data.cols() });
        }
        let p = &self.params;
        let k = p.n_neighbors;
        let knn = knn_query(&self.training_data, new_data, k, p.metric)?;
        let weights: Vec<Vec<f64>> = (0..knn.len())
            .into_par_iter()
            .map(|i| {
                let d = knn.distances(i);
                let sigma = bandwidth(d, k, 0.0);
                d.iter().map(|&x| membership(x, 0.0, sigma)).collect()
            })
            .collect();

        let reference = self.coords.points();
        let mut flagged = Vec::new();
        let mut init = Vec::with_capacity(knn.len());
        for (i, w) in weights.iter().enumerate() {
            let nbrs = knn.indices(i);
            let total: f64 = w.iter().sum();
            if total < ORPHAN_WEIGHT || !total.is_finite() {
                flagged.push(i);
                init.push(reference[nbrs[0] as usize]);
                continue;
            }
            if let Some(pos) = w.iter().position(|&wj| wj == 1.0) {
                init.push(reference[nbrs[pos] as usize]);
                continue;
            }
            let mut acc = [0.0, 0.0];
            for (&j, &wj) in nbrs.iter().zip(w) {
                let q = reference[j as usize];
                acc[0] += wj * q[0];
                acc[1] += wj * q[1];
            }
            init.push([acc[0] / total, acc[1] / total]);
        }

        let n_epochs = p.transform_epochs();
        let edges = weights.iter().enumerate().flat_map(|(i, w)| {
            let nbrs = knn.indices(i);
            w.iter().zip(nbrs).map(move |(&wj, &j)| (i, j as usize, wj))
        });
        let schedule = EdgeSchedule::new(edges, n_epochs);
        let mut placed = init.clone();
        let mut rng = stage_rng(seed, STREAM_TRANSFORM);
        let kernel = Kernel { a: self.curve_a, b: self.curve_b };
        // new points only; the reference layout stays frozen
        optimize(
            &mut placed,
            Some(reference),
            &schedule,
            &kernel,
            n_epochs,
            p.learning_rate / 4.0,
            p.negative_sample_rate,
            &mut rng,
        );
        let tag = new_data.source_tag().to_string();
        Ok(Projection {
            embedding: Embedding2D::new(placed)?.with_source_tag(tag.clone()),
            initial: Embedding2D::new(init)?.with_source_tag(tag),
            flagged,
        })
    }
}

/// Fits a two-dimensional embedding of `data`.
///
/// Deterministic for a fixed `params.seed`: repeated calls produce
/// bit-identical coordinates.
pub fn fit(data: &FeatureMatrix, params: EmbedParams) -> Result<EmbeddingModel> {
    params.validate()?;
    let n = data.rows();
    let k = params.n_neighbors;
    if n <= k {
        return Err(Error::InsufficientData(format!(
            "{n} rows cannot support n_neighbors = {k}; need more rows than neighbors"
        )));
    }
    let knn = knn_fit(data, k, params.metric)?;
    let (rho, sigma): (Vec<f64>, Vec<f64>) =
        (0..n).into_par_iter().map(|i| smooth_knn_calibrate(knn.distances(i), k)).unzip();
    let graph = fuzzy_union(n, &knn, &rho, &sigma);
    let (a, b) = fit_curve(params.min_dist);

    let mut init_rng = stage_rng(params.seed, STREAM_INIT);
    let (mut coords, init_used) = initial_layout(&graph, params.init, &mut init_rng);
    rescale_to_box(&mut coords, 10.0);

    let schedule = EdgeSchedule::new(graph.iter(), params.n_epochs);
    let mut rng = stage_rng(params.seed, STREAM_FIT_LAYOUT);
    optimize(
        &mut coords,
        None,
        &schedule,
        &Kernel { a, b },
        params.n_epochs,
        params.learning_rate,
        params.negative_sample_rate,
        &mut rng,
    );
    let coords = Embedding2D::new(coords)?.with_source_tag(data.source_tag().to_string());
    Ok(EmbeddingModel {
        training_data: data.clone(),
        knn,
        rho,
        sigma,
        fuzzy_graph: graph,
        curve_a: a,
        curve_b: b,
        coords,
        params,
        init_used,
    })
}

fn initial_layout(graph: &FuzzyGraph, init: Init, rng: &mut ChaCha8Rng) -> (Vec<[f64; 2]>, Init) {
    if init == Init::Spectral {
        if let Some(mut coords) = spectral_layout(graph, rng) {
            let max_abs = coords.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
            if max_abs > 0.0 {
                let expansion = 10.0 / max_abs;
                let noise = Normal::new(0.0, 1e-4).expect("valid normal");
                for p in coords.iter_mut() {
                    for v in p.iter_mut() {
                        *v = *v * expansion + noise.sample(rng);
                    }
                }
                return (coords, Init::Spectral);
            }
        }
    }
    let coords = (0..graph.n_vertices())
        .map(|_| [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)])
        .collect();
    (coords, Init::SeededRandom)
}

/// Affinely maps each axis onto `[0, size]`.
fn rescale_to_box(coords: &mut [[f64; 2]], size: f64) {
    for d in 0..2 {
        let lo = coords.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
        let hi = coords.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            for p in coords.iter_mut() {
                p[d] = size * (p[d] - lo) / (hi - lo);
            }
        }
    }
}
