//! XMEM v1: a fitted embedding model in one little-endian file.
//!
//! ```text
//! "XMEM" | version u8 = 1 | reserved [u8; 3]
//! params:   n_neighbors u64 | min_dist f64 | n_epochs u64 | metric u8 | init u8
//!           | init_used u8 | reserved u8 | seed u64 | negative_sample_rate u64
//!           | learning_rate f64
//! curve:    a f64 | b f64
//! training: byte_len u64 | FVEC v1 blob (labels included)
//! knn:      k u64 | rows u64 | indices u32 × rows·k | distances f64 × rows·k
//! calib:    rho f64 × N | sigma f64 × N
//! graph:    nnz u64 | nnz × (row u32 | col u32 | weight f64), sorted by (row, col)
//! coords:   N × (x f64 | y f64)
//! tag:      byte_len u64 | UTF-8
//! ```
//!
//! `N` is the training row count. Files must end exactly after the tag.

use std::fs;
use std::path::Path;

use super::graph::FuzzyGraph;
use super::model::EmbeddingModel;
use super::params::{EmbedParams, Init};
use crate::data::fvec;
use crate::embedding::Embedding2D;
use crate::error::{Error, Result};
use crate::knn::{KnnGraph, Metric};

pub const XMEM_MAGIC: [u8; 4] = *b"XMEM";
pub const XMEM_VERSION: u8 = 1;

pub fn write_model(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(model)).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn encode(m: &EmbeddingModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&XMEM_MAGIC);
    out.extend_from_slice(&[XMEM_VERSION, 0, 0, 0]);
    let p = &m.params;
    put_u64(&mut out, p.n_neighbors as u64);
    put_f64(&mut out, p.min_dist);
    put_u64(&mut out, p.n_epochs as u64);
    out.extend_from_slice(&[p.metric.code(), p.init.code(), m.init_used.code(), 0]);
    put_u64(&mut out, p.seed);
    put_u64(&mut out, p.negative_sample_rate as u64);
    put_f64(&mut out, p.learning_rate);
    put_f64(&mut out, m.curve_a);
    put_f64(&mut out, m.curve_b);

    let blob = fvec::encode(&m.training_data);
    put_u64(&mut out, blob.len() as u64);
    out.extend_from_slice(&blob);

    put_u64(&mut out, m.knn.k() as u64);
    put_u64(&mut out, m.knn.len() as u64);
    for i in m.knn.raw_indices() {
        out.extend_from_slice(&i.to_le_bytes());
    }
    for d in m.knn.raw_distances() {
        put_f64(&mut out, *d);
    }
    for v in m.rho.iter().chain(&m.sigma) {
        put_f64(&mut out, *v);
    }
    let g = &m.fuzzy_graph;
    put_u64(&mut out, g.nnz() as u64);
    for (i, j, w) in g.iter() {
        out.extend_from_slice(&(i as u32).to_le_bytes());
        out.extend_from_slice(&(j as u32).to_le_bytes());
        put_f64(&mut out, w);
    }
    for pt in m.coords.points() {
        put_f64(&mut out, pt[0]);
        put_f64(&mut out, pt[1]);
    }
    let tag = m.coords.source_tag().as_bytes();
    put_u64(&mut out, tag.len() as u64);
    out.extend_from_slice(tag);
    out
}

pub(crate) fn decode(bytes: &[u8]) -> Result<EmbeddingModel> {
    let mut r = fvec::Reader::new(bytes);
    let magic: [u8; 4] = r.take(4, "magic")?.try_into().unwrap();
    if magic != XMEM_MAGIC {
        return Err(Error::BadMagic { expected: XMEM_MAGIC, found: magic });
    }
    let version = r.u8("version")?;
    if version != XMEM_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    r.take(3, "reserved")?;
    let n_neighbors = r.len("n_neighbors")?;
    let min_dist = r.f64("min_dist")?;
    let n_epochs = r.len("n_epochs")?;
    let codes = r.take(4, "codes")?;
    let bad = |what: &str, c: u8| Error::InvalidParameter(format!("unknown {what} code {c}"));
    let metric = Metric::from_code(codes[0]).ok_or_else(|| bad("metric", codes[0]))?;
    let init = Init::from_code(codes[1]).ok_or_else(|| bad("init", codes[1]))?;
    let init_used = Init::from_code(codes[2]).ok_or_else(|| bad("init", codes[2]))?;
    let seed = r.u64("seed")?;
    let negative_sample_rate = r.len("negative_sample_rate")?;
    let learning_rate = r.f64("learning_rate")?;
    let params =
        EmbedParams { n_neighbors, min_dist, n_epochs, metric, seed, init, negative_sample_rate, learning_rate };
    let curve_a = r.f64("curve a")?;
    let curve_b = r.f64("curve b")?;

    let blob_len = r.len("training length")?;
    let training_data = fvec::decode(r.take(blob_len, "training data")?)?;
    let n = training_data.rows();

    let k = r.len("knn k")?;
    let knn_rows = r.len("knn rows")?;
    if knn_rows != n || k != n_neighbors {
        return Err(Error::Truncated(format!("knn block shape {knn_rows}x{k} inconsistent with model")));
    }
    let count = knn_rows * k;
    let mut indices = Vec::with_capacity(count);
    for _ in 0..count {
        indices.push(r.u32("knn index")?);
    }
    let mut distances = Vec::with_capacity(count);
    for _ in 0..count {
        distances.push(r.f64("knn distance")?);
    }
    let knn = KnnGraph::from_parts(k, indices, distances, metric);
    let mut rho = Vec::with_capacity(n);
    for _ in 0..n {
        rho.push(r.f64("rho")?);
    }
    let mut sigma = Vec::with_capacity(n);
    for _ in 0..n {
        sigma.push(r.f64("sigma")?);
    }
    let nnz = r.len("graph nnz")?;
    let (mut rows, mut cols, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..nnz {
        rows.push(r.u32("graph row")?);
        cols.push(r.u32("graph col")?);
        weights.push(r.f64("graph weight")?);
    }
    let fuzzy_graph = FuzzyGraph::from_coo(n, rows, cols, weights);
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        pts.push([r.f64("coord x")?, r.f64("coord y")?]);
    }
    let tag_len = r.len("tag length")?;
    let tag = String::from_utf8(r.take(tag_len, "tag")?.to_vec())
        .map_err(|_| Error::Truncated("source tag is not UTF-8".into()))?;
    if !r.is_empty() {
        return Err(Error::Truncated("trailing bytes after model".into()));
    }
    Ok(EmbeddingModel {
        training_data: training_data.with_source_tag(tag.clone()),
        knn,
        rho,
        sigma,
        fuzzy_graph,
        curve_a,
        curve_b,
        coords: Embedding2D::new(pts)?.with_source_tag(tag),
        params,
        init_used,
    })
}
