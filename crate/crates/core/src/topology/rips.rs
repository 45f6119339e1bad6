use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PersistenceDiagram;
use crate::embedding::Embedding2D;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_MAX_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsParams<T> {
    /// Truncation radius `R`. Simplices whose diameter exceeds it are never added.
    pub max_radius: T,
    /// Inputs larger than this are subsampled without replacement.
    pub max_points: usize,
    pub subsample_seed: u64,
}

impl<T: Real> RipsParams<T> {
    pub fn new(max_radius: T) -> Self {
        Self { max_radius, max_points: DEFAULT_MAX_POINTS, subsample_seed: 0 }
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.subsample_seed = seed;
        self
    }
}

/// The sorted rows kept by the seeded subsample, or `None` when `n` fits under the cap.
pub fn subsample_indices(n: usize, max_points: usize, seed: u64) -> Option<Vec<usize>> {
    if n <= max_points {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, max_points).into_vec();
    idx.sort_unstable();
    Some(idx)
}

/// Triangle identified by its edge indices in filtration order, largest first.
/// Lexicographic order on the key is a valid filtration order on triangles.
type Tri = (u32, u32, u32);

struct Complex<T> {
    n: usize,
    /// `(length, i, j)` with `i < j`, sorted by `(length, i, j)`.
    edges: Vec<(T, u32, u32)>,
    /// `n × n` lookup from vertex pair to edge index, `u32::MAX` when absent.
    index: Vec<u32>,
}

impl<T: Real> Complex<T> {
    fn build(pts: &[[T; 2]], radius: T) -> Self {
        let n = pts.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let dx = pts[i][0] - pts[j][0];
                let dy = pts[i][1] - pts[j][1];
                let len = (dx * dx + dy * dy).sqrt();
                if len <= radius {
                    edges.push((len, i as u32, j as u32));
                }
            }
        }
        edges.sort_unstable_by(|a, b| {
            a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2)))
        });
        assert!(edges.len() < u32::MAX as usize, "edge count exceeds u32 index space");
        let mut index = vec![u32::MAX; n * n];
        for (e, &(_, i, j)) in edges.iter().enumerate() {
            index[i as usize * n + j as usize] = e as u32;
            index[j as usize * n + i as usize] = e as u32;
        }
        Self { n, edges, index }
    }

    fn push_coboundary(&self, e: u32, heap: &mut BinaryHeap<Reverse<Tri>>) {
        let (_, i, j) = self.edges[e as usize];
        let (ri, rj) = (i as usize * self.n, j as usize * self.n);
        for k in 0..self.n {
            let a = self.index[ri + k];
            let b = self.index[rj + k];
            if a == u32::MAX || b == u32::MAX {
                continue;
            }
            let mut t = [e, a, b];
            t.sort_unstable_by(|x, y| y.cmp(x));
            heap.push(Reverse((t[0], t[1], t[2])));
        }
    }
}

/// Lowest surviving entry of a mod-2 column held as a heap with repeats.
fn pivot(heap: &mut BinaryHeap<Reverse<Tri>>) -> Option<Tri> {
    loop {
        let Reverse(t) = heap.pop()?;
        let mut count = 1;
        while heap.peek() == Some(&Reverse(t)) {
            heap.pop();
            count += 1;
        }
        if count % 2 == 1 {
            heap.push(Reverse(t));
            return Some(t);
        }
    }
}

fn sym_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

/// H0 and H1 diagrams of the Rips filtration of `e` truncated at `p.max_radius`.
///
/// Births of H0 are all zero and zero-length H0 bars are kept, so the H0 bar
/// count always equals the number of points used. Zero-persistence H1 pairs
/// are dropped.
pub fn rips_persistence<T: Real>(
    e: &Embedding2D<T>,
    p: &RipsParams<T>,
) -> Result<(PersistenceDiagram<T>, PersistenceDiagram<T>)> {
    if !(p.max_radius > T::zero()) {
        return Err(Error::InvalidParameter(format!("max_radius must be > 0, got {}", p.max_radius)));
    }
    if p.max_points < 2 {
        return Err(Error::InvalidParameter(format!("max_points must be >= 2, got {}", p.max_points)));
    }
    let pts: Vec<[T; 2]> = match subsample_indices(e.len(), p.max_points, p.subsample_seed) {
        Some(idx) => idx.iter().map(|&i| e.points()[i]).collect(),
        None => e.points().to_vec(),
    };
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!("persistence needs >= 2 points, got {}", pts.len())));
    }
    let cx = Complex::build(&pts, p.max_radius);

    let n = pts.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut negative = vec![false; cx.edges.len()];
    let mut h0 = Vec::with_capacity(n - 1);
    for (e, &(len, i, j)) in cx.edges.iter().enumerate() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj) as usize] = ri.min(rj);
            negative[e] = true;
            h0.push((T::zero(), len));
        }
    }
    let components = n - h0.len();
    let dgm0 = PersistenceDiagram::new(0, h0).with_essential(vec![T::zero(); components]);

    // Persistent cohomology: coboundary columns in reverse filtration order,
    // with H0-death edges cleared. Each column keeps the edges it was summed
    // from so that coboundaries are regenerated rather than stored.
    let mut owner: HashMap<Tri, usize> = HashMap::new();
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut h1 = Vec::new();
    let mut essential1 = Vec::new();
    let mut heap = BinaryHeap::new();
    for e in (0..cx.edges.len() as u32).rev() {
        if negative[e as usize] {
            continue;
        }
        let birth = cx.edges[e as usize].0;
        heap.clear();
        cx.push_coboundary(e, &mut heap);
        let mut sources = vec![e];
        loop {
            match pivot(&mut heap) {
                None => {
                    essential1.push(birth);
                    break;
                }
                Some(t) => match owner.get(&t) {
                    Some(&col) => {
                        for &f in &reduced[col] {
                            cx.push_coboundary(f, &mut heap);
                        }
                        sources = sym_diff(&sources, &reduced[col]);
                    }
                    None => {
                        let death = cx.edges[t.0 as usize].0;
                        if death > birth {
                            h1.push((birth, death));
                        }
                        owner.insert(t, reduced.len());
                        sources.sort_unstable();
                        reduced.push(sources);
                        break;
                    }
                },
            }
        }
    }
    let by_pair = |a: &(T, T), b: &(T, T)| {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    };
    h1.sort_by(by_pair);
    essential1.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok((dgm0, PersistenceDiagram::new(1, h1).with_essential(essential1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn emb(p: &[(f64, f64)]) -> Embedding2D<f64> {
        Embedding2D::from_xy(p).unwrap()
    }

    fn cloud(seed: u64, n: usize) -> Embedding2D<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Embedding2D::new((0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()).unwrap()
    }

    /// Every simplex up to dimension 2, ordered by (diameter, dimension,
    /// vertices), reduced as a plain mod-2 boundary matrix.
    fn boundary_oracle(e: &Embedding2D<f64>, r: f64) -> (Vec<(f64, f64)>, usize, Vec<(f64, f64)>, usize) {
        let p = e.points();
        let n = p.len();
        let d = |i: usize, j: usize| ((p[i][0] - p[j][0]).powi(2) + (p[i][1] - p[j][1]).powi(2)).sqrt();
        let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|i| (0.0, vec![i])).collect();
        for i in 0..n {
            for j in i + 1..n {
                if d(i, j) <= r {
                    simplices.push((d(i, j), vec![i, j]));
                }
                for k in j + 1..n {
                    let diam = d(i, j).max(d(i, k)).max(d(j, k));
                    if diam <= r {
                        simplices.push((diam, vec![i, j, k]));
                    }
                }
            }
        }
        simplices.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)));
        let pos: HashMap<Vec<usize>, usize> = simplices.iter().enumerate().map(|(i, s)| (s.1.clone(), i)).collect();
        let mut cols: Vec<Vec<usize>> = simplices
            .iter()
            .map(|(_, v)| {
                let mut faces: Vec<usize> = if v.len() == 1 {
                    vec![]
                } else {
                    (0..v.len())
                        .map(|skip| {
                            let f: Vec<usize> = v.iter().enumerate().filter(|&(q, _)| q != skip).map(|(_, &x)| x).collect();
                            pos[&f]
                        })
                        .collect()
                };
                faces.sort_unstable();
                faces
            })
            .collect();
        let mut low_owner: HashMap<usize, usize> = HashMap::new();
        let mut killed = vec![false; simplices.len()];
        let (mut h0, mut h1) = (vec![], vec![]);
        for c in 0..cols.len() {
            while let Some(&low) = cols[c].last() {
                match low_owner.get(&low) {
                    Some(&o) => {
                        let merged: Vec<usize> = {
                            let mut m: Vec<usize> = cols[c].iter().chain(&cols[o]).copied().collect();
                            m.sort_unstable();
                            let mut out = vec![];
                            let mut q = 0;
                            while q < m.len() {
                                if q + 1 < m.len() && m[q] == m[q + 1] {
                                    q += 2;
                                } else {
                                    out.push(m[q]);
                                    q += 1;
                                }
                            }
                            out
                        };
                        cols[c] = merged;
                    }
                    None => break,
                }
            }
            if let Some(&low) = cols[c].last() {
                low_owner.insert(low, c);
                killed[low] = true;
                let (b, dth) = (simplices[low].0, simplices[c].0);
                match simplices[low].1.len() {
                    1 => h0.push((b, dth)),
                    2 if dth > b => h1.push((b, dth)),
                    _ => {}
                }
            }
        }
        let mut ess = [0usize; 3];
        for (s, (_, v)) in simplices.iter().enumerate() {
            let positive = cols[s].is_empty();
            if positive && !killed[s] {
                ess[v.len() - 1] += 1;
            }
        }
        h0.sort_by(|a, b| a.partial_cmp(b).unwrap());
        h1.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (h0, ess[0], h1, ess[1])
    }

    #[test]
    fn unit_square() {
        let sq = emb(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let (h0, h1) = rips_persistence(&sq, &RipsParams::new(2.0)).unwrap();
        assert_eq!(h1.pairs.len(), 1);
        assert_eq!(h1.essential(), 0);
        let (b, d) = h1.pairs[0];
        assert!((b - 1.0).abs() < 1e-9 && (d - 2f64.sqrt()).abs() < 1e-9, "{b} {d}");
        assert_eq!(h0.pairs, vec![(0.0, 1.0); 3]);
        assert_eq!(h0.essential(), 1);
        let (_, _, oh1, _) = boundary_oracle(&sq, 2.0);
        assert_eq!(oh1.len(), 1);
        assert!((oh1[0].0 - b).abs() < 1e-9 && (oh1[0].1 - d).abs() < 1e-9);
    }

    #[test]
    fn square_cycle_survives_below_diagonal() {
        let sq = emb(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let (_, h1) = rips_persistence(&sq, &RipsParams::new(1.2)).unwrap();
        assert!(h1.pairs.is_empty());
        assert_eq!(h1.essential_births, vec![1.0]);
    }

    #[test]
    fn three_distant_points() {
        let e = emb(&[(0.0, 0.0), (100.0, 0.0), (0.0, 100.0)]);
        let (h0, h1) = rips_persistence(&e, &RipsParams::new(1e3)).unwrap();
        assert_eq!(h0.pairs.len(), 2);
        assert_eq!(h0.essential(), 1);
        assert!(h1.is_empty());
        let (h0, h1) = rips_persistence(&e, &RipsParams::new(1.0)).unwrap();
        assert_eq!(h0.essential(), 3);
        assert!(h1.is_empty());
    }

    #[test]
    fn equilateral_triangle_has_no_h1() {
        let s = 2.5;
        let e = emb(&[(0.0, 0.0), (s, 0.0), (s / 2.0, s * 3f64.sqrt() / 2.0)]);
        let (_, h1) = rips_persistence(&e, &RipsParams::new(10.0)).unwrap();
        assert!(h1.is_empty());
        let (_, _, oh1, oe1) = boundary_oracle(&e, 10.0);
        assert!(oh1.is_empty() && oe1 == 0);
    }

    #[test]
    fn matches_boundary_oracle_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..60 {
            let n = rng.random_range(2..13);
            let e = cloud(1000 + case, n);
            let r = [0.2, 0.35, 0.5, 0.8, 2.0][case as usize % 5];
            let (h0, h1) = rips_persistence(&e, &RipsParams::new(r)).unwrap();
            let (oh0, oe0, oh1, oe1) = boundary_oracle(&e, r);
            let mut p0 = h0.pairs.clone();
            p0.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(p0, oh0, "case {case}");
            assert_eq!(h0.essential(), oe0, "case {case}");
            assert_eq!(h1.pairs.len(), oh1.len(), "case {case}");
            for (x, y) in h1.pairs.iter().zip(&oh1) {
                assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12, "case {case}: {x:?} vs {y:?}");
            }
            assert_eq!(h1.essential(), oe1, "case {case}");
        }
    }

    #[test]
    fn h0_bar_count_equals_n() {
        for seed in 0..20 {
            let n = 5 + seed as usize * 3;
            let e = cloud(seed, n);
            let (h0, _) = rips_persistence(&e, &RipsParams::new(f64::INFINITY)).unwrap();
            assert_eq!(h0.bar_count(), n);
            assert_eq!(h0.essential(), 1);
        }
    }

    #[test]
    fn duplicate_points_keep_zero_bars() {
        let e = emb(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let (h0, _) = rips_persistence(&e, &RipsParams::new(5.0)).unwrap();
        assert_eq!(h0.pairs, vec![(0.0, 0.0), (0.0, 1.0)]);
    }

    #[test]
    fn subsamples_to_cap_deterministically() {
        let e = cloud(5, 600);
        let p = RipsParams::new(f64::INFINITY).with_seed(9);
        let (a, _) = rips_persistence(&e, &p).unwrap();
        let (b, _) = rips_persistence(&e, &p).unwrap();
        assert_eq!(a.bar_count(), DEFAULT_MAX_POINTS);
        assert_eq!(a, b);
        let idx = subsample_indices(600, 512, 9).unwrap();
        assert_eq!(idx.len(), 512);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(subsample_indices(512, 512, 9).is_none());
    }

    #[test]
    fn invalid_parameters() {
        let e = cloud(1, 5);
        for r in [0.0, -1.0, f64::NAN] {
            assert!(matches!(rips_persistence(&e, &RipsParams::new(r)), Err(Error::InvalidParameter(_))));
        }
        let one = emb(&[(0.0, 0.0)]);
        assert!(matches!(rips_persistence(&one, &RipsParams::new(1.0)), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn single_precision() {
        let sq = Embedding2D::<f32>::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let (_, h1) = rips_persistence(&sq, &RipsParams::new(2.0f32)).unwrap();
        assert_eq!(h1.pairs.len(), 1);
        assert!((h1.pairs[0].1 - std::f32::consts::SQRT_2).abs() < 1e-6);
    }
}
