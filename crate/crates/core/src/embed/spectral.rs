//! Spectral initialization from the fuzzy graph.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::graph::FuzzyGraph;

pub(crate) const MAX_ITERATIONS: usize = 1000;
const TOLERANCE: f64 = 1e-8;
const BLOCK: usize = 4;

/// Eigenvectors for the 2nd and 3rd smallest eigenvalues of the symmetric
/// normalized Laplacian `I - D^-1/2 B D^-1/2`, as per-vertex `[x, y]`.
///
/// Block subspace iteration on `I + D^-1/2 B D^-1/2` with the trivial
/// eigenvector `D^1/2 1` projected out. Returns `None` when the residuals do
/// not drop below tolerance within [`MAX_ITERATIONS`] sweeps.
pub fn spectral_layout(graph: &FuzzyGraph, rng: &mut ChaCha8Rng) -> Option<Vec<[f64; 2]>> {
    let n = graph.n_vertices();
    if n < 3 {
        return None;
    }
    let degrees = graph.degrees();
    if degrees.iter().any(|&d| d <= 0.0) {
        return None;
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut trivial: Vec<f64> = degrees.iter().map(|d| d.sqrt()).collect();
    normalize(&mut trivial);

    let apply = |v: &[f64], out: &mut [f64]| {
        out.copy_from_slice(v);
        for (i, j, w) in graph.iter() {
            out[i] += w * inv_sqrt[i] * inv_sqrt[j] * v[j];
        }
    };

    let p = BLOCK.min(n - 1);
    let mut basis: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut image = vec![vec![0.0; n]; p];
    let mut ritz = vec![0.0; p];
    for _ in 0..MAX_ITERATIONS {
        orthonormalize(&mut basis, &trivial)?;
        for (b, img) in basis.iter().zip(image.iter_mut()) {
            apply(b, img);
        }
        // Rayleigh-Ritz on the block
        let mut h = vec![vec![0.0; p]; p];
        for r in 0..p {
            for c in 0..p {
                h[r][c] = dot(&basis[r], &image[c]);
            }
        }
        let (vals, vecs) = jacobi_eigen(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        let rotate = |src: &[Vec<f64>]| -> Vec<Vec<f64>> {
            order
                .iter()
                .map(|&c| {
                    let mut v = vec![0.0; n];
                    for (r, s) in src.iter().enumerate() {
                        let coef = vecs[r][c];
                        v.iter_mut().zip(s).for_each(|(a, b)| *a += coef * b);
                    }
                    v
                })
                .collect()
        };
        let new_basis = rotate(&basis);
        let new_image = rotate(&image);
        for (slot, &c) in order.iter().enumerate() {
            ritz[slot] = vals[c];
        }
        let converged = (0..2.min(p)).all(|s| {
            let res: f64 = new_image[s]
                .iter()
                .zip(&new_basis[s])
                .map(|(a, b)| (a - ritz[s] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            res < TOLERANCE
        });
        basis = new_image;
        if converged {
            let (u, v) = (&new_basis[0], &new_basis[1]);
            return Some((0..n).map(|i| [u[i], v[i]]).collect());
        }
    }
    None
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Modified Gram-Schmidt against `fixed` and then within the block.
fn orthonormalize(basis: &mut [Vec<f64>], fixed: &[f64]) -> Option<()> {
    for i in 0..basis.len() {
        for _ in 0..2 {
            let c = dot(&basis[i], fixed);
            basis[i].iter_mut().zip(fixed).for_each(|(a, b)| *a -= c * b);
            for j in 0..i {
                let (head, tail) = basis.split_at_mut(i);
                let c = dot(&tail[0], &head[j]);
                tail[0].iter_mut().zip(&head[j]).for_each(|(a, b)| *a -= c * b);
            }
        }
        if normalize(&mut basis[i]) < 1e-300 {
            return None;
        }
    }
    Some(())
}

/// Cyclic Jacobi eigen-decomposition of a small symmetric matrix.
/// Returns eigenvalues and eigenvectors as columns.
pub(crate) fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}
