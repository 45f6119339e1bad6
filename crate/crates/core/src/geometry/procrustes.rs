use serde::Serialize;

use crate::embedding::Embedding2D;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Alignment of `other` onto `reference`.
///
/// In original coordinates each row `y` of `other` maps to
/// `scale * y * rotation + translation` (row vector times matrix). The
/// disparity is measured after both sets are centered and scaled to unit
/// Frobenius norm, so it lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcrustesResult<T> {
    pub disparity: T,
    /// Orthogonal; may be a reflection.
    pub rotation: [[T; 2]; 2],
    pub scale: T,
    pub translation: [T; 2],
}

fn centered<T: Real>(pts: &[[T; 2]]) -> ([T; 2], Vec<[T; 2]>, T) {
    let n = T::lit(pts.len() as f64);
    let mean = [
        pts.iter().map(|p| p[0]).sum::<T>() / n,
        pts.iter().map(|p| p[1]).sum::<T>() / n,
    ];
    let c: Vec<[T; 2]> = pts.iter().map(|p| [p[0] - mean[0], p[1] - mean[1]]).collect();
    let norm = frobenius_sq(&c).sqrt();
    (mean, c, norm)
}

fn frobenius_sq<T: Real>(pts: &[[T; 2]]) -> T {
    pts.iter().map(|p| p[0] * p[0]).sum::<T>() + pts.iter().map(|p| p[1] * p[1]).sum::<T>()
}

/// Orthogonal `q` maximizing `trace(qᵀ c)`, via the closed form for 2×2 polar factors.
fn best_orthogonal<T: Real>(c: [[T; 2]; 2]) -> [[T; 2]; 2] {
    let (p_rot, q_rot) = (c[0][0] + c[1][1], c[1][0] - c[0][1]);
    let (p_ref, q_ref) = (c[0][0] - c[1][1], c[0][1] + c[1][0]);
    let h_rot = (p_rot * p_rot + q_rot * q_rot).sqrt();
    let h_ref = (p_ref * p_ref + q_ref * q_ref).sqrt();
    if h_rot >= h_ref {
        if h_rot == T::zero() {
            return [[T::one(), T::zero()], [T::zero(), T::one()]];
        }
        let (cs, sn) = (p_rot / h_rot, q_rot / h_rot);
        [[cs, -sn], [sn, cs]]
    } else {
        let (cs, sn) = (p_ref / h_ref, q_ref / h_ref);
        [[cs, sn], [sn, -cs]]
    }
}

#[inline]
fn row_times<T: Real>(y: [T; 2], q: &[[T; 2]; 2]) -> [T; 2] {
    [y[0] * q[0][0] + y[1] * q[1][0], y[0] * q[0][1] + y[1] * q[1][1]]
}

/// Procrustes superimposition of `other` onto `reference`, rows paired by index.
///
/// With both sets standardized the disparity is symmetric in exact
/// arithmetic; the reported transform always maps `other` onto `reference`.
pub fn procrustes<T: Real>(
    reference: &Embedding2D<T>,
    other: &Embedding2D<T>,
) -> Result<ProcrustesResult<T>> {
    if reference.len() != other.len() {
        return Err(Error::RowMismatch { left: reference.len(), right: other.len() });
    }
    if reference.len() < 2 {
        return Err(Error::InsufficientData("procrustes needs at least two paired points".into()));
    }
    let (mean_x, x0, norm_x) = centered(reference.points());
    let (mean_y, y0, norm_y) = centered(other.points());
    let identity = [[T::one(), T::zero()], [T::zero(), T::one()]];
    if norm_x == T::zero() || norm_y == T::zero() {
        let disparity = if norm_x == norm_y { T::zero() } else { T::one() };
        let translation = [mean_x[0] - mean_y[0], mean_x[1] - mean_y[1]];
        return Ok(ProcrustesResult { disparity, rotation: identity, scale: T::one(), translation });
    }
    let x1: Vec<[T; 2]> = x0.iter().map(|p| [p[0] / norm_x, p[1] / norm_x]).collect();
    let y1: Vec<[T; 2]> = y0.iter().map(|p| [p[0] / norm_y, p[1] / norm_y]).collect();

    // c = y1ᵀ x1
    let mut c = [[T::zero(); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            c[r][s] = y1.iter().zip(&x1).map(|(y, x)| y[r] * x[s]).sum();
        }
    }
    let q = best_orthogonal(c);
    // Least-squares scale for fixed q; equals the nuclear norm of c because
    // |y1| = 1, but this form is exactly 1 when the inputs coincide.
    let trace = (q[0][0] * c[0][0] + q[1][0] * c[1][0]) + (q[0][1] * c[0][1] + q[1][1] * c[1][1]);
    let s = trace / frobenius_sq(&y1);

    let disparity = x1
        .iter()
        .zip(&y1)
        .map(|(x, y)| {
            let a = row_times(*y, &q);
            let dx = x[0] - s * a[0];
            let dy = x[1] - s * a[1];
            dx * dx + dy * dy
        })
        .sum::<T>()
        .max(T::zero())
        .min(T::one());

    let scale = norm_x * s / norm_y;
    let my = row_times(mean_y, &q);
    let translation = [mean_x[0] - scale * my[0], mean_x[1] - scale * my[1]];
    Ok(ProcrustesResult { disparity, rotation: q, scale, translation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn emb(p: &[(f64, f64)]) -> Embedding2D<f64> {
        Embedding2D::from_xy(p).unwrap()
    }

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> Embedding2D<f64> {
        Embedding2D::new((0..n).map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect())
            .unwrap()
    }

    fn similarity(e: &Embedding2D<f64>, scale: f64, deg: f64, shift: [f64; 2], mirror: bool) -> Embedding2D<f64> {
        let (s, c) = deg.to_radians().sin_cos();
        Embedding2D::new(
            e.points()
                .iter()
                .map(|p| {
                    let y = if mirror { -p[1] } else { p[1] };
                    [scale * (c * p[0] - s * y) + shift[0], scale * (s * p[0] + c * y) + shift[1]]
                })
                .collect(),
        )
        .unwrap()
    }

    /// Residual for given orthogonal q, with the least-squares scale, on standardized data.
    fn residual(x: &[[f64; 2]], y: &[[f64; 2]], q: [[f64; 2]; 2]) -> f64 {
        let a: Vec<[f64; 2]> = y.iter().map(|p| row_times(*p, &q)).collect();
        let num: f64 = x.iter().zip(&a).map(|(x, a)| x[0] * a[0] + x[1] * a[1]).sum();
        let den: f64 = a.iter().map(|a| a[0] * a[0] + a[1] * a[1]).sum();
        let s = num / den;
        x.iter().zip(&a).map(|(x, a)| (x[0] - s * a[0]).powi(2) + (x[1] - s * a[1]).powi(2)).sum()
    }

    fn standardize(e: &Embedding2D<f64>) -> Vec<[f64; 2]> {
        let (_, c, n) = centered(e.points());
        c.iter().map(|p| [p[0] / n, p[1] / n]).collect()
    }

    /// Sweep rotations and reflections on a fine angle grid, then refine by ternary search.
    fn sweep_oracle(reference: &Embedding2D<f64>, other: &Embedding2D<f64>) -> f64 {
        let x = standardize(reference);
        let y = standardize(other);
        let mut best = f64::INFINITY;
        for mirror in [false, true] {
            let q_of = |t: f64| {
                let (s, c) = t.sin_cos();
                if mirror { [[c, s], [s, -c]] } else { [[c, -s], [s, c]] }
            };
            let steps = 3600;
            let mut best_t = 0.0;
            let mut best_here = f64::INFINITY;
            for i in 0..steps {
                let t = i as f64 / steps as f64 * std::f64::consts::TAU;
                let r = residual(&x, &y, q_of(t));
                if r < best_here {
                    best_here = r;
                    best_t = t;
                }
            }
            let h = std::f64::consts::TAU / steps as f64;
            let (mut lo, mut hi) = (best_t - h, best_t + h);
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if residual(&x, &y, q_of(m1)) < residual(&x, &y, q_of(m2)) { hi = m2 } else { lo = m1 }
            }
            best = best.min(residual(&x, &y, q_of(0.5 * (lo + hi))));
        }
        best
    }

    #[test]
    fn self_comparison_is_exactly_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 3, 17, 250] {
            let a = random_cloud(&mut rng, n);
            let r = procrustes(&a, &a).unwrap();
            assert_eq!(r.disparity, 0.0, "n = {n}");
        }
    }

    #[test]
    fn similarity_copy_is_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_cloud(&mut rng, 60);
        let b = similarity(&a, 2.0, 37.0, [5.0, -3.0], false);
        let r = procrustes(&a, &b).unwrap();
        assert!(r.disparity < 1e-10, "{}", r.disparity);
        assert_abs_diff_eq!(r.scale, 0.5, epsilon = 1e-12);
        // the transform actually maps b back onto a
        for (pa, pb) in a.points().iter().zip(b.points()) {
            let m = row_times(*pb, &r.rotation);
            assert_abs_diff_eq!(r.scale * m[0] + r.translation[0], pa[0], epsilon = 1e-9);
            assert_abs_diff_eq!(r.scale * m[1] + r.translation[1], pa[1], epsilon = 1e-9);
        }
    }

    #[test]
    fn mirrored_copy_aligns_with_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_cloud(&mut rng, 40);
        let b = similarity(&a, 0.3, 120.0, [1.0, 1.0], true);
        let r = procrustes(&a, &b).unwrap();
        assert!(r.disparity < 1e-10);
        let q = r.rotation;
        assert_abs_diff_eq!(q[0][0] * q[1][1] - q[0][1] * q[1][0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn reflected_corner_matches_sweep_oracle() {
        let square = emb(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        // corner (1, 1) reflected through the center (0.5, 0.5) lands on (0, 0)
        let moved = emb(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 1.0)]);
        let m = procrustes(&square, &moved).unwrap().disparity;
        let oracle = sweep_oracle(&square, &moved);
        assert_abs_diff_eq!(m, oracle, epsilon = 1e-12);
        assert!(m > 0.0 && m < 1.0);
    }

    #[test]
    fn random_pairs_match_sweep_and_svd_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let n = rng.random_range(3..30);
            let a = random_cloud(&mut rng, n);
            let b = random_cloud(&mut rng, n);
            let m = procrustes(&a, &b).unwrap().disparity;
            assert_abs_diff_eq!(m, sweep_oracle(&a, &b), epsilon = 1e-10);

            // 1 - (nuclear norm of yᵀx)² through a general SVD
            let x = standardize(&a);
            let y = standardize(&b);
            let mut c = nalgebra::Matrix2::<f64>::zeros();
            for (py, px) in y.iter().zip(&x) {
                for r in 0..2 {
                    for s in 0..2 {
                        c[(r, s)] += py[r] * px[s];
                    }
                }
            }
            let nuclear: f64 = c.svd(false, false).singular_values.sum();
            assert_abs_diff_eq!(m, 1.0 - nuclear * nuclear, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_cloud(&mut rng, 12);
            let b = random_cloud(&mut rng, 12);
            let q = procrustes(&a, &b).unwrap().rotation;
            let qtq = [
                [q[0][0] * q[0][0] + q[1][0] * q[1][0], q[0][0] * q[0][1] + q[1][0] * q[1][1]],
                [q[0][1] * q[0][0] + q[1][1] * q[1][0], q[0][1] * q[0][1] + q[1][1] * q[1][1]],
            ];
            assert_abs_diff_eq!(qtq[0][0], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(qtq[1][1], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(qtq[0][1], 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(qtq[1][0], 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn invariant_under_common_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let a = random_cloud(&mut rng, 25);
            let b = random_cloud(&mut rng, 25);
            let base = procrustes(&a, &b).unwrap().disparity;
            let (s, deg) = (rng.random_range(0.1..10.0), rng.random_range(0.0..360.0));
            let t = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
            let moved = procrustes(&similarity(&a, s, deg, t, false), &similarity(&b, s, deg, t, false))
                .unwrap()
                .disparity;
            assert_abs_diff_eq!(base, moved, epsilon = 1e-10);
        }
    }

    #[test]
    fn direction_swap_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let a = random_cloud(&mut rng, 15);
            let b = random_cloud(&mut rng, 15);
            let ab = procrustes(&a, &b).unwrap().disparity;
            let ba = procrustes(&b, &a).unwrap().disparity;
            assert!((0.0..=1.0).contains(&ab) && (0.0..=1.0).contains(&ba));
        }
    }

    #[test]
    fn degenerate_inputs() {
        let point = emb(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)]);
        let other_point = emb(&[(4.0, 0.0), (4.0, 0.0), (4.0, 0.0)]);
        let spread = emb(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(procrustes(&point, &other_point).unwrap().disparity, 0.0);
        assert_eq!(procrustes(&point, &spread).unwrap().disparity, 1.0);
        assert_eq!(procrustes(&spread, &point).unwrap().disparity, 1.0);
    }

    #[test]
    fn row_count_mismatch_is_an_error() {
        let a = emb(&[(0.0, 0.0), (1.0, 0.0)]);
        let b = emb(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert!(matches!(procrustes(&a, &b), Err(Error::RowMismatch { left: 2, right: 3 })));
    }

    #[test]
    fn single_precision_self_comparison() {
        let a = Embedding2D::from_xy(&[(0.0f32, 1.0), (2.0, -1.0), (3.5, 0.25)]).unwrap();
        assert_eq!(procrustes(&a, &a).unwrap().disparity, 0.0f32);
    }
}
