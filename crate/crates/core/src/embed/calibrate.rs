//! Per-point distance calibration for the fuzzy neighbor graph.

/// Search bounds for the bandwidth.
pub const SIGMA_MIN: f64 = 1e-8;
pub const SIGMA_MAX: f64 = 1e8;
const BISECTION_STEPS: usize = 64;

/// Membership of a neighbor at distance `d` for a point with offset `rho` and bandwidth `sigma`.
#[inline]
pub fn membership(d: f64, rho: f64, sigma: f64) -> f64 {
    (-(d - rho).max(0.0) / sigma).exp()
}

fn membership_sum(distances: &[f64], rho: f64, sigma: f64) -> f64 {
    distances.iter().map(|&d| membership(d, rho, sigma)).sum()
}

/// Returns `(rho, sigma)` for one point's ascending neighbor distances.
///
/// `rho` is the smallest positive distance (0 if all are zero). `sigma`
/// solves `sum_j exp(-max(0, d_j - rho) / sigma) = log2(k)` by bisection
/// over `[SIGMA_MIN, SIGMA_MAX]`; when the target is unreachable the nearer
/// bound is returned.
pub fn smooth_knn_calibrate(distances: &[f64], k: usize) -> (f64, f64) {
    let rho = distances.iter().copied().find(|&d| d > 0.0).unwrap_or(0.0);
    (rho, bandwidth(distances, k, rho))
}

/// Bandwidth for a fixed offset. With `rho = 0` only exact duplicates reach
/// membership 1, which is how points are calibrated against a frozen layout.
pub fn bandwidth(distances: &[f64], k: usize, rho: f64) -> f64 {
    let target = (k as f64).log2();
    if membership_sum(distances, rho, SIGMA_MIN) >= target {
        return SIGMA_MIN;
    }
    if membership_sum(distances, rho, SIGMA_MAX) <= target {
        return SIGMA_MAX;
    }
    let (mut lo, mut hi) = (SIGMA_MIN, SIGMA_MAX);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if membership_sum(distances, rho, mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
