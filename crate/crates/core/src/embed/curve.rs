//! Fit of the low-dimensional similarity kernel `1 / (1 + a x^(2b))`.

const SAMPLES: usize = 300;
const SPAN: f64 = 3.0;

fn target(x: f64, min_dist: f64) -> f64 {
    if x <= min_dist {
        1.0
    } else {
        (-(x - min_dist)).exp()
    }
}

fn grid() -> impl Iterator<Item = f64> {
    (0..SAMPLES).map(|i| SPAN * i as f64 / (SAMPLES - 1) as f64)
}

#[inline]
fn kernel(x: f64, a: f64, b: f64) -> f64 {
    1.0 / (1.0 + a * x.powf(2.0 * b))
}

/// Sum of squared residuals of the kernel against the offset-exponential target.
pub fn curve_objective(min_dist: f64, a: f64, b: f64) -> f64 {
    grid().map(|x| (kernel(x, a, b) - target(x, min_dist)).powi(2)).sum()
}

/// Least-squares `(a, b)` for the given `min_dist`, by Levenberg–Marquardt
/// with an analytic Jacobian, starting from `(1, 1)`.
pub fn fit_curve(min_dist: f64) -> (f64, f64) {
    let xs: Vec<f64> = grid().collect();
    let ys: Vec<f64> = xs.iter().map(|&x| target(x, min_dist)).collect();
    let (mut a, mut b) = (1.0f64, 1.0f64);
    let mut lambda = 1e-3;
    let mut cost = curve_objective(min_dist, a, b);
    for _ in 0..500 {
        // normal equations J^T J delta = -J^T r
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&ys) {
            if x == 0.0 {
                continue;
            }
            let p = x.powf(2.0 * b);
            let den = 1.0 + a * p;
            let r = 1.0 / den - y;
            let da = -p / (den * den);
            let db = -a * p * 2.0 * x.ln() / (den * den);
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let mut improved = false;
        for _ in 0..40 {
            let (m00, m11) = (jaa * (1.0 + lambda), jbb * (1.0 + lambda));
            let det = m00 * m11 - jab * jab;
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let step_a = -(m11 * ga - jab * gb) / det;
            let step_b = -(m00 * gb - jab * ga) / det;
            let (na, nb) = (a + step_a, b + step_b);
            let new_cost = if na > 0.0 && nb > 0.0 { curve_objective(min_dist, na, nb) } else { f64::INFINITY };
            if new_cost < cost {
                let rel = (cost - new_cost) / cost.max(f64::MIN_POSITIVE);
                a = na;
                b = nb;
                cost = new_cost;
                lambda = (lambda * 0.3).max(1e-12);
                improved = rel > 1e-15;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Coarse grid followed by shrinking coordinate search; shares nothing
    /// with the solver except the objective.
    fn grid_refine_oracle(min_dist: f64) -> (f64, f64) {
        let mut best = (f64::INFINITY, 1.0, 1.0);
        for i in 1..=100 {
            for j in 1..=100 {
                let (a, b) = (i as f64 * 0.05, j as f64 * 0.03);
                let c = curve_objective(min_dist, a, b);
                if c < best.0 {
                    best = (c, a, b);
                }
            }
        }
        let (mut c, mut a, mut b) = best;
        let mut h = 0.05;
        while h > 1e-10 {
            let mut moved = false;
            for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                let cand = curve_objective(min_dist, a + da, b + db);
                if cand < c {
                    c = cand;
                    a += da;
                    b += db;
                    moved = true;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        (a, b)
    }

    #[test]
    fn default_min_dist_coefficients() {
        let (a, b) = fit_curve(0.1);
        // independent least-squares fits of the same 300-sample problem
        assert!((a - 1.576_943_460_269_765).abs() < 1e-4, "a = {a}");
        assert!((b - 0.895_060_877_851_573).abs() < 1e-4, "b = {b}");
        let (oa, ob) = grid_refine_oracle(0.1);
        assert!((a - oa).abs() < 1e-4 && (b - ob).abs() < 1e-4, "oracle ({oa}, {ob})");
    }

    #[test]
    fn returned_point_is_locally_optimal() {
        for md in [0.001, 0.1, 0.25, 0.5, 1.0] {
            let (a, b) = fit_curve(md);
            let c = curve_objective(md, a, b);
            for (da, db) in [(0.01, 0.01), (0.01, -0.01), (-0.01, 0.01), (-0.01, -0.01), (0.01, 0.0), (0.0, 0.01)] {
                assert!(c <= curve_objective(md, a + da, b + db), "min_dist {md}");
            }
            let (oa, ob) = grid_refine_oracle(md);
            assert!(c <= curve_objective(md, oa, ob) + 1e-6, "min_dist {md}");
        }
    }

    #[test]
    fn larger_min_dist_gives_smaller_a() {
        let (a1, b1) = fit_curve(0.1);
        let (a25, b25) = fit_curve(0.25);
        assert!(a25 > 0.0 && b25 > 0.0);
        assert!(a25 < a1);
        assert!((a25 - 1.121_436_342_230_568).abs() < 1e-4);
        assert!((b25 - 1.057_499_876_683_671).abs() < 1e-4);
        assert!(b1 > 0.0);
    }
}
