//! Negative-sampling SGD on the attractive/repulsive cross-entropy objective.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

const GRAD_CLIP: f64 = 4.0;
const REPULSION: f64 = 1.0;

#[inline]
fn clip(v: f64) -> f64 {
    v.clamp(-GRAD_CLIP, GRAD_CLIP)
}

#[inline]
fn sq_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Positive edges and their sampling schedule.
pub(crate) struct EdgeSchedule {
    heads: Vec<usize>,
    tails: Vec<usize>,
    epochs_per_sample: Vec<f64>,
}

impl EdgeSchedule {
    /// Edges with weight below `max / n_epochs` would be sampled less than
    /// once and are dropped; the rest are sampled every `max / w` epochs.
    pub(crate) fn new(edges: impl IntoIterator<Item = (usize, usize, f64)>, n_epochs: usize) -> Self {
        let edges: Vec<(usize, usize, f64)> = edges.into_iter().collect();
        let w_max = edges.iter().map(|e| e.2).fold(0.0, f64::max);
        let cutoff = w_max / n_epochs as f64;
        let mut s = EdgeSchedule { heads: Vec::new(), tails: Vec::new(), epochs_per_sample: Vec::new() };
        for (h, t, w) in edges {
            if w > 0.0 && w >= cutoff {
                s.heads.push(h);
                s.tails.push(t);
                s.epochs_per_sample.push(w_max / w);
            }
        }
        s
    }

    pub(crate) fn len(&self) -> usize {
        self.heads.len()
    }

    /// How often edge `e` is sampled over `n_epochs`.
    #[cfg(test)]
    pub(crate) fn sample_count(&self, e: usize, n_epochs: usize) -> usize {
        let mut next = 0.0;
        let mut count = 0;
        for n in 0..n_epochs {
            if next <= n as f64 {
                count += 1;
                next += self.epochs_per_sample[e];
            }
        }
        count
    }
}

pub(crate) struct Kernel {
    pub a: f64,
    pub b: f64,
}

/// Runs `n_epochs` of SGD.
///
/// `head` holds the points being optimized and `tail` the points they are
/// attracted to and repelled from. With `tail = None` the two are the same
/// array and both ends of every positive edge move.
pub(crate) fn optimize(
    head: &mut [[f64; 2]],
    tail: Option<&[[f64; 2]]>,
    schedule: &EdgeSchedule,
    kernel: &Kernel,
    n_epochs: usize,
    initial_alpha: f64,
    negative_sample_rate: usize,
    rng: &mut ChaCha8Rng,
) {
    let n_tail = tail.map_or(head.len(), <[_]>::len);
    let move_other = tail.is_none();
    let (a, b) = (kernel.a, kernel.b);
    let m = schedule.len();
    let mut next_sample = vec![0.0f64; m];
    let epochs_per_negative: Vec<f64> = schedule
        .epochs_per_sample
        .iter()
        .map(|&e| e / negative_sample_rate.max(1) as f64)
        .collect();
    let mut next_negative = vec![0.0f64; m];

    for epoch in 0..n_epochs {
        let alpha = initial_alpha * (1.0 - epoch as f64 / n_epochs as f64);
        let now = epoch as f64;
        for e in 0..m {
            if next_sample[e] > now {
                continue;
            }
            let j = schedule.heads[e];
            let k = schedule.tails[e];
            let current = head[j];
            let other = match tail {
                Some(t) => t[k],
                None => head[k],
            };
            let d2 = sq_dist(current, other);
            let coeff = if d2 > 0.0 {
                -2.0 * a * b * d2.powf(b - 1.0) / (a * d2.powf(b) + 1.0)
            } else {
                0.0
            };
            for d in 0..2 {
                let g = clip(coeff * (current[d] - other[d]));
                head[j][d] += g * alpha;
                if move_other {
                    head[k][d] -= g * alpha;
                }
            }
            next_sample[e] += schedule.epochs_per_sample[e];

            if negative_sample_rate == 0 {
                continue;
            }
            let n_neg = ((now - next_negative[e]) / epochs_per_negative[e]).floor().max(0.0) as usize;
            for _ in 0..n_neg {
                let r = rng.random_range(0..n_tail);
                let current = head[j];
                let other = match tail {
                    Some(t) => t[r],
                    None => head[r],
                };
                let d2 = sq_dist(current, other);
                let coeff = if d2 > 0.0 {
                    2.0 * REPULSION * b / ((0.001 + d2) * (a * d2.powf(b) + 1.0))
                } else if move_other && r == j {
                    continue;
                } else {
                    0.0
                };
                for d in 0..2 {
                    let g = if coeff > 0.0 { clip(coeff * (current[d] - other[d])) } else { GRAD_CLIP };
                    head[j][d] += g * alpha;
                }
            }
            next_negative[e] += n_neg as f64 * epochs_per_negative[e];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sample_counts_follow_weight_ratio() {
        let n_epochs = 200;
        let s = EdgeSchedule::new(vec![(0, 1, 1.0), (1, 0, 0.5), (1, 2, 0.3), (2, 1, 0.001)], n_epochs);
        // the last edge falls under max / n_epochs and is dropped
        assert_eq!(s.len(), 3);
        for (e, w) in [(0usize, 1.0f64), (1, 0.5), (2, 0.3)] {
            let want = (n_epochs as f64 * w).ceil() as usize;
            let got = s.sample_count(e, n_epochs);
            assert!(got.abs_diff(want) <= 1, "edge {e}: {got} vs {want}");
        }
    }

    #[test]
    fn attraction_pulls_pair_together() {
        let mut coords = vec![[0.0, 0.0], [5.0, 0.0]];
        let s = EdgeSchedule::new(vec![(0, 1, 1.0), (1, 0, 1.0)], 50);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        optimize(&mut coords, None, &s, &Kernel { a: 1.577, b: 0.895 }, 50, 1.0, 0, &mut rng);
        assert!(sq_dist(coords[0], coords[1]) < 25.0);
    }

    #[test]
    fn frozen_tail_is_untouched() {
        let tail = vec![[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]];
        let mut head = vec![[3.0, 3.0]];
        let s = EdgeSchedule::new(vec![(0, 1, 1.0), (0, 2, 0.5)], 30);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let snapshot = tail.clone();
        optimize(&mut head, Some(&tail), &s, &Kernel { a: 1.577, b: 0.895 }, 30, 0.25, 5, &mut rng);
        assert_eq!(tail, snapshot);
        assert!(head[0][0].is_finite() && head[0][1].is_finite());
    }
}
