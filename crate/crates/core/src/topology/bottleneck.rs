use std::cmp::Ordering;
use std::collections::VecDeque;

use super::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
fn linf<T: Real>(p: (T, T), q: (T, T)) -> T {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

#[inline]
fn to_diagonal<T: Real>(p: (T, T)) -> T {
    (p.1 - p.0) / T::two()
}

/// Bipartite graph on `left = A ∪ Δ(B)`, `right = B ∪ Δ(A)` at a fixed radius.
struct Matching<'a, T> {
    a: &'a [(T, T)],
    b: &'a [(T, T)],
}

const NIL: usize = usize::MAX;

impl<T: Real> Matching<'_, T> {
    fn adjacency(&self, r: T) -> Vec<Vec<usize>> {
        let (m, n) = (self.a.len(), self.b.len());
        let mut adj = vec![Vec::new(); m + n];
        for (i, &p) in self.a.iter().enumerate() {
            for (j, &q) in self.b.iter().enumerate() {
                if linf(p, q) <= r {
                    adj[i].push(j);
                }
            }
            if to_diagonal(p) <= r {
                adj[i].push(n + i);
            }
        }
        for (j, &q) in self.b.iter().enumerate() {
            let row = &mut adj[m + j];
            if to_diagonal(q) <= r {
                row.push(j);
            }
            row.extend(n..n + m);
        }
        adj
    }

    /// Hopcroft–Karp maximum matching size.
    fn perfect(&self, r: T) -> bool {
        let size = self.a.len() + self.b.len();
        let adj = self.adjacency(r);
        let mut match_l = vec![NIL; size];
        let mut match_r = vec![NIL; size];
        let mut dist = vec![0usize; size];
        let mut matched = 0;
        loop {
            let mut queue = VecDeque::new();
            for u in 0..size {
                if match_l[u] == NIL {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = usize::MAX;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    let w = match_r[v];
                    if w == NIL {
                        found = true;
                    } else if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if !found {
                break;
            }
            let mut next = vec![0usize; size];
            for u in 0..size {
                if match_l[u] == NIL && augment(u, &adj, &mut match_l, &mut match_r, &mut dist, &mut next) {
                    matched += 1;
                }
            }
        }
        matched == size
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    // Iterative DFS along the BFS layering.
    let mut stack = vec![u];
    let mut path: Vec<(usize, usize)> = Vec::new();
    while let Some(&x) = stack.last() {
        if next[x] >= adj[x].len() {
            dist[x] = usize::MAX;
            stack.pop();
            path.pop();
            continue;
        }
        let v = adj[x][next[x]];
        next[x] += 1;
        let w = match_r[v];
        if w == NIL {
            path.push((x, v));
            for &(l, r) in &path {
                match_l[l] = r;
                match_r[r] = l;
            }
            return true;
        }
        if dist[w] == dist[x].wrapping_add(1) {
            path.push((x, v));
            stack.push(w);
        }
    }
    false
}

/// Bottleneck distance between the finite parts of two diagrams of the same
/// dimension, with `L∞` ground cost and matches to the diagonal allowed.
/// Essential classes are ignored.
pub fn bottleneck<T: Real>(d1: &PersistenceDiagram<T>, d2: &PersistenceDiagram<T>) -> Result<T> {
    if d1.dim != d2.dim {
        return Err(Error::DimensionMismatch { left: d1.dim as usize, right: d2.dim as usize });
    }
    let (a, b) = (&d1.pairs[..], &d2.pairs[..]);
    if a.is_empty() && b.is_empty() {
        return Ok(T::zero());
    }
    let mut candidates = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(T::zero());
    for &p in a {
        candidates.extend(b.iter().map(|&q| linf(p, q)));
    }
    candidates.extend(a.iter().chain(b).map(|&p| to_diagonal(p)));
    candidates.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    candidates.dedup();

    let g = Matching { a, b };
    // The largest diagonal cost is always feasible.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if g.perfect(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dgm(p: &[(f64, f64)]) -> PersistenceDiagram<f64> {
        PersistenceDiagram::new(1, p.to_vec())
    }

    /// Minimum over all partial injections `A -> B`, unmatched points to the diagonal.
    fn exhaustive(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        fn rec(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, worst: f64, best: &mut f64) {
            if worst >= *best {
                return;
            }
            if i == a.len() {
                let mut w = worst;
                for (j, q) in b.iter().enumerate() {
                    if !used[j] {
                        w = w.max((q.1 - q.0) / 2.0);
                    }
                }
                *best = best.min(w);
                return;
            }
            let p = a[i];
            rec(i + 1, a, b, used, worst.max((p.1 - p.0) / 2.0), best);
            for j in 0..b.len() {
                if !used[j] {
                    used[j] = true;
                    let c = (p.0 - b[j].0).abs().max((p.1 - b[j].1).abs());
                    rec(i + 1, a, b, used, worst.max(c), best);
                    used[j] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
        best
    }

    fn pairs(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0..1.0f64, 0.0..1.0f64).prop_map(|(b, l)| (b, b + l)), 0..=max)
    }

    #[test]
    fn worked_examples() {
        let one = dgm(&[(0.0, 2.0)]);
        assert_eq!(bottleneck(&one, &dgm(&[])).unwrap(), 1.0);
        assert_eq!(bottleneck(&one, &dgm(&[(0.5, 2.5)])).unwrap(), 0.5);
        assert_eq!(bottleneck(&one, &one).unwrap(), 0.0);
        assert_eq!(bottleneck(&dgm(&[]), &dgm(&[])).unwrap(), 0.0);
    }

    #[test]
    fn small_oracle_cases() {
        let a = [(0.0, 1.0), (0.2, 0.9)];
        let b = [(0.1, 1.05), (0.6, 0.62), (0.3, 0.95)];
        assert_eq!(bottleneck(&dgm(&a), &dgm(&b)).unwrap(), exhaustive(&a, &b));
    }

    #[test]
    fn dimension_mismatch() {
        let h0 = PersistenceDiagram::new(0, vec![(0.0, 1.0)]);
        assert!(matches!(bottleneck(&h0, &dgm(&[])), Err(Error::DimensionMismatch { left: 0, right: 1 })));
    }

    #[test]
    fn essential_classes_ignored() {
        let a = dgm(&[(0.0, 1.0)]).with_essential(vec![0.1, 0.2]);
        assert_eq!(bottleneck(&a, &dgm(&[(0.0, 1.0)])).unwrap(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn equals_exhaustive_matching(a in pairs(6), b in pairs(6)) {
            prop_assume!(a.len() + b.len() <= 6);
            prop_assert_eq!(bottleneck(&dgm(&a), &dgm(&b)).unwrap(), exhaustive(&a, &b));
        }

        #[test]
        fn metric_properties(a in pairs(8), b in pairs(8), c in pairs(8)) {
            let (da, db, dc) = (dgm(&a), dgm(&b), dgm(&c));
            let ab = bottleneck(&da, &db).unwrap();
            prop_assert_eq!(ab, bottleneck(&db, &da).unwrap());
            prop_assert_eq!(bottleneck(&da, &da).unwrap(), 0.0);
            let ac = bottleneck(&da, &dc).unwrap();
            let cb = bottleneck(&dc, &db).unwrap();
            prop_assert!(ab <= ac + cb + 1e-9);
        }
    }
}
