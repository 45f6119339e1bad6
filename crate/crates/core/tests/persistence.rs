use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xmanifold::geometry::hausdorff;
use xmanifold::topology::{bottleneck, rips_persistence, RipsParams};
use xmanifold::Embedding2D;

fn cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 2]> {
    (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
}

/// 50 pairs `(X, X + noise)` with per-coordinate noise up to a random `delta <= 0.05`.
fn perturbation_pairs() -> Vec<(Embedding2D<f64>, Embedding2D<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..50)
        .map(|_| {
            let n = rng.random_range(8..40);
            let x = cloud(&mut rng, n);
            let delta = rng.random_range(0.001..0.05);
            let y = x
                .iter()
                .map(|p| [p[0] + rng.random_range(-delta..delta), p[1] + rng.random_range(-delta..delta)])
                .collect();
            (Embedding2D::new(x).unwrap(), Embedding2D::new(y).unwrap())
        })
        .collect()
}

#[test]
fn stability_under_perturbation() {
    let full = RipsParams::new(f64::INFINITY);
    let mut literal = [0usize; 2];
    for (x, y) in perturbation_pairs() {
        let h = hausdorff(&x, &y).unwrap().symmetric;
        let (x0, x1) = rips_persistence(&x, &full).unwrap();
        let (y0, y1) = rips_persistence(&y, &full).unwrap();
        for (k, (a, b)) in [(x0, y0), (x1, y1)].into_iter().enumerate() {
            let db = bottleneck(&a, &b).unwrap();
            // Edge lengths are diameters, so the guaranteed bound is twice the Hausdorff distance.
            assert!(db <= 2.0 * h + 1e-12, "H{k}: bottleneck {db} > 2h = {}", 2.0 * h);
            literal[k] += usize::from(db <= h + 1e-12);
        }
    }
    println!("bottleneck <= h: H0 {}/50, H1 {}/50", literal[0], literal[1]);
}

#[test]
fn two_points_pulled_apart_move_the_diagram_by_twice_the_hausdorff_distance() {
    let d = 0.1;
    let x = Embedding2D::from_xy(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
    let y = Embedding2D::from_xy(&[(-d, 0.0), (1.0 + d, 0.0)]).unwrap();
    let h = hausdorff(&x, &y).unwrap().symmetric;
    let full = RipsParams::new(f64::INFINITY);
    let (x0, _) = rips_persistence(&x, &full).unwrap();
    let (y0, _) = rips_persistence(&y, &full).unwrap();
    let db = bottleneck(&x0, &y0).unwrap();
    assert!((h - d).abs() < 1e-12);
    assert!((db - 2.0 * d).abs() < 1e-12);
}

#[test]
fn h0_bar_count_matches_point_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let n = rng.random_range(2..120);
        let e = Embedding2D::new(cloud(&mut rng, n)).unwrap();
        let (h0, _) = rips_persistence(&e, &RipsParams::new(2.0)).unwrap();
        assert_eq!(h0.bar_count(), n);
        assert_eq!(h0.essential(), 1);
    }
}

#[test]
fn full_size_subsampled_run_is_fast_enough() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let e = Embedding2D::new(cloud(&mut rng, 600)).unwrap();
    let start = Instant::now();
    let (h0, h1) = rips_persistence(&e, &RipsParams::new(0.25)).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(h0.bar_count(), 512);
    println!("512 points, R=0.25: {} H1 pairs, {:?}", h1.pairs.len(), elapsed);
    assert!(elapsed.as_secs_f64() < 30.0);
}
