//! Property tests for the metric and quotient invariants.

use std::sync::Arc;

use colocate::colocation::{global_clq, lclq_all, Kernel};
use colocate::metric::{pairwise_distance, DistanceIndex, MetricConfig};
use colocate::point_data::{snap_points, PointSet, SpatialPoint};
use colocate_testkit::fixtures;
use proptest::prelude::*;

/// Points on a coarse lattice so distance ties actually occur.
fn lattice_points(n: usize) -> impl Strategy<Value = PointSet> {
    proptest::collection::vec((0i32..12, 0i32..12, 0u8..2), n..n * 2).prop_map(|raw| {
        let points = raw
            .into_iter()
            .enumerate()
            .map(|(i, (x, y, c))| {
                SpatialPoint::new(i as u64, x as f64, y as f64, if c == 0 { "A" } else { "B" })
            })
            .collect();
        PointSet::new(points).expect("valid")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn euclidean_knn_matches_brute_force(points in lattice_points(12), k in 1usize..8) {
        prop_assume!(points.count_of("A") >= 1 && points.count_of("B") >= 1);
        let index = DistanceIndex::build(&points, &MetricConfig::euclidean()).unwrap();
        let ids: Vec<u64> = points.points().iter().map(|p| p.id).collect();
        for origin in 0..points.len() {
            let got = index.knn_indexed(origin, k).unwrap();
            let o = points.point(origin);
            let mut all: Vec<(usize, f64)> = points
                .points()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != origin)
                .map(|(j, p)| (j, ((p.x - o.x).powi(2) + (p.y - o.y).powi(2)).sqrt()))
                .collect();
            all.sort_by(|x, y| x.1.total_cmp(&y.1).then(ids[x.0].cmp(&ids[y.0])));
            let effective_k = k.min(all.len());
            let kth = all[effective_k - 1].1;
            let expected: Vec<(usize, f64)> = all.into_iter().take_while(|&(_, d)| d <= kth).collect();
            prop_assert_eq!(&got.entries, &expected);
            prop_assert!(got.entries.len() >= effective_k);
            prop_assert_eq!(got.bandwidth, kth);
            // distances non-decreasing, origin excluded
            for w in got.entries.windows(2) {
                prop_assert!(w[1].1 >= w[0].1);
            }
            prop_assert!(got.entries.iter().all(|&(j, _)| j != origin));
        }
    }

    // Tie groups survive rescaling only when the scale is exact in binary
    // floating point, so lattice geometries (full of exact ties) get
    // power-of-two factors; tie-free continuous geometries get arbitrary ones.
    #[test]
    fn quotients_are_scale_invariant_on_tied_lattices(
        points in lattice_points(14),
        exp in -4i32..6,
        k in 1usize..6,
    ) {
        prop_assume!(points.count_of("A") >= 1 && points.count_of("B") >= 1);
        let c = 2.0f64.powi(exp);
        let scaled = PointSet::new(
            points
                .points()
                .iter()
                .map(|p| SpatialPoint::new(p.id, p.x * c, p.y * c, p.category.clone()))
                .collect(),
        )
        .unwrap();
        let cfg = MetricConfig::euclidean();
        let base = global_clq(&points, "A", "B", k, &cfg).unwrap().value;
        let after = global_clq(&scaled, "A", "B", k, &cfg).unwrap().value;
        prop_assert!((base - after).abs() <= 1e-12 * base.abs().max(1.0));

        let base = lclq_all(&points, "A", "B", k, &cfg, Kernel::Gaussian).unwrap();
        let after = lclq_all(&scaled, "A", "B", k, &cfg, Kernel::Gaussian).unwrap();
        for (x, y) in base.iter().zip(&after) {
            prop_assert!((x.value - y.value).abs() <= 1e-12 * x.value.abs().max(1.0));
        }
    }

    #[test]
    fn quotients_are_scale_invariant_off_lattice(
        coords in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0, 0u8..2), 10..20),
        c in 0.05f64..50.0,
        k in 1usize..6,
    ) {
        let points = PointSet::new(
            coords
                .iter()
                .enumerate()
                .map(|(i, &(x, y, cat))| {
                    SpatialPoint::new(i as u64, x, y, if cat == 0 { "A" } else { "B" })
                })
                .collect(),
        )
        .unwrap();
        prop_assume!(points.count_of("A") >= 1 && points.count_of("B") >= 1);
        let scaled = PointSet::new(
            points
                .points()
                .iter()
                .map(|p| SpatialPoint::new(p.id, p.x * c, p.y * c, p.category.clone()))
                .collect(),
        )
        .unwrap();
        let cfg = MetricConfig::euclidean();
        let base = global_clq(&points, "A", "B", k, &cfg).unwrap().value;
        let after = global_clq(&scaled, "A", "B", k, &cfg).unwrap().value;
        prop_assert!((base - after).abs() <= 1e-9 * base.abs().max(1.0));

        let base = lclq_all(&points, "A", "B", k, &cfg, Kernel::Gaussian).unwrap();
        let after = lclq_all(&scaled, "A", "B", k, &cfg, Kernel::Gaussian).unwrap();
        for (x, y) in base.iter().zip(&after) {
            prop_assert!((x.value - y.value).abs() <= 1e-9 * x.value.abs().max(1.0));
        }
    }

    #[test]
    fn lclq_values_respect_their_bound(points in lattice_points(14), k in 1usize..6) {
        prop_assume!(points.count_of("A") >= 1 && points.count_of("B") >= 1);
        let n = points.len();
        let n_b = points.count_of("B");
        for kernel in [Kernel::Gaussian, Kernel::Box] {
            let records = lclq_all(&points, "A", "B", k, &MetricConfig::euclidean(), kernel).unwrap();
            let bound = (n - 1) as f64 / n_b as f64;
            for r in records {
                prop_assert!(r.value >= 0.0);
                prop_assert!(r.value <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn exchanging_same_category_points_changes_nothing(points in lattice_points(14), k in 1usize..5) {
        let b_positions = points.positions_with_code(points.code_of("B").unwrap_or(0));
        prop_assume!(points.count_of("A") >= 1 && b_positions.len() >= 2);
        let mut swapped: Vec<SpatialPoint> = points.points().to_vec();
        let (i, j) = (b_positions[0], b_positions[1]);
        let (xi, yi) = (swapped[i].x, swapped[i].y);
        swapped[i].x = swapped[j].x;
        swapped[i].y = swapped[j].y;
        swapped[j].x = xi;
        swapped[j].y = yi;
        let swapped = PointSet::new(swapped).unwrap();
        let cfg = MetricConfig::euclidean();
        let base = global_clq(&points, "A", "B", k, &cfg).unwrap().value;
        let after = global_clq(&swapped, "A", "B", k, &cfg).unwrap().value;
        prop_assert!((base - after).abs() <= 1e-9 * base.abs().max(1.0));
    }

    #[test]
    fn network_distance_dominates_euclidean_minus_snaps(
        seed in 0u64..500,
        ax in 0.0f64..100.0, ay in -30.0f64..130.0,
        bx in 0.0f64..100.0, by in -30.0f64..130.0,
    ) {
        let net = Arc::new(fixtures::jittered_grid_network(5, 5, 25.0, 5.0, seed));
        let cfg = MetricConfig::network(net.clone());
        let a = SpatialPoint::new(0, ax, ay, "A");
        let b = SpatialPoint::new(1, bx, by, "B");
        let d_net = pairwise_distance(&a, &b, &cfg).unwrap();
        let d_euc = pairwise_distance(&a, &b, &MetricConfig::euclidean()).unwrap();
        let ps = PointSet::new(vec![a, b]).unwrap();
        let (snapped, _) = snap_points(&ps, &net, f64::INFINITY).unwrap();
        let slack = 2.0 * (snapped[0].snap_distance + snapped[1].snap_distance);
        prop_assert!(d_net >= d_euc - slack - 1e-9);
    }

    #[test]
    fn network_distance_is_symmetric_and_triangular(
        seed in 0u64..200,
        coords in proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), 3),
    ) {
        let net = Arc::new(fixtures::jittered_grid_network(5, 5, 25.0, 5.0, seed));
        let cfg = MetricConfig::network(net);
        let pts: Vec<SpatialPoint> = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| SpatialPoint::new(i as u64, x, y, "A"))
            .collect();
        let d = |i: usize, j: usize| pairwise_distance(&pts[i], &pts[j], &cfg).unwrap();
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-9 * d(0, 1).max(1.0));
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        prop_assert!(d(0, 1) >= 0.0);
    }

    #[test]
    fn neighbor_lists_are_deterministic(points in lattice_points(12), k in 1usize..6) {
        prop_assume!(points.len() >= 2);
        let cfg = MetricConfig::euclidean();
        let i1 = DistanceIndex::build(&points, &cfg).unwrap();
        let i2 = DistanceIndex::build(&points, &cfg).unwrap();
        for origin in 0..points.len() {
            let a = i1.knn(origin, k).unwrap();
            let b = i2.knn(origin, k).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
