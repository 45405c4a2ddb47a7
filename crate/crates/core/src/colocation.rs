//! Global and local colocation quotients.
//!
//! The global quotient compares the share of type-B points among type-A
//! points' nearest neighbors against the share expected under random
//! labeling. The local variant evaluates the same ratio per A point with
//! kernel weights over an adaptive (k-nearest-neighbor) bandwidth, so the
//! neighbor count stays fixed while the metric radius floats.
//!
//! Values are dimensionless: 1 is the random-labeling expectation, above 1
//! attraction, below 1 isolation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::PValue;
use crate::metric::{DistanceIndex, IndexedNeighbors, MetricConfig, MetricKind};
use crate::point_data::PointSet;

/// Kernel used to weight neighbors inside the adaptive bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `exp(-0.5 * d^2 / bandwidth^2)`; never zero, so farther neighbors
    /// still contribute a little.
    Gaussian,
    /// Every in-bandwidth neighbor counts as one, regardless of distance.
    Box,
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Gaussian => write!(f, "gaussian"),
            Kernel::Box => write!(f, "box"),
        }
    }
}

/// Weight of a neighbor at distance `d_ij` under bandwidth `d_ib`.
///
/// A zero bandwidth (all k neighbors coincident with the origin) is the
/// equal-distance limit, so every weight degenerates to 1.
pub fn kernel_weight(d_ij: f64, d_ib: f64, kernel: Kernel) -> f64 {
    match kernel {
        Kernel::Box => 1.0,
        Kernel::Gaussian => {
            if d_ib == 0.0 {
                1.0
            } else {
                (-0.5 * (d_ij * d_ij) / (d_ib * d_ib)).exp()
            }
        }
    }
}

/// Result of a global colocation quotient computation.
#[derive(Debug, Clone)]
pub struct ClqResult {
    pub a_category: String,
    pub b_category: String,
    /// The quotient; >= 0, with 1 the random-labeling expectation.
    pub value: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub n_total: usize,
    pub bandwidth_k: usize,
    pub metric: MetricKind,
    /// Present after a significance test.
    pub p_value: Option<PValue>,
}

/// Per-point local colocation quotient row.
#[derive(Debug, Clone)]
pub struct LclqRecord {
    pub point_id: u64,
    pub a_category: String,
    pub b_category: String,
    /// The local quotient; >= 0.
    pub value: f64,
    /// Present after a significance test; within (0, 1].
    pub p_value: Option<f64>,
    /// `p_value <= alpha`, when tested.
    pub significant: Option<bool>,
    pub bandwidth_k: usize,
    pub metric: MetricKind,
    pub kernel: Kernel,
}

/// Share of type-b points among a tie-expanded neighbor set, each neighbor
/// weighted equally (the global quotient's nearest-neighbor count for one
/// origin).
pub(crate) fn equal_weight_b_share(entries: &[(usize, f64)], codes: &[u32], b_code: u32) -> f64 {
    let hits = entries.iter().filter(|&&(j, _)| codes[j] == b_code).count();
    hits as f64 / entries.len() as f64
}

/// Kernel-weighted share of type-b points among a neighbor set: the
/// weighted average of the binary type indicator, always within [0, 1].
pub(crate) fn weighted_b_share(
    neighbors: &IndexedNeighbors,
    codes: &[u32],
    b_code: u32,
    kernel: Kernel,
) -> f64 {
    let mut w_sum = 0.0;
    let mut w_b = 0.0;
    for &(j, d) in &neighbors.entries {
        let w = kernel_weight(d, neighbors.bandwidth, kernel);
        w_sum += w;
        if codes[j] == b_code {
            w_b += w;
        }
    }
    w_b / w_sum
}

/// Global quotient from precomputed neighbor sets and a label assignment.
/// `lists` must contain the neighbor set of every point that may carry
/// category `a_code` under `codes`.
pub(crate) fn global_clq_value(
    lists: &[IndexedNeighbors],
    codes: &[u32],
    a_code: u32,
    b_code: u32,
    n: usize,
    n_b: usize,
) -> f64 {
    let mut n_ab = 0.0;
    let mut n_a = 0usize;
    for list in lists {
        if codes[list.origin] != a_code {
            continue;
        }
        n_a += 1;
        n_ab += equal_weight_b_share(&list.entries, codes, b_code);
    }
    let n_b_eff = if a_code == b_code { n_b - 1 } else { n_b };
    (n_ab / n_a as f64) / (n_b_eff as f64 / (n - 1) as f64)
}

/// Local quotient for one origin's neighbor set under a label assignment.
pub(crate) fn lclq_value(
    neighbors: &IndexedNeighbors,
    codes: &[u32],
    b_code: u32,
    kernel: Kernel,
    n: usize,
    n_b_eff: usize,
) -> f64 {
    weighted_b_share(neighbors, codes, b_code, kernel) * (n - 1) as f64 / n_b_eff as f64
}

pub(crate) fn validate_pair(points: &PointSet, a: &str, b: &str) -> Result<(u32, u32)> {
    let a_code = points.require_category(a)?;
    let b_code = points.require_category(b)?;
    if a == b && points.count_of(a) < 2 {
        return Err(Error::InvalidParameter(format!(
            "self-colocation of {a:?} needs at least 2 points of that category"
        )));
    }
    Ok((a_code, b_code))
}

/// Effective B count for the expected-share denominator: the origin's own
/// label is never an eligible neighbor, so a B origin sees one fewer B.
pub(crate) fn effective_b_count(points: &PointSet, origin_code: u32, b_code: u32) -> Result<usize> {
    let n_b = points.count_of(points.category_name(b_code));
    let n_b_eff = if origin_code == b_code { n_b - 1 } else { n_b };
    if n_b_eff == 0 {
        return Err(Error::InvalidParameter(
            "no eligible type-b neighbors: the only b point is the origin itself".into(),
        ));
    }
    Ok(n_b_eff)
}

/// Global colocation quotient of category `a` toward category `b` with an
/// adaptive bandwidth of `k` nearest neighbors.
pub fn global_clq(
    points: &PointSet,
    a: &str,
    b: &str,
    k: usize,
    metric: &MetricConfig,
) -> Result<ClqResult> {
    let (a_code, b_code) = validate_pair(points, a, b)?;
    if points.len() < 2 {
        return Err(Error::NoEligibleNeighbors);
    }
    let index = DistanceIndex::build(points, metric)?;
    let lists = neighbor_lists_for(&index, &points.positions_with_code(a_code), k)?;
    let value = global_clq_value(
        &lists,
        points.codes(),
        a_code,
        b_code,
        points.len(),
        points.count_of(b),
    );
    Ok(ClqResult {
        a_category: a.to_string(),
        b_category: b.to_string(),
        value,
        n_a: points.count_of(a),
        n_b: points.count_of(b),
        n_total: points.len(),
        bandwidth_k: k,
        metric: metric.kind,
        p_value: None,
    })
}

/// Local colocation quotient of one origin point toward category `b`.
pub fn lclq(
    points: &PointSet,
    origin_id: u64,
    b: &str,
    k: usize,
    metric: &MetricConfig,
    kernel: Kernel,
) -> Result<LclqRecord> {
    let position = points
        .position_of(origin_id)
        .ok_or(Error::PointNotFound(origin_id))?;
    let b_code = points.require_category(b)?;
    let index = DistanceIndex::build(points, metric)?;
    lclq_at(points, &index, position, b_code, k, metric.kind, kernel)
}

fn lclq_at(
    points: &PointSet,
    index: &DistanceIndex,
    position: usize,
    b_code: u32,
    k: usize,
    metric: MetricKind,
    kernel: Kernel,
) -> Result<LclqRecord> {
    let neighbors = index.knn_indexed(position, k)?;
    let origin_code = points.codes()[position];
    let n_b_eff = effective_b_count(points, origin_code, b_code)?;
    let value = lclq_value(
        &neighbors,
        points.codes(),
        b_code,
        kernel,
        points.len(),
        n_b_eff,
    );
    let origin = points.point(position);
    Ok(LclqRecord {
        point_id: origin.id,
        a_category: origin.category.clone(),
        b_category: points.category_name(b_code).to_string(),
        value,
        p_value: None,
        significant: None,
        bandwidth_k: k,
        metric,
        kernel,
    })
}

/// Local quotients for every point of category `a`, in input order.
///
/// Neighbor searches run in parallel; output order is the input order of the
/// A points regardless of scheduling.
pub fn lclq_all(
    points: &PointSet,
    a: &str,
    b: &str,
    k: usize,
    metric: &MetricConfig,
    kernel: Kernel,
) -> Result<Vec<LclqRecord>> {
    let (a_code, b_code) = validate_pair(points, a, b)?;
    if points.len() < 2 {
        return Err(Error::NoEligibleNeighbors);
    }
    let index = DistanceIndex::build(points, metric)?;
    points
        .positions_with_code(a_code)
        .into_par_iter()
        .map(|pos| lclq_at(points, &index, pos, b_code, k, metric.kind, kernel))
        .collect()
}

/// Neighbor sets for the given positions, computed in parallel.
pub(crate) fn neighbor_lists_for(
    index: &DistanceIndex,
    positions: &[usize],
    k: usize,
) -> Result<Vec<IndexedNeighbors>> {
    positions
        .par_iter()
        .map(|&pos| index.knn_indexed(pos, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_data::SpatialPoint;

    fn pt(id: u64, x: f64, y: f64, cat: &str) -> SpatialPoint {
        SpatialPoint::new(id, x, y, cat)
    }

    #[test]
    fn gaussian_weight_reference_values() {
        assert_eq!(kernel_weight(0.0, 10.0, Kernel::Gaussian), 1.0);
        assert!((kernel_weight(10.0, 10.0, Kernel::Gaussian) - 0.6065306597126334).abs() < 1e-12);
        assert!((kernel_weight(20.0, 10.0, Kernel::Gaussian) - 0.1353352832366127).abs() < 1e-12);
    }

    #[test]
    fn box_weight_is_flat() {
        assert_eq!(kernel_weight(0.0, 10.0, Kernel::Box), 1.0);
        assert_eq!(kernel_weight(10.0, 10.0, Kernel::Box), 1.0);
    }

    #[test]
    fn zero_bandwidth_degenerates_to_equal_weights() {
        assert_eq!(kernel_weight(0.0, 0.0, Kernel::Gaussian), 1.0);
    }

    #[test]
    fn segregated_pairs_give_zero() {
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "A"),
            pt(1, 1.0, 0.0, "A"),
            pt(2, 10.0, 0.0, "B"),
            pt(3, 11.0, 0.0, "B"),
        ])
        .unwrap();
        let r = global_clq(&ps, "A", "B", 1, &MetricConfig::euclidean()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.n_a, 2);
        assert_eq!(r.n_b, 2);
        assert_eq!(r.n_total, 4);
    }

    #[test]
    fn alternating_line_with_tie_expansion() {
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "A"),
            pt(1, 1.0, 0.0, "B"),
            pt(2, 2.0, 0.0, "A"),
            pt(3, 3.0, 0.0, "B"),
        ])
        .unwrap();
        let r = global_clq(&ps, "A", "B", 1, &MetricConfig::euclidean()).unwrap();
        assert!((r.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn missing_category_errors() {
        let ps = PointSet::new(vec![pt(0, 0.0, 0.0, "A"), pt(1, 1.0, 0.0, "B")]).unwrap();
        assert!(matches!(
            global_clq(&ps, "A", "Z", 1, &MetricConfig::euclidean()).unwrap_err(),
            Error::CategoryNotFound(_)
        ));
    }

    #[test]
    fn self_colocation_needs_two_points() {
        let ps = PointSet::new(vec![pt(0, 0.0, 0.0, "A"), pt(1, 1.0, 0.0, "B")]).unwrap();
        assert!(global_clq(&ps, "A", "A", 1, &MetricConfig::euclidean()).is_err());
    }

    #[test]
    fn lclq_all_b_neighbors_hits_maximum() {
        // 10 points, 5 of type b; origin's 5 nearest are all b:
        // value = (N-1)/N_B = 9/5 = 1.8 for any kernel (weights cancel).
        let mut pts = vec![pt(0, 0.0, 0.0, "a")];
        for i in 0..5 {
            pts.push(pt(1 + i, 1.0 + 0.1 * i as f64, 0.0, "b"));
        }
        for i in 0..4 {
            pts.push(pt(6 + i, 100.0 + i as f64, 50.0, "c"));
        }
        let ps = PointSet::new(pts).unwrap();
        for kernel in [Kernel::Gaussian, Kernel::Box] {
            let r = lclq(&ps, 0, "b", 5, &MetricConfig::euclidean(), kernel).unwrap();
            assert!((r.value - 1.8).abs() < 1e-12, "kernel {kernel}");
        }
    }

    #[test]
    fn lclq_without_b_neighbors_is_zero() {
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "a"),
            pt(1, 1.0, 0.0, "a"),
            pt(2, 50.0, 0.0, "b"),
        ])
        .unwrap();
        let r = lclq(&ps, 0, "b", 1, &MetricConfig::euclidean(), Kernel::Gaussian).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn lclq_equidistant_mixed_pair_box_kernel() {
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "a"),
            pt(1, 0.0, 1.0, "b"),
            pt(2, 1.0, 0.0, "c"),
        ])
        .unwrap();
        let r = lclq(&ps, 0, "b", 1, &MetricConfig::euclidean(), Kernel::Box).unwrap();
        // share 0.5, times (N-1)/N_B = 2/1
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lclq_all_emits_one_record_per_a_point_in_order() {
        let ps = PointSet::new(vec![
            pt(3, 0.0, 0.0, "A"),
            pt(1, 5.0, 0.0, "B"),
            pt(7, 1.0, 0.0, "A"),
        ])
        .unwrap();
        let rs = lclq_all(&ps, "A", "B", 1, &MetricConfig::euclidean(), Kernel::Box).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].point_id, 3);
        assert_eq!(rs[1].point_id, 7);
    }

    #[test]
    fn symmetric_geometry_gives_equal_values() {
        // A points at square corners, B at the center: identical composition.
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "A"),
            pt(1, 2.0, 0.0, "A"),
            pt(2, 0.0, 2.0, "A"),
            pt(3, 2.0, 2.0, "A"),
            pt(4, 1.0, 1.0, "B"),
        ])
        .unwrap();
        let rs = lclq_all(
            &ps,
            "A",
            "B",
            1,
            &MetricConfig::euclidean(),
            Kernel::Gaussian,
        )
        .unwrap();
        for r in &rs {
            assert_eq!(r.value, rs[0].value);
        }
    }

    #[test]
    fn mean_lclq_equals_global_clq_for_box_k1_no_ties() {
        // irregular spacing so k=1 has no ties
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "A"),
            pt(1, 1.0, 0.3, "B"),
            pt(2, 3.1, 0.0, "A"),
            pt(3, 3.9, 0.2, "A"),
            pt(4, 7.3, 0.1, "B"),
            pt(5, 7.9, 0.0, "B"),
            pt(6, 11.4, 0.4, "A"),
        ])
        .unwrap();
        let cfg = MetricConfig::euclidean();
        let global = global_clq(&ps, "A", "B", 1, &cfg).unwrap().value;
        let locals = lclq_all(&ps, "A", "B", 1, &cfg, Kernel::Box).unwrap();
        let mean = locals.iter().map(|r| r.value).sum::<f64>() / locals.len() as f64;
        assert!((mean - global).abs() < 1e-12);
    }

    #[test]
    fn lclq_all_matches_pointwise_calls() {
        let mut pts = Vec::new();
        let mut v = 5u64;
        for id in 0..50u64 {
            v = v
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x = ((v >> 16) % 1000) as f64 / 10.0;
            v = v
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let y = ((v >> 16) % 1000) as f64 / 10.0;
            let cat = if id % 3 == 0 { "B" } else { "A" };
            pts.push(pt(id, x, y, cat));
        }
        let ps = PointSet::new(pts).unwrap();
        let cfg = MetricConfig::euclidean();
        let all = lclq_all(&ps, "A", "B", 7, &cfg, Kernel::Gaussian).unwrap();
        for r in &all {
            let single = lclq(&ps, r.point_id, "B", 7, &cfg, Kernel::Gaussian).unwrap();
            assert_eq!(single.value, r.value);
        }
    }
}
