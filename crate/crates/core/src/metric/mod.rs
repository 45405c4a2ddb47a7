//! Nearest-neighbor lists and pairwise distances under interchangeable
//! metrics: Euclidean (k-d tree accelerated) or street network (shortest
//! paths between snapped locations).
//!
//! Tie policy: when the k-th distance is shared by later points, the whole
//! tie group joins the neighbor set; within a group, order is ascending
//! point id. The bandwidth reported for a list stays the rank-k distance.
//! A point never neighbors itself, by id, so coincident points still see
//! each other at distance zero.

mod kdtree;
mod network_distance;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_data::{
    PointSet, RoadNetwork, SnappedPoint, SpatialPoint, DEFAULT_SNAP_WARN_METERS,
};

use kdtree::KdTree;
use network_distance::{snapped_pair_distance, NetworkEngine, Stop};

/// Which distance metric neighbor searches use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Network,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricKind::Euclidean => write!(f, "euclidean"),
            MetricKind::Network => write!(f, "network"),
        }
    }
}

/// Metric selection plus the road network required for network mode.
#[derive(Debug, Clone)]
pub struct MetricConfig {
    pub kind: MetricKind,
    pub network: Option<Arc<RoadNetwork>>,
    /// Snap distances above this many meters produce a warning.
    pub snap_warn_threshold: f64,
}

impl MetricConfig {
    pub fn euclidean() -> Self {
        Self {
            kind: MetricKind::Euclidean,
            network: None,
            snap_warn_threshold: DEFAULT_SNAP_WARN_METERS,
        }
    }

    pub fn network(net: Arc<RoadNetwork>) -> Self {
        Self {
            kind: MetricKind::Network,
            network: Some(net),
            snap_warn_threshold: DEFAULT_SNAP_WARN_METERS,
        }
    }

    fn require_network(&self) -> Result<&Arc<RoadNetwork>> {
        self.network
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("network metric requires a road network".into()))
    }
}

/// One neighbor of an origin point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: u64,
    pub distance: f64,
    /// 1-based competition rank; tied distances share a rank.
    pub rank: usize,
}

/// Ordered neighbors of one origin with the adaptive bandwidth distance.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub origin_id: u64,
    pub neighbors: Vec<Neighbor>,
    /// Distance to the rank-k neighbor (`d_ib`); ties beyond rank k share it.
    pub bandwidth: f64,
}

/// Neighbor set in point-position form for hot loops: parallel arrays of
/// `(position, distance)` sorted by `(distance, id)`.
#[derive(Debug, Clone)]
pub struct IndexedNeighbors {
    pub origin: usize,
    pub entries: Vec<(usize, f64)>,
    pub bandwidth: f64,
}

/// A reusable distance/neighbor query engine for one point set and metric.
///
/// Construction does all the expensive work (index build, snapping); queries
/// are read-only and safe to issue from any number of threads.
pub struct DistanceIndex<'a> {
    points: &'a PointSet,
    ids: Vec<u64>,
    backend: Backend,
    warnings: Vec<String>,
}

enum Backend {
    Euclidean(KdTree),
    Network(NetworkEngine),
}

impl<'a> DistanceIndex<'a> {
    pub fn build(points: &'a PointSet, config: &MetricConfig) -> Result<Self> {
        let ids: Vec<u64> = points.points().iter().map(|p| p.id).collect();
        match config.kind {
            MetricKind::Euclidean => {
                let coords: Vec<(f64, f64)> = points.points().iter().map(|p| (p.x, p.y)).collect();
                Ok(Self {
                    points,
                    ids,
                    backend: Backend::Euclidean(KdTree::build(&coords)),
                    warnings: Vec::new(),
                })
            }
            MetricKind::Network => {
                let net = config.require_network()?.clone();
                let (engine, warnings) =
                    NetworkEngine::build(points, net, config.snap_warn_threshold)?;
                Ok(Self {
                    points,
                    ids,
                    backend: Backend::Network(engine),
                    warnings,
                })
            }
        }
    }

    /// Snap warnings collected while building (network mode only).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Snapped locations, when the backend is the network.
    pub fn snapped(&self) -> Option<&[SnappedPoint]> {
        match &self.backend {
            Backend::Network(engine) => Some(engine.snapped()),
            Backend::Euclidean(_) => None,
        }
    }

    /// Tie-expanded k nearest neighbors of the point at `position`.
    pub fn knn_indexed(&self, position: usize, k: usize) -> Result<IndexedNeighbors> {
        let n = self.points.len();
        if k < 1 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if n < 2 {
            return Err(Error::NoEligibleNeighbors);
        }
        let effective_k = k.min(n - 1);
        let entries = match &self.backend {
            Backend::Euclidean(tree) => {
                let p = self.points.point(position);
                let origin = (p.x, p.y);
                let kth_d2 = tree
                    .kth_distance_sq(origin, effective_k, Some(position))
                    .expect("n >= 2 guarantees a neighbor");
                let mut found = Vec::with_capacity(effective_k + 4);
                tree.within_sq(origin, kth_d2, Some(position), &mut found);
                found.sort_by(|x, y| x.1.total_cmp(&y.1).then(self.ids[x.0].cmp(&self.ids[y.0])));
                found
                    .into_iter()
                    .map(|(i, d2)| (i, d2.sqrt()))
                    .collect::<Vec<_>>()
            }
            Backend::Network(engine) => engine.knn(position, k, &self.ids)?,
        };
        debug_assert!(entries.len() >= effective_k);
        let bandwidth = entries[effective_k - 1].1;
        Ok(IndexedNeighbors {
            origin: position,
            entries,
            bandwidth,
        })
    }

    /// Public neighbor list for the point at `position`.
    pub fn knn(&self, position: usize, k: usize) -> Result<NeighborList> {
        let indexed = self.knn_indexed(position, k)?;
        Ok(self.to_neighbor_list(&indexed))
    }

    fn to_neighbor_list(&self, indexed: &IndexedNeighbors) -> NeighborList {
        let mut neighbors = Vec::with_capacity(indexed.entries.len());
        let mut rank = 0;
        let mut last = f64::NEG_INFINITY;
        for (i, &(pos, d)) in indexed.entries.iter().enumerate() {
            if d != last {
                rank = i + 1;
                last = d;
            }
            neighbors.push(Neighbor {
                id: self.ids[pos],
                distance: d,
                rank,
            });
        }
        NeighborList {
            origin_id: self.ids[indexed.origin],
            neighbors,
            bandwidth: indexed.bandwidth,
        }
    }

    /// Distance between two member points; `f64::INFINITY` when disconnected
    /// in network mode.
    pub fn distance_between(&self, i: usize, j: usize) -> f64 {
        match &self.backend {
            Backend::Euclidean(_) => {
                let a = self.points.point(i);
                let b = self.points.point(j);
                ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
            }
            Backend::Network(engine) => engine.distance(i, j),
        }
    }

    /// All ordered pairs `(i, j, distance)` with `i != j` and distance <=
    /// `d_max`. Unreachable pairs in network mode are simply absent.
    pub fn pairs_within(&self, d_max: f64) -> Vec<(usize, usize, f64)> {
        let n = self.points.len();
        let mut out = Vec::new();
        match &self.backend {
            Backend::Euclidean(tree) => {
                let d2_max = d_max * d_max;
                let mut scratch = Vec::new();
                for i in 0..n {
                    let p = self.points.point(i);
                    scratch.clear();
                    tree.within_sq((p.x, p.y), d2_max, Some(i), &mut scratch);
                    out.extend(scratch.iter().map(|&(j, d2)| (i, j, d2.sqrt())));
                }
            }
            Backend::Network(engine) => {
                for i in 0..n {
                    let dists = engine.expand(i, Stop::Cutoff(d_max));
                    out.extend(
                        dists
                            .iter()
                            .enumerate()
                            .filter(|&(j, &d)| j != i && d <= d_max)
                            .map(|(j, &d)| (i, j, d)),
                    );
                }
            }
        }
        out
    }
}

/// A k-d tree over raw coordinates, for other modules' nearest-neighbor
/// needs (e.g. the nearest-neighbor index).
pub(crate) fn nearest_neighbor_tree(coords: &[(f64, f64)]) -> KdTree {
    KdTree::build(coords)
}

/// The k nearest neighbors of `origin` within `points` under `config`.
///
/// `origin` is matched (and excluded from its own candidates) by id.
pub fn knn(
    origin: &SpatialPoint,
    points: &PointSet,
    k: usize,
    config: &MetricConfig,
) -> Result<NeighborList> {
    let position = points
        .position_of(origin.id)
        .ok_or(Error::PointNotFound(origin.id))?;
    DistanceIndex::build(points, config)?.knn(position, k)
}

/// Distance between two arbitrary points under `config`.
///
/// Symmetric and non-negative. In network mode both points are snapped to
/// the network first; a disconnected pair yields `f64::INFINITY`, which the
/// caller can treat as a flag.
pub fn pairwise_distance(a: &SpatialPoint, b: &SpatialPoint, config: &MetricConfig) -> Result<f64> {
    match config.kind {
        MetricKind::Euclidean => Ok(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()),
        MetricKind::Network => {
            let net = config.require_network()?;
            if net.edge_count() == 0 {
                return Err(Error::InvalidNetwork("network has no edges".into()));
            }
            let snap = |p: &SpatialPoint| {
                let (edge, offset, snap_distance) = net.nearest_edge_point(p.x, p.y);
                SnappedPoint {
                    point_id: p.id,
                    edge,
                    offset,
                    snap_distance,
                }
            };
            Ok(snapped_pair_distance(net, &snap(a), &snap(b)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_data::SpatialPoint;

    fn pt(id: u64, x: f64, y: f64, cat: &str) -> SpatialPoint {
        SpatialPoint::new(id, x, y, cat)
    }

    #[test]
    fn knn_basic_single_neighbor() {
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "A"),
            pt(1, 1.0, 0.0, "B"),
            pt(2, 5.0, 0.0, "C"),
        ])
        .unwrap();
        let nl = knn(&ps.points()[0].clone(), &ps, 1, &MetricConfig::euclidean()).unwrap();
        assert_eq!(nl.neighbors.len(), 1);
        assert_eq!(nl.neighbors[0].id, 1);
        assert_eq!(nl.neighbors[0].distance, 1.0);
        assert_eq!(nl.bandwidth, 1.0);
    }

    #[test]
    fn knn_tie_group_expands() {
        let ps = PointSet::new(vec![
            pt(0, 0.0, 0.0, "A"),
            pt(1, 0.0, 1.0, "B"),
            pt(2, 1.0, 0.0, "C"),
        ])
        .unwrap();
        let nl = knn(&ps.points()[0].clone(), &ps, 1, &MetricConfig::euclidean()).unwrap();
        assert_eq!(nl.neighbors.len(), 2);
        // tie group ordered by ascending id, sharing rank 1
        assert_eq!(nl.neighbors[0].id, 1);
        assert_eq!(nl.neighbors[1].id, 2);
        assert_eq!(nl.neighbors[0].rank, 1);
        assert_eq!(nl.neighbors[1].rank, 1);
        assert_eq!(nl.bandwidth, 1.0);
    }

    #[test]
    fn knn_network_l_shape() {
        let net = RoadNetwork::new(
            vec![(0, 0.0, 0.0), (1, 3.0, 0.0), (2, 3.0, 4.0)],
            vec![(0, 1, 3.0), (1, 2, 4.0)],
        )
        .unwrap()
        .0;
        let ps = PointSet::new(vec![pt(0, 0.0, 0.0, "A"), pt(1, 3.0, 4.0, "B")]).unwrap();
        let nl = knn(
            &ps.points()[0].clone(),
            &ps,
            1,
            &MetricConfig::network(Arc::new(net)),
        )
        .unwrap();
        assert!((nl.neighbors[0].distance - 7.0).abs() < 1e-12);
    }

    #[test]
    fn knn_rejects_singleton_set() {
        let ps = PointSet::new(vec![pt(0, 0.0, 0.0, "A")]).unwrap();
        let err = knn(&ps.points()[0].clone(), &ps, 1, &MetricConfig::euclidean()).unwrap_err();
        assert!(matches!(err, Error::NoEligibleNeighbors));
    }

    #[test]
    fn coincident_neighbors_come_first_and_origin_is_excluded() {
        let ps = PointSet::new(vec![
            pt(0, 2.0, 2.0, "A"),
            pt(1, 2.0, 2.0, "B"),
            pt(2, 3.0, 2.0, "C"),
        ])
        .unwrap();
        let nl = knn(&ps.points()[0].clone(), &ps, 2, &MetricConfig::euclidean()).unwrap();
        assert_eq!(nl.neighbors[0].id, 1);
        assert_eq!(nl.neighbors[0].distance, 0.0);
        assert_eq!(nl.neighbors[1].id, 2);
    }

    #[test]
    fn pairwise_same_coordinates_is_zero() {
        let a = pt(0, 1.0, 1.0, "A");
        let b = pt(1, 1.0, 1.0, "B");
        assert_eq!(
            pairwise_distance(&a, &b, &MetricConfig::euclidean()).unwrap(),
            0.0
        );
    }

    #[test]
    fn pairwise_same_edge_offsets() {
        let net = RoadNetwork::new(vec![(0, 0.0, 0.0), (1, 10.0, 0.0)], vec![(0, 1, 10.0)])
            .unwrap()
            .0;
        let cfg = MetricConfig::network(Arc::new(net));
        let a = pt(0, 1.0, 0.0, "A");
        let b = pt(1, 2.5, 0.0, "B");
        let d = pairwise_distance(&a, &b, &cfg).unwrap();
        assert!((d - 1.5).abs() < 1e-12);
        let d_rev = pairwise_distance(&b, &a, &cfg).unwrap();
        assert_eq!(d, d_rev);
    }

    #[test]
    fn pairwise_disconnected_is_infinite() {
        let net = RoadNetwork::new(
            vec![(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 9.0, 9.0), (3, 10.0, 9.0)],
            vec![(0, 1, 1.0), (2, 3, 1.0)],
        )
        .unwrap()
        .0;
        let cfg = MetricConfig::network(Arc::new(net));
        let d = pairwise_distance(&pt(0, 0.0, 0.0, "A"), &pt(1, 9.5, 9.0, "B"), &cfg).unwrap();
        assert!(d.is_infinite());
    }

    #[test]
    fn indexed_knn_matches_brute_force_sort() {
        // dense cluster with duplicates to stress tie handling
        let mut pts = Vec::new();
        let mut v = 17u64;
        for id in 0..200u64 {
            v = v
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x = ((v >> 11) % 32) as f64 * 0.5;
            v = v
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let y = ((v >> 11) % 32) as f64 * 0.5;
            pts.push(pt(id, x, y, "A"));
        }
        let ps = PointSet::new(pts).unwrap();
        let idx = DistanceIndex::build(&ps, &MetricConfig::euclidean()).unwrap();
        for origin in [0usize, 50, 199] {
            for k in [1usize, 4, 13] {
                let got = idx.knn_indexed(origin, k).unwrap();
                // oracle: full sort by (distance, id)
                let o = ps.point(origin);
                let mut all: Vec<(usize, f64)> = ps
                    .points()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != origin)
                    .map(|(i, p)| (i, ((p.x - o.x).powi(2) + (p.y - o.y).powi(2)).sqrt()))
                    .collect();
                all.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
                let kth = all[k - 1].1;
                let expected: Vec<(usize, f64)> =
                    all.into_iter().take_while(|&(_, d)| d <= kth).collect();
                assert_eq!(got.entries, expected, "origin {origin} k {k}");
                assert_eq!(got.bandwidth, kth);
            }
        }
    }
}
