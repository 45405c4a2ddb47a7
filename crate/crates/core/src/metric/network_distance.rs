//! Shortest-path distances between points snapped to a road network.
//!
//! Distances are measured between snapped locations, not nearest nodes: a
//! point at offset `t` on edge (a, b) contributes `t` to paths leaving via
//! `a` and `length - t` via `b`, and two points on the same edge may connect
//! directly along it. Queries run a single-source expansion from the origin's
//! snapped location and, for kNN, stop once the k-th best candidate cannot
//! improve.

use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::kdtree::MinDist;
use crate::point_data::{snap_points, PointSet, RoadNetwork, SnappedPoint};

#[derive(Debug)]
pub(crate) struct NetworkEngine {
    net: Arc<RoadNetwork>,
    snapped: Vec<SnappedPoint>,
    /// edge index -> positions of points snapped onto it
    on_edge: Vec<Vec<usize>>,
}

impl NetworkEngine {
    pub fn build(
        points: &PointSet,
        net: Arc<RoadNetwork>,
        snap_warn_threshold: f64,
    ) -> Result<(Self, Vec<String>)> {
        let (snapped, warnings) = snap_points(points, &net, snap_warn_threshold)?;
        let mut on_edge = vec![Vec::new(); net.edge_count()];
        for (pos, s) in snapped.iter().enumerate() {
            on_edge[s.edge].push(pos);
        }
        Ok((
            Self {
                net,
                snapped,
                on_edge,
            },
            warnings,
        ))
    }

    pub fn snapped(&self) -> &[SnappedPoint] {
        &self.snapped
    }

    /// Distances from point `origin` to every other point, stopping early
    /// according to `stop`. Entries that were not finalized before the stop
    /// rule fired are `f64::INFINITY`; with `Stop::Exhaust` an infinite entry
    /// means the pair is disconnected.
    pub fn expand(&self, origin: usize, stop: Stop) -> Vec<f64> {
        let node_count = self.net.node_count();
        let mut node_dist = vec![f64::INFINITY; node_count];
        let mut settled = vec![false; node_count];
        let mut best = vec![f64::INFINITY; self.snapped.len()];
        let mut heap: BinaryHeap<MinDist> = BinaryHeap::new();

        let o = &self.snapped[origin];
        let o_edge = self.net.edges()[o.edge];

        // Same-edge candidates connect directly along the edge.
        for &p in &self.on_edge[o.edge] {
            if p != origin {
                best[p] = (self.snapped[p].offset - o.offset).abs();
            }
        }
        relax(&mut node_dist, &mut heap, o_edge.a, o.offset);
        relax(
            &mut node_dist,
            &mut heap,
            o_edge.b,
            o_edge.length - o.offset,
        );

        // Early-stop bound: the current k-th smallest candidate distance.
        // It only shrinks as candidates improve, so it is recomputed lazily.
        let mut bound = f64::INFINITY;
        while let Some(MinDist(du, u)) = heap.pop() {
            if settled[u] {
                continue;
            }
            if let Stop::KthCandidate(k) = stop {
                if du > bound || bound.is_infinite() {
                    bound = kth_smallest(&best, k);
                    if du > bound {
                        break;
                    }
                }
            }
            if let Stop::Cutoff(d_max) = stop {
                if du > d_max {
                    break;
                }
            }
            settled[u] = true;
            for &ei in self.net.incident_edges(u) {
                let e = self.net.edges()[ei];
                let v = if e.a == u { e.b } else { e.a };
                if !settled[v] {
                    relax(&mut node_dist, &mut heap, v, du + e.length);
                }
                for &p in &self.on_edge[ei] {
                    if p == origin {
                        continue;
                    }
                    let along = if e.a == u {
                        self.snapped[p].offset
                    } else {
                        e.length - self.snapped[p].offset
                    };
                    let cand = du + along;
                    if cand < best[p] {
                        best[p] = cand;
                    }
                }
            }
        }
        best[origin] = 0.0;
        best
    }

    /// Tie-expanded k nearest neighbors of `origin`, sorted by
    /// `(distance, id)`. Errors when fewer than `min(k, n-1)` points are
    /// reachable.
    pub fn knn(&self, origin: usize, k: usize, ids: &[u64]) -> Result<Vec<(usize, f64)>> {
        let n = self.snapped.len();
        let effective_k = k.min(n - 1);
        let best = self.expand(origin, Stop::KthCandidate(effective_k));
        let mut candidates: Vec<(usize, f64)> = best
            .iter()
            .enumerate()
            .filter(|&(p, &d)| p != origin && d.is_finite())
            .map(|(p, &d)| (p, d))
            .collect();
        if candidates.len() < effective_k {
            // The early stop cannot fire before k candidates exist, so the
            // expansion ran to exhaustion and the rest are disconnected.
            return Err(Error::Disconnected {
                origin: ids[origin],
                unreachable: (n - 1) - candidates.len(),
            });
        }
        candidates.sort_by(|x, y| x.1.total_cmp(&y.1).then(ids[x.0].cmp(&ids[y.0])));
        let kth = candidates[effective_k - 1].1;
        let cut = candidates.partition_point(|&(_, d)| d <= kth);
        candidates.truncate(cut);
        Ok(candidates)
    }

    /// Network distance between two points of the set; `f64::INFINITY` when
    /// they lie in different components.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.expand(i, Stop::Exhaust)[j]
    }
}

/// Stop rule for [`NetworkEngine::expand`].
#[derive(Debug, Clone, Copy)]
pub(crate) enum Stop {
    /// Run until the queue empties.
    Exhaust,
    /// Stop once no candidate can enter the current top-k set.
    KthCandidate(usize),
    /// Stop once settled nodes exceed this distance; candidates beyond it
    /// are not meaningful.
    Cutoff(f64),
}

fn relax(dist: &mut [f64], heap: &mut BinaryHeap<MinDist>, node: usize, d: f64) {
    if d < dist[node] {
        dist[node] = d;
        heap.push(MinDist(d, node));
    }
}

fn kth_smallest(values: &[f64], k: usize) -> f64 {
    let mut finite: Vec<f64> = values.iter().copied().filter(|d| d.is_finite()).collect();
    if finite.len() < k {
        return f64::INFINITY;
    }
    let (_, kth, _) = finite.select_nth_unstable_by(k - 1, f64::total_cmp);
    *kth
}

/// One-shot network distance between two arbitrary snapped locations.
pub(crate) fn snapped_pair_distance(net: &RoadNetwork, a: &SnappedPoint, b: &SnappedPoint) -> f64 {
    let ea = net.edges()[a.edge];
    let eb = net.edges()[b.edge];
    let mut best = if a.edge == b.edge {
        (a.offset - b.offset).abs()
    } else {
        f64::INFINITY
    };

    // Dijkstra from a's two endpoints over nodes.
    let mut node_dist = vec![f64::INFINITY; net.node_count()];
    let mut settled = vec![false; net.node_count()];
    let mut heap = BinaryHeap::new();
    relax(&mut node_dist, &mut heap, ea.a, a.offset);
    relax(&mut node_dist, &mut heap, ea.b, ea.length - a.offset);
    while let Some(MinDist(du, u)) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        for &ei in net.incident_edges(u) {
            let e = net.edges()[ei];
            let v = if e.a == u { e.b } else { e.a };
            if !settled[v] {
                relax(&mut node_dist, &mut heap, v, du + e.length);
            }
        }
    }
    let via = |node: usize, along: f64| node_dist[node] + along;
    best = best
        .min(via(eb.a, b.offset))
        .min(via(eb.b, eb.length - b.offset));
    best
}
