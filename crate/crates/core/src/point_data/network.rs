//! Road networks and point-to-edge snapping.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::point_data::PointSet;

/// Default snap-distance threshold above which a warning is emitted (meters).
pub const DEFAULT_SNAP_WARN_METERS: f64 = 500.0;

/// An undirected weighted street segment between two network nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadEdge {
    /// Internal index of the first endpoint.
    pub a: usize,
    /// Internal index of the second endpoint.
    pub b: usize,
    /// Segment length in meters; always > 0.
    pub length: f64,
}

/// Node/edge/component counts reported after a load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
}

/// An undirected weighted graph of street segments.
///
/// Immutable after construction; connected-component labels are computed
/// eagerly so distance code can detect unreachable pairs cheaply.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    node_ids: Vec<u64>,
    coords: Vec<(f64, f64)>,
    edges: Vec<RoadEdge>,
    adjacency: Vec<Vec<usize>>,
    component: Vec<u32>,
    component_count: usize,
}

impl RoadNetwork {
    /// Builds a network from `(node_id, x, y)` rows and `(from_id, to_id, length)` rows.
    ///
    /// Errors on zero/negative edge lengths, self loops, and dangling node
    /// references. Returns validation warnings for edges whose stored length
    /// deviates from the straight-line chord between its endpoints by more
    /// than 10% (curved segments legitimately exceed the chord).
    pub fn new(
        nodes: Vec<(u64, f64, f64)>,
        edges: Vec<(u64, u64, f64)>,
    ) -> Result<(Self, Vec<String>)> {
        if nodes.is_empty() {
            return Err(Error::EmptyInput("network has no nodes".into()));
        }
        let mut index_by_id = HashMap::with_capacity(nodes.len());
        let mut node_ids = Vec::with_capacity(nodes.len());
        let mut coords = Vec::with_capacity(nodes.len());
        for (id, x, y) in nodes {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "node {id}: non-finite coordinates"
                )));
            }
            if index_by_id.insert(id, node_ids.len()).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate node id {id}")));
            }
            node_ids.push(id);
            coords.push((x, y));
        }

        let mut warnings = Vec::new();
        let mut built = Vec::with_capacity(edges.len());
        for (from, to, length) in edges {
            let a = *index_by_id.get(&from).ok_or_else(|| {
                Error::InvalidNetwork(format!("edge references unknown node {from}"))
            })?;
            let b = *index_by_id.get(&to).ok_or_else(|| {
                Error::InvalidNetwork(format!("edge references unknown node {to}"))
            })?;
            if from == to {
                return Err(Error::InvalidNetwork(format!(
                    "self-loop edge at node {from}"
                )));
            }
            if length.is_nan() || length <= 0.0 || !length.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "edge {from}-{to}: length must be positive and finite, got {length}"
                )));
            }
            let chord = euclid(coords[a], coords[b]);
            if chord > 0.0 && (length < 0.9 * chord || length > 1.1 * chord) {
                warnings.push(format!(
                    "edge {from}-{to}: stored length {length} differs from chord {chord:.3} by more than 10%"
                ));
            }
            built.push(RoadEdge { a, b, length });
        }

        let mut adjacency = vec![Vec::new(); node_ids.len()];
        for (idx, e) in built.iter().enumerate() {
            adjacency[e.a].push(idx);
            adjacency[e.b].push(idx);
        }

        let (component, component_count) = label_components(node_ids.len(), &adjacency, &built);
        Ok((
            Self {
                node_ids,
                coords,
                edges: built,
                adjacency,
                component,
                component_count,
            },
            warnings,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn summary(&self) -> NetworkSummary {
        NetworkSummary {
            node_count: self.node_count(),
            edge_count: self.edge_count(),
            component_count: self.component_count,
        }
    }

    pub fn edges(&self) -> &[RoadEdge] {
        &self.edges
    }

    pub fn node_coords(&self, node: usize) -> (f64, f64) {
        self.coords[node]
    }

    pub fn node_id(&self, node: usize) -> u64 {
        self.node_ids[node]
    }

    /// Edge indices incident to a node.
    pub fn incident_edges(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn component_of(&self, node: usize) -> u32 {
        self.component[node]
    }

    /// Nearest location on any edge to `(x, y)`: `(edge index, offset from
    /// endpoint a, distance to the snapped location)`. The offset is measured
    /// in stored-length units so it stays within `[0, length]` for curved
    /// segments too. Ties broken by lowest edge index so snapping is
    /// deterministic.
    pub fn nearest_edge_point(&self, x: f64, y: f64) -> (usize, f64, f64) {
        debug_assert!(!self.edges.is_empty());
        let mut best = (0usize, 0.0f64, f64::INFINITY);
        for (idx, e) in self.edges.iter().enumerate() {
            let (t, dist) = project_to_segment((x, y), self.coords[e.a], self.coords[e.b]);
            if dist < best.2 {
                best = (idx, t * e.length, dist);
            }
        }
        best
    }
}

/// A point projected onto its nearest network edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnappedPoint {
    pub point_id: u64,
    /// Index into [`RoadNetwork::edges`].
    pub edge: usize,
    /// Meters along the edge from endpoint `a`; within `[0, length]`.
    pub offset: f64,
    /// Meters from the original coordinate to the snapped location.
    pub snap_distance: f64,
}

/// Snaps every point to the nearest location on any network edge.
///
/// Snapping always succeeds on a non-empty network; points farther than
/// `warn_threshold` meters from the network produce a warning, not an error.
pub fn snap_points(
    points: &PointSet,
    net: &RoadNetwork,
    warn_threshold: f64,
) -> Result<(Vec<SnappedPoint>, Vec<String>)> {
    if net.edge_count() == 0 {
        return Err(Error::InvalidNetwork(
            "cannot snap to a network with no edges".into(),
        ));
    }
    let mut out = Vec::with_capacity(points.len());
    let mut warnings = Vec::new();
    for p in points.points() {
        let (edge, offset, snap_distance) = net.nearest_edge_point(p.x, p.y);
        if snap_distance > warn_threshold {
            warnings.push(format!(
                "point {}: snapped {snap_distance:.1} m away (threshold {warn_threshold} m)",
                p.id
            ));
        }
        out.push(SnappedPoint {
            point_id: p.id,
            edge,
            offset,
            snap_distance,
        });
    }
    Ok((out, warnings))
}

/// Perpendicular projection of `p` onto segment `a`-`b`, clamped to the
/// segment. Returns `(parameter t in [0, 1], distance from p to the
/// projected location)`.
fn project_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (px, py) = (p.0 - a.0, p.1 - a.1);
    let (ex, ey) = (b.0 - a.0, b.1 - a.1);
    let len2 = ex * ex + ey * ey;
    if len2 == 0.0 {
        return (0.0, (px * px + py * py).sqrt());
    }
    let t = ((px * ex + py * ey) / len2).clamp(0.0, 1.0);
    let (cx, cy) = (a.0 + t * ex, a.1 + t * ey);
    let dist = ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt();
    (t, dist)
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn label_components(n: usize, adjacency: &[Vec<usize>], edges: &[RoadEdge]) -> (Vec<u32>, usize) {
    let mut component = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..n {
        if component[start] != u32::MAX {
            continue;
        }
        component[start] = next;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &ei in &adjacency[u] {
                let e = &edges[ei];
                let v = if e.a == u { e.b } else { e.a };
                if component[v] == u32::MAX {
                    component[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    (component, next as usize)
}
