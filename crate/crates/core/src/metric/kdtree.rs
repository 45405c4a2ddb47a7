//! Exact 2-d tree for nearest-neighbor queries.
//!
//! Exactness matters: quotient counts are discrete, so an approximate index
//! would change answers, not just precision. Queries compare squared
//! distances and never prune a subtree that could still hold a point at the
//! current k-th distance, which keeps tie groups intact.

use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy)]
struct Node {
    point: usize,
    axis: u8,
    left: i32,
    right: i32,
}

/// Static k-d tree over a fixed list of planar coordinates.
#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    coords: Vec<(f64, f64)>,
    nodes: Vec<Node>,
    root: i32,
}

impl KdTree {
    pub fn build(coords: &[(f64, f64)]) -> Self {
        let mut tree = KdTree {
            coords: coords.to_vec(),
            nodes: Vec::with_capacity(coords.len()),
            root: -1,
        };
        let mut indices: Vec<usize> = (0..coords.len()).collect();
        tree.root = tree.build_rec(&mut indices, 0);
        tree
    }

    fn build_rec(&mut self, indices: &mut [usize], depth: usize) -> i32 {
        if indices.is_empty() {
            return -1;
        }
        let axis = (depth % 2) as u8;
        let mid = indices.len() / 2;
        let coords = &self.coords;
        indices.select_nth_unstable_by(mid, |&a, &b| {
            let ka = if axis == 0 { coords[a].0 } else { coords[a].1 };
            let kb = if axis == 0 { coords[b].0 } else { coords[b].1 };
            ka.total_cmp(&kb).then(a.cmp(&b))
        });
        let point = indices[mid];
        let slot = self.nodes.len() as i32;
        self.nodes.push(Node {
            point,
            axis,
            left: -1,
            right: -1,
        });
        let (lo, rest) = indices.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = self.build_rec(lo, depth + 1);
        let right = self.build_rec(hi, depth + 1);
        self.nodes[slot as usize].left = left;
        self.nodes[slot as usize].right = right;
        slot
    }

    /// Squared distance to the k-th nearest point (excluding `exclude`), or
    /// to the farthest available point when fewer than `k` exist.
    pub fn kth_distance_sq(
        &self,
        origin: (f64, f64),
        k: usize,
        exclude: Option<usize>,
    ) -> Option<f64> {
        debug_assert!(k >= 1);
        let mut heap: BinaryHeap<OrdF64> = BinaryHeap::with_capacity(k + 1);
        self.knn_rec(self.root, origin, k, exclude, &mut heap);
        heap.peek().map(|d| d.0)
    }

    fn knn_rec(
        &self,
        node: i32,
        origin: (f64, f64),
        k: usize,
        exclude: Option<usize>,
        heap: &mut BinaryHeap<OrdF64>,
    ) {
        if node < 0 {
            return;
        }
        let n = self.nodes[node as usize];
        let p = self.coords[n.point];
        if Some(n.point) != exclude {
            let d2 = sq_dist(origin, p);
            if heap.len() < k {
                heap.push(OrdF64(d2));
            } else if d2 < heap.peek().unwrap().0 {
                heap.pop();
                heap.push(OrdF64(d2));
            }
        }
        let (oc, pc) = if n.axis == 0 {
            (origin.0, p.0)
        } else {
            (origin.1, p.1)
        };
        let (near, far) = if oc < pc {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.knn_rec(near, origin, k, exclude, heap);
        let plane2 = (oc - pc) * (oc - pc);
        // <= keeps tied points on the far side reachable
        if heap.len() < k || plane2 <= heap.peek().unwrap().0 {
            self.knn_rec(far, origin, k, exclude, heap);
        }
    }

    /// All points (excluding `exclude`) with squared distance <= `d2_max`,
    /// appended to `out` as `(point index, squared distance)`.
    pub fn within_sq(
        &self,
        origin: (f64, f64),
        d2_max: f64,
        exclude: Option<usize>,
        out: &mut Vec<(usize, f64)>,
    ) {
        let mut stack = vec![self.root];
        while let Some(node) = stack.pop() {
            if node < 0 {
                continue;
            }
            let n = self.nodes[node as usize];
            let p = self.coords[n.point];
            if Some(n.point) != exclude {
                let d2 = sq_dist(origin, p);
                if d2 <= d2_max {
                    out.push((n.point, d2));
                }
            }
            let (oc, pc) = if n.axis == 0 {
                (origin.0, p.0)
            } else {
                (origin.1, p.1)
            };
            let plane2 = (oc - pc) * (oc - pc);
            let (near, far) = if oc < pc {
                (n.left, n.right)
            } else {
                (n.right, n.left)
            };
            stack.push(near);
            if plane2 <= d2_max {
                stack.push(far);
            }
        }
    }
}

fn sq_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Max-heap key over f64 via total ordering.
#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Min-heap entry for Dijkstra-style queues.
#[derive(PartialEq)]
pub(crate) struct MinDist(pub f64, pub usize);

impl Eq for MinDist {}

impl PartialOrd for MinDist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinDist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // reversed for use in std's max-heap
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}
