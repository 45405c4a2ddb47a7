//! Naive reference implementations.
//!
//! These recompute everything from first principles: a full pairwise
//! distance matrix, neighbor sets by sorting each row, and quotients by
//! direct evaluation of their defining formulas. They share no code with
//! the optimized paths (no spatial index, no Dijkstra, no parallelism).

use colocate::colocation::Kernel;
use colocate::point_data::{PointSet, RoadNetwork};

/// Full Euclidean distance matrix.
#[allow(clippy::needless_range_loop)]
pub fn euclidean_matrix(points: &PointSet) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let a = points.point(i);
            let b = points.point(j);
            m[i][j] = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
        }
    }
    m
}

/// Full network distance matrix between snapped point locations, via
/// Floyd-Warshall over the nodes plus endpoint/same-edge combination.
#[allow(clippy::needless_range_loop)]
pub fn network_matrix(points: &PointSet, net: &RoadNetwork) -> Vec<Vec<f64>> {
    let v = net.node_count();
    let mut node_dist = vec![vec![f64::INFINITY; v]; v];
    for i in 0..v {
        node_dist[i][i] = 0.0;
    }
    for e in net.edges() {
        if e.length < node_dist[e.a][e.b] {
            node_dist[e.a][e.b] = e.length;
            node_dist[e.b][e.a] = e.length;
        }
    }
    for k in 0..v {
        for i in 0..v {
            for j in 0..v {
                let via = node_dist[i][k] + node_dist[k][j];
                if via < node_dist[i][j] {
                    node_dist[i][j] = via;
                }
            }
        }
    }

    // Independent snapping: project each point onto every edge, keep the
    // closest, ties to the lowest edge index.
    let snapped: Vec<(usize, f64)> = points
        .points()
        .iter()
        .map(|p| {
            let mut best = (0usize, 0.0f64, f64::INFINITY);
            for (idx, e) in net.edges().iter().enumerate() {
                let (ax, ay) = net.node_coords(e.a);
                let (bx, by) = net.node_coords(e.b);
                let (ex, ey) = (bx - ax, by - ay);
                let len2 = ex * ex + ey * ey;
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((p.x - ax) * ex + (p.y - ay) * ey) / len2).clamp(0.0, 1.0)
                };
                let (cx, cy) = (ax + t * ex, ay + t * ey);
                let d = ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt();
                if d < best.2 {
                    best = (idx, t * e.length, d);
                }
            }
            (best.0, best.1)
        })
        .collect();

    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (ei, oi) = snapped[i];
            let (ej, oj) = snapped[j];
            let edge_i = net.edges()[ei];
            let edge_j = net.edges()[ej];
            let mut best = if ei == ej {
                (oi - oj).abs()
            } else {
                f64::INFINITY
            };
            for (ni, along_i) in [(edge_i.a, oi), (edge_i.b, edge_i.length - oi)] {
                for (nj, along_j) in [(edge_j.a, oj), (edge_j.b, edge_j.length - oj)] {
                    let d = along_i + node_dist[ni][nj] + along_j;
                    if d < best {
                        best = d;
                    }
                }
            }
            m[i][j] = best;
        }
    }
    m
}

/// Tie-expanded k-nearest-neighbor set of `origin` from a distance matrix:
/// `(entries sorted by (distance, id), bandwidth distance)`.
pub fn neighbor_set(
    matrix: &[Vec<f64>],
    ids: &[u64],
    origin: usize,
    k: usize,
) -> (Vec<(usize, f64)>, f64) {
    let n = matrix.len();
    let mut all: Vec<(usize, f64)> = (0..n)
        .filter(|&j| j != origin && matrix[origin][j].is_finite())
        .map(|j| (j, matrix[origin][j]))
        .collect();
    all.sort_by(|x, y| x.1.total_cmp(&y.1).then(ids[x.0].cmp(&ids[y.0])));
    let effective_k = k.min(all.len());
    let bandwidth = all[effective_k - 1].1;
    let cut = all.partition_point(|&(_, d)| d <= bandwidth);
    all.truncate(cut);
    (all, bandwidth)
}

/// Global colocation quotient straight from its definition.
pub fn global_clq(matrix: &[Vec<f64>], points: &PointSet, a: &str, b: &str, k: usize) -> f64 {
    let ids: Vec<u64> = points.points().iter().map(|p| p.id).collect();
    let n = points.len();
    let n_a = points.count_of(a);
    let n_b = if a == b {
        points.count_of(b) - 1
    } else {
        points.count_of(b)
    };
    let mut n_ab = 0.0;
    for (i, p) in points.points().iter().enumerate() {
        if p.category != a {
            continue;
        }
        let (neighbors, _) = neighbor_set(matrix, &ids, i, k);
        let nn = neighbors.len() as f64;
        for (j, _) in neighbors {
            if points.point(j).category == b {
                n_ab += 1.0 / nn;
            }
        }
    }
    (n_ab / n_a as f64) / (n_b as f64 / (n - 1) as f64)
}

fn weight(d: f64, bandwidth: f64, kernel: Kernel) -> f64 {
    match kernel {
        Kernel::Box => 1.0,
        Kernel::Gaussian => {
            if bandwidth == 0.0 {
                1.0
            } else {
                (-0.5 * (d / bandwidth).powi(2)).exp()
            }
        }
    }
}

/// Local colocation quotients for all A points, straight from their
/// definitions, returned as `(point id, value)` in input order.
pub fn lclq_values(
    matrix: &[Vec<f64>],
    points: &PointSet,
    a: &str,
    b: &str,
    k: usize,
    kernel: Kernel,
) -> Vec<(u64, f64)> {
    let ids: Vec<u64> = points.points().iter().map(|p| p.id).collect();
    let n = points.len();
    let mut out = Vec::new();
    for (i, p) in points.points().iter().enumerate() {
        if p.category != a {
            continue;
        }
        let n_b = if p.category == b {
            points.count_of(b) - 1
        } else {
            points.count_of(b)
        };
        let (neighbors, bandwidth) = neighbor_set(matrix, &ids, i, k);
        let mut w_sum = 0.0;
        let mut w_b = 0.0;
        for (j, d) in neighbors {
            let w = weight(d, bandwidth, kernel);
            w_sum += w;
            if points.point(j).category == b {
                w_b += w;
            }
        }
        let share = w_b / w_sum;
        out.push((p.id, share * (n - 1) as f64 / n_b as f64));
    }
    out
}

/// Pearson correlation of two equal-length samples.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}
