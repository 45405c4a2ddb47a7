//! Deterministic synthetic fixtures.

use colocate::point_data::{PointSet, RoadNetwork, SpatialPoint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Uniform (CSR) points in `[0, side]^2` with exact per-category counts and
/// labels shuffled over positions.
pub fn csr_points(side: f64, categories: &[(&str, usize)], seed: u64) -> PointSet {
    let mut rng = rng(seed);
    let mut labels: Vec<&str> = Vec::new();
    for &(name, count) in categories {
        labels.extend(std::iter::repeat_n(name, count));
    }
    labels.shuffle(&mut rng);
    let points = labels
        .into_iter()
        .enumerate()
        .map(|(i, cat)| {
            let x = rng.random::<f64>() * side;
            let y = rng.random::<f64>() * side;
            SpatialPoint::new(i as u64, x, y, cat)
        })
        .collect();
    PointSet::new(points).expect("valid fixture")
}

/// Two tight single-category clusters separated by `gap`.
pub fn two_separated_clusters(per_cluster: usize, gap: f64, seed: u64) -> PointSet {
    let mut rng = rng(seed);
    let mut points = Vec::with_capacity(2 * per_cluster);
    for i in 0..per_cluster {
        let x = rng.random::<f64>() * 2.0;
        let y = rng.random::<f64>() * 2.0;
        points.push(SpatialPoint::new(i as u64, x, y, "A"));
    }
    for i in 0..per_cluster {
        let x = gap + rng.random::<f64>() * 2.0;
        let y = rng.random::<f64>() * 2.0;
        points.push(SpatialPoint::new((per_cluster + i) as u64, x, y, "B"));
    }
    PointSet::new(points).expect("valid fixture")
}

/// A checkerboard-style planted-attraction grid: categories alternate along
/// each row, rows spaced far enough apart that neighbor sets stay within a
/// row for small k. Every point's closest neighbors are the other category
/// at k = 1 and remain majority other-category through k = 5.
pub fn alternating_rows(rows: usize, cols: usize, col_spacing: f64, row_spacing: f64) -> PointSet {
    let mut points = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let cat = if (r + c) % 2 == 0 { "A" } else { "B" };
            points.push(SpatialPoint::new(
                (r * cols + c) as u64,
                c as f64 * col_spacing,
                r as f64 * row_spacing,
                cat,
            ));
        }
    }
    PointSet::new(points).expect("valid fixture")
}

/// Two overlapping Gaussian clusters of different categories: segregated at
/// small bandwidths but increasingly mixed as the neighbor rank grows.
pub fn overlapping_clusters(
    per_cluster: usize,
    separation: f64,
    sigma: f64,
    seed: u64,
) -> PointSet {
    let mut rng = rng(seed);
    let mut points = Vec::with_capacity(2 * per_cluster);
    for i in 0..2 * per_cluster {
        let (dx, dy) = normal_pair(&mut rng);
        let (cx, cat) = if i < per_cluster {
            (0.0, "A")
        } else {
            (separation, "B")
        };
        points.push(SpatialPoint::new(
            i as u64,
            cx + dx * sigma,
            dy * sigma,
            cat,
        ));
    }
    PointSet::new(points).expect("valid fixture")
}

/// Regular grid road network over `[0, (nx-1)*spacing] x [0, (ny-1)*spacing]`.
pub fn grid_network(nx: usize, ny: usize, spacing: f64) -> RoadNetwork {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let id = |i: usize, j: usize| (i * ny + j) as u64;
    for i in 0..nx {
        for j in 0..ny {
            nodes.push((id(i, j), i as f64 * spacing, j as f64 * spacing));
            if i + 1 < nx {
                edges.push((id(i, j), id(i + 1, j), spacing));
            }
            if j + 1 < ny {
                edges.push((id(i, j), id(i, j + 1), spacing));
            }
        }
    }
    RoadNetwork::new(nodes, edges).expect("valid fixture").0
}

/// Grid network with jittered node positions; edge lengths are the jittered
/// chords, so path sums are irregular and exact distance ties are unlikely.
pub fn jittered_grid_network(
    nx: usize,
    ny: usize,
    spacing: f64,
    jitter: f64,
    seed: u64,
) -> RoadNetwork {
    let mut rng = rng(seed);
    let mut coords = vec![(0.0f64, 0.0f64); nx * ny];
    let idx = |i: usize, j: usize| i * ny + j;
    for i in 0..nx {
        for j in 0..ny {
            let dx = (rng.random::<f64>() - 0.5) * 2.0 * jitter;
            let dy = (rng.random::<f64>() - 0.5) * 2.0 * jitter;
            coords[idx(i, j)] = (i as f64 * spacing + dx, j as f64 * spacing + dy);
        }
    }
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let a = idx(i, j);
            nodes.push((a as u64, coords[a].0, coords[a].1));
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni < nx && nj < ny {
                    let b = idx(ni, nj);
                    let len = ((coords[a].0 - coords[b].0).powi(2)
                        + (coords[a].1 - coords[b].1).powi(2))
                    .sqrt();
                    edges.push((a as u64, b as u64, len));
                }
            }
        }
    }
    RoadNetwork::new(nodes, edges).expect("valid fixture").0
}

/// A dense grid of roads plus one sparse dead-end peninsula road, with mixed
/// categories on both. Euclidean neighborhoods of peninsula points reach
/// across to the grid; network neighborhoods cannot without the long detour
/// through the peninsula's single connection.
///
/// Returns `(points, network, ids of peninsula points)`.
pub fn peninsula(seed: u64) -> (PointSet, RoadNetwork, Vec<u64>) {
    let mut rng = rng(seed);
    // 11 x 11 grid, spacing 100, covering [0, 1000]^2
    let nx = 11usize;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let id = |i: usize, j: usize| (i * nx + j) as u64;
    for i in 0..nx {
        for j in 0..nx {
            nodes.push((id(i, j), i as f64 * 100.0, j as f64 * 100.0));
            if i + 1 < nx {
                edges.push((id(i, j), id(i + 1, j), 100.0));
            }
            if j + 1 < nx {
                edges.push((id(i, j), id(i, j + 1), 100.0));
            }
        }
    }
    // Spur along y = -150, attached to the grid only at (1000, 0).
    let spur_base = (nx * nx) as u64;
    let spur_count = 11usize;
    for s in 0..spur_count {
        nodes.push((spur_base + s as u64, 1000.0 - s as f64 * 100.0, -150.0));
        if s > 0 {
            edges.push((spur_base + s as u64 - 1, spur_base + s as u64, 100.0));
        }
    }
    edges.push((id(10, 0), spur_base, 150.0));
    let net = RoadNetwork::new(nodes, edges).expect("valid fixture").0;

    let mut points = Vec::new();
    let mut next_id = 0u64;
    // Mixed labels over the grid area.
    for _ in 0..160 {
        let x = rng.random::<f64>() * 1000.0;
        let y = rng.random::<f64>() * 1000.0;
        let cat = if rng.random::<f64>() < 0.5 { "A" } else { "B" };
        points.push(SpatialPoint::new(next_id, x, y, cat));
        next_id += 1;
    }
    // Sparse peninsula: mostly A points strung along the spur.
    let mut peninsula_ids = Vec::new();
    for s in 0..16 {
        let x = 30.0 + s as f64 * 58.0 + (rng.random::<f64>() - 0.5) * 20.0;
        let y = -150.0 + (rng.random::<f64>() - 0.5) * 20.0;
        let cat = if s % 5 == 4 { "B" } else { "A" };
        points.push(SpatialPoint::new(next_id, x, y, cat));
        peninsula_ids.push(next_id);
        next_id += 1;
    }
    (
        PointSet::new(points).expect("valid fixture"),
        net,
        peninsula_ids,
    )
}
