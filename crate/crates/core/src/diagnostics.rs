//! Baseline measures: the cross K function with simulation envelopes and
//! the nearest-neighbor index.
//!
//! Cross K counts type-B points within distance d of each type-A point,
//! scaled by the study area and the two population sizes. No edge
//! correction is applied: inference is envelope-based and the relabeling
//! trials share the same bias as the observed statistic. Envelopes are the
//! pointwise min and max over the trials.

use rayon::prelude::*;

use crate::colocation::validate_pair;
use crate::error::{Error, Result};
use crate::inference::{derive_rng, relabel_global, SimulationConfig};
use crate::metric::{DistanceIndex, MetricConfig};
use crate::point_data::PointSet;

/// Default trial count for cross K envelopes.
pub const DEFAULT_ENVELOPE_TRIALS: usize = 99;

/// Cross K values over a distance grid with simulation envelopes.
#[derive(Debug, Clone)]
pub struct CrossKCurve {
    /// Ascending distance grid from 0 to `d_max`, inclusive.
    pub distances: Vec<f64>,
    pub k_observed: Vec<f64>,
    pub envelope_low: Vec<f64>,
    pub envelope_high: Vec<f64>,
    /// Trials behind the envelopes.
    pub trials: usize,
}

impl CrossKCurve {
    /// Grid steps where the observed curve escapes above the envelope
    /// (colocation) or below it (dispersion).
    pub fn excursions(&self) -> (usize, usize) {
        let mut above = 0;
        let mut below = 0;
        for i in 0..self.distances.len() {
            if self.k_observed[i] > self.envelope_high[i] {
                above += 1;
            } else if self.k_observed[i] < self.envelope_low[i] {
                below += 1;
            }
        }
        (above, below)
    }
}

/// Cross K function of categories `a` toward `b` over `steps` grid points in
/// `[0, d_max]`, with min/max envelopes from global-relabeling trials.
///
/// In network mode, pairs in different components sit at infinite distance
/// and are never counted.
#[allow(clippy::too_many_arguments)]
pub fn cross_k(
    points: &PointSet,
    a: &str,
    b: &str,
    d_max: f64,
    steps: usize,
    metric: &MetricConfig,
    study_area: f64,
    sim: &SimulationConfig,
) -> Result<CrossKCurve> {
    let (a_code, b_code) = validate_pair(points, a, b)?;
    if study_area.is_nan() || study_area <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "study area must be positive, got {study_area}"
        )));
    }
    if d_max.is_nan() || d_max <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "d_max must be positive, got {d_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter("need at least 2 grid steps".into()));
    }

    let n_a = points.count_of(a);
    let n_b = points.count_of(b);
    let scale = study_area / (n_a as f64 * n_b as f64);
    let distances: Vec<f64> = (0..steps)
        .map(|t| d_max * t as f64 / (steps - 1) as f64)
        .collect();

    // Every ordered pair within range, bucketed onto the grid once; trials
    // only re-read categories.
    let index = DistanceIndex::build(points, metric)?;
    let pairs = index.pairs_within(d_max);
    let buckets: Vec<(usize, usize, usize)> = pairs
        .into_iter()
        .map(|(i, j, d)| (i, j, distances.partition_point(|&g| g < d)))
        .collect();

    let cumulative = |codes: &[u32]| -> Vec<f64> {
        let mut counts = vec![0usize; steps];
        for &(i, j, bucket) in &buckets {
            if codes[i] == a_code && codes[j] == b_code && bucket < steps {
                counts[bucket] += 1;
            }
        }
        let mut total = 0usize;
        counts
            .iter()
            .map(|&c| {
                total += c;
                scale * total as f64
            })
            .collect()
    };

    let k_observed = cumulative(points.codes());
    let trial_curves: Vec<Vec<f64>> = (0..sim.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = derive_rng(sim.seed, trial as u64);
            cumulative(&relabel_global(points, &mut rng))
        })
        .collect();

    let mut envelope_low = vec![f64::INFINITY; steps];
    let mut envelope_high = vec![f64::NEG_INFINITY; steps];
    for curve in &trial_curves {
        for (s, &v) in curve.iter().enumerate() {
            envelope_low[s] = envelope_low[s].min(v);
            envelope_high[s] = envelope_high[s].max(v);
        }
    }

    Ok(CrossKCurve {
        distances,
        k_observed,
        envelope_low,
        envelope_high,
        trials: sim.trials,
    })
}

/// Nearest-neighbor index result (Clark-Evans form).
#[derive(Debug, Clone, Copy)]
pub struct NniResult {
    /// Observed over expected mean nearest-neighbor distance; < 1 clustered.
    pub index: f64,
    pub z_score: f64,
    pub n: usize,
    pub area: f64,
    pub mean_observed: f64,
    pub mean_expected: f64,
}

/// Nearest-neighbor index of a point set, optionally restricted to one
/// category. Distances are Euclidean.
pub fn nni(points: &PointSet, category: Option<&str>, study_area: f64) -> Result<NniResult> {
    if study_area.is_nan() || study_area <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "study area must be positive, got {study_area}"
        )));
    }
    let coords: Vec<(f64, f64)> = match category {
        Some(cat) => {
            let code = points.require_category(cat)?;
            points
                .points()
                .iter()
                .zip(points.codes())
                .filter(|(_, &c)| c == code)
                .map(|(p, _)| (p.x, p.y))
                .collect()
        }
        None => points.points().iter().map(|p| (p.x, p.y)).collect(),
    };
    let n = coords.len();
    if n < 2 {
        return Err(Error::NoEligibleNeighbors);
    }

    let tree = crate::metric::nearest_neighbor_tree(&coords);
    let sum: f64 = (0..n)
        .map(|i| {
            tree.kth_distance_sq(coords[i], 1, Some(i))
                .expect("n >= 2")
                .sqrt()
        })
        .sum();
    let mean_observed = sum / n as f64;
    let density = n as f64 / study_area;
    let mean_expected = 0.5 / density.sqrt();
    let se = 0.26136 / (n as f64 * n as f64 / study_area).sqrt();
    Ok(NniResult {
        index: mean_observed / mean_expected,
        z_score: (mean_observed - mean_expected) / se,
        n,
        area: study_area,
        mean_observed,
        mean_expected,
    })
}
