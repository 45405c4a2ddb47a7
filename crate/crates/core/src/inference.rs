//! Monte Carlo significance machinery.
//!
//! Local quotients are tested with restricted random labeling: the focal
//! point keeps its label while every other label is permuted, preserving the
//! category frequencies. Global quotients use a full random relabeling.
//! Distances and neighbor sets are computed once per dataset and shared by
//! all trials; relabeling only ever changes which labels the fixed neighbor
//! geometry sees.
//!
//! Determinism: every consumer of randomness derives its own stream from the
//! master seed — per focal point id for local tests, per trial index for
//! global ones — so results are bit-identical under any parallel schedule.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::colocation::{
    effective_b_count, global_clq_value, lclq_value, neighbor_lists_for, validate_pair, ClqResult,
    Kernel, LclqRecord,
};
use crate::error::{Error, Result};
use crate::metric::{DistanceIndex, MetricConfig};
use crate::point_data::PointSet;

/// Default trial count for local tests: an odd M gives the two-tailed
/// p-value a clean granularity of 2/(M+1).
pub const DEFAULT_TRIALS: usize = 999;

/// Monte Carlo test parameters.
#[derive(Debug, Clone, Copy)]
pub struct SimulationConfig {
    /// Number of relabeling trials M; at least 19 so p can reach 0.10.
    pub trials: usize,
    /// Master seed; all streams derive from it.
    pub seed: u64,
    /// Significance threshold, within (0, 1).
    pub alpha: f64,
}

impl SimulationConfig {
    pub fn new(trials: usize, seed: u64) -> Result<Self> {
        if trials < 19 {
            return Err(Error::InvalidParameter(format!(
                "at least 19 trials required for a meaningful two-tailed p, got {trials}"
            )));
        }
        Ok(Self {
            trials,
            seed,
            alpha: 0.05,
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }
}

/// Two-tailed Monte Carlo p-value with its tail counts.
///
/// Uses the add-one correction `p = 2 * min(n_ge + 1, n_le + 1) / (M + 1)`,
/// clamped at 1; trials tied with the observed value count toward both
/// tails, which keeps the test conservative under discreteness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    /// Within (0, 1].
    pub value: f64,
    /// Trials with a simulated statistic >= the observed one.
    pub n_ge: usize,
    /// Trials with a simulated statistic <= the observed one.
    pub n_le: usize,
    pub trials: usize,
}

impl PValue {
    pub fn from_counts(n_ge: usize, n_le: usize, trials: usize) -> Self {
        let minor = n_ge.min(n_le) + 1;
        let value = (2.0 * minor as f64 / (trials + 1) as f64).min(1.0);
        Self {
            value,
            n_ge,
            n_le,
            trials,
        }
    }

    pub fn from_sims(observed: f64, sims: &[f64]) -> Self {
        let n_ge = sims.iter().filter(|&&s| s >= observed).count();
        let n_le = sims.iter().filter(|&&s| s <= observed).count();
        Self::from_counts(n_ge, n_le, sims.len())
    }
}

/// Independent RNG stream derived from a master seed and a salt (a point id
/// or a trial index). The same pair always yields the same stream.
pub fn derive_rng(master_seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(salt)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Restricted random relabeling: the fixed point keeps its category; the
/// remaining labels are a uniform permutation of the original multiset minus
/// the fixed point's label. Returns the full per-point code assignment.
pub fn relabel_restricted<R: Rng>(
    points: &PointSet,
    fixed_id: u64,
    rng: &mut R,
) -> Result<Vec<u32>> {
    let pos = points
        .position_of(fixed_id)
        .ok_or(Error::PointNotFound(fixed_id))?;
    let mut pool = Vec::with_capacity(points.len() - 1);
    let mut out = Vec::with_capacity(points.len());
    restricted_assignment_into(points.codes(), pos, rng, &mut pool, &mut out);
    Ok(out)
}

/// Full random relabeling: a uniform permutation of all category labels over
/// the unchanged geometry.
pub fn relabel_global<R: Rng>(points: &PointSet, rng: &mut R) -> Vec<u32> {
    let mut codes = points.codes().to_vec();
    codes.shuffle(rng);
    codes
}

/// Buffer-reusing core of [`relabel_restricted`]; always starts from the
/// original assignment so repeated calls with one rng reproduce exactly the
/// sequence a brute-force re-run would see.
fn restricted_assignment_into<R: Rng>(
    codes: &[u32],
    fixed_pos: usize,
    rng: &mut R,
    pool: &mut Vec<u32>,
    out: &mut Vec<u32>,
) {
    pool.clear();
    pool.extend(
        codes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != fixed_pos)
            .map(|(_, &c)| c),
    );
    pool.shuffle(rng);
    out.clear();
    out.extend_from_slice(&pool[..fixed_pos]);
    out.push(codes[fixed_pos]);
    out.extend_from_slice(&pool[fixed_pos..]);
}

/// The simulated sampling distribution of the global quotient: `trials`
/// global relabelings of the same geometry, reusing one set of neighbor
/// lists.
pub fn null_global_clqs(
    points: &PointSet,
    a: &str,
    b: &str,
    k: usize,
    metric: &MetricConfig,
    sim: &SimulationConfig,
) -> Result<Vec<f64>> {
    Ok(global_test_parts(points, a, b, k, metric, sim)?.1)
}

/// Global quotient plus its Monte Carlo significance.
pub fn test_global_clq(
    points: &PointSet,
    a: &str,
    b: &str,
    k: usize,
    metric: &MetricConfig,
    sim: &SimulationConfig,
) -> Result<ClqResult> {
    let (observed, sims) = global_test_parts(points, a, b, k, metric, sim)?;
    let p = PValue::from_sims(observed, &sims);
    Ok(ClqResult {
        a_category: a.to_string(),
        b_category: b.to_string(),
        value: observed,
        n_a: points.count_of(a),
        n_b: points.count_of(b),
        n_total: points.len(),
        bandwidth_k: k,
        metric: metric.kind,
        p_value: Some(p),
    })
}

fn global_test_parts(
    points: &PointSet,
    a: &str,
    b: &str,
    k: usize,
    metric: &MetricConfig,
    sim: &SimulationConfig,
) -> Result<(f64, Vec<f64>)> {
    let (a_code, b_code) = validate_pair(points, a, b)?;
    if points.len() < 2 {
        return Err(Error::NoEligibleNeighbors);
    }
    let n = points.len();
    let n_b = points.count_of(b);
    let index = DistanceIndex::build(points, metric)?;
    // Any point can become type a in a trial, so every point needs its list.
    let all: Vec<usize> = (0..n).collect();
    let lists = neighbor_lists_for(&index, &all, k)?;
    let observed = global_clq_value(&lists, points.codes(), a_code, b_code, n, n_b);
    let sims: Vec<f64> = (0..sim.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = derive_rng(sim.seed, trial as u64);
            let labels = relabel_global(points, &mut rng);
            global_clq_value(&lists, &labels, a_code, b_code, n, n_b)
        })
        .collect();
    Ok((observed, sims))
}

/// Tested global quotients for a batch of `(a, b)` category pairs at one
/// bandwidth, sharing a single set of neighbor lists and one relabeling
/// sequence across the pairs. Row order follows `pairs`.
pub fn test_global_clq_batch(
    points: &PointSet,
    pairs: &[(String, String)],
    k: usize,
    metric: &MetricConfig,
    sim: &SimulationConfig,
) -> Result<Vec<ClqResult>> {
    if points.len() < 2 {
        return Err(Error::NoEligibleNeighbors);
    }
    let codes_for: Vec<(u32, u32)> = pairs
        .iter()
        .map(|(a, b)| validate_pair(points, a, b))
        .collect::<Result<_>>()?;
    let n = points.len();
    let index = DistanceIndex::build(points, metric)?;
    let all: Vec<usize> = (0..n).collect();
    let lists = neighbor_lists_for(&index, &all, k)?;

    let counts: Vec<usize> = pairs.iter().map(|(_, b)| points.count_of(b)).collect();
    let observed: Vec<f64> = codes_for
        .iter()
        .zip(&counts)
        .map(|(&(a_code, b_code), &n_b)| {
            global_clq_value(&lists, points.codes(), a_code, b_code, n, n_b)
        })
        .collect();
    // One relabeling per trial, evaluated for every pair.
    let per_trial: Vec<Vec<f64>> = (0..sim.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = derive_rng(sim.seed, trial as u64);
            let labels = relabel_global(points, &mut rng);
            codes_for
                .iter()
                .zip(&counts)
                .map(|(&(a_code, b_code), &n_b)| {
                    global_clq_value(&lists, &labels, a_code, b_code, n, n_b)
                })
                .collect()
        })
        .collect();

    Ok(pairs
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let sims: Vec<f64> = per_trial.iter().map(|t| t[i]).collect();
            ClqResult {
                a_category: a.clone(),
                b_category: b.clone(),
                value: observed[i],
                n_a: points.count_of(a),
                n_b: points.count_of(b),
                n_total: n,
                bandwidth_k: k,
                metric: metric.kind,
                p_value: Some(PValue::from_sims(observed[i], &sims)),
            }
        })
        .collect())
}

/// Local quotients with restricted-random-labeling significance for every
/// point of category `a`.
///
/// Each focal point runs `sim.trials` relabelings that fix its own label,
/// recomputing the local quotient against the point's unchanged neighbor
/// geometry, and flags significance at `sim.alpha`. P-values are raw and
/// per point; no multiple-comparison correction is applied across points.
pub fn test_lclq(
    points: &PointSet,
    a: &str,
    b: &str,
    k: usize,
    metric: &MetricConfig,
    kernel: Kernel,
    sim: &SimulationConfig,
) -> Result<Vec<LclqRecord>> {
    let (a_code, b_code) = validate_pair(points, a, b)?;
    if points.len() < 2 {
        return Err(Error::NoEligibleNeighbors);
    }
    let n = points.len();
    let codes = points.codes();
    let index = DistanceIndex::build(points, metric)?;
    let positions = points.positions_with_code(a_code);
    let lists = neighbor_lists_for(&index, &positions, k)?;

    positions
        .par_iter()
        .zip(lists.par_iter())
        .map(|(&pos, neighbors)| {
            let n_b_eff = effective_b_count(points, codes[pos], b_code)?;
            let observed = lclq_value(neighbors, codes, b_code, kernel, n, n_b_eff);
            let point = points.point(pos);
            let mut rng = derive_rng(sim.seed, point.id);
            let mut pool = Vec::with_capacity(n - 1);
            let mut labels = Vec::with_capacity(n);
            let (mut n_ge, mut n_le) = (0usize, 0usize);
            for _ in 0..sim.trials {
                restricted_assignment_into(codes, pos, &mut rng, &mut pool, &mut labels);
                let s = lclq_value(neighbors, &labels, b_code, kernel, n, n_b_eff);
                if s >= observed {
                    n_ge += 1;
                }
                if s <= observed {
                    n_le += 1;
                }
            }
            let p = PValue::from_counts(n_ge, n_le, sim.trials);
            Ok(LclqRecord {
                point_id: point.id,
                a_category: point.category.clone(),
                b_category: b.to_string(),
                value: observed,
                p_value: Some(p.value),
                significant: Some(p.value <= sim.alpha),
                bandwidth_k: k,
                metric: metric.kind,
                kernel,
            })
        })
        .collect()
}
