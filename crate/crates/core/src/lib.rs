//! Point-based spatial colocation analysis.
//!
//! Measures the association between categories of points — crimes and
//! facilities, shops and transit stops — from the directional, neighbor-rank
//! view: how often are type-B points among the k nearest neighbors of type-A
//! points, relative to random labeling?
//!
//! # Modules
//!
//! - [`point_data`]: categorized points, road networks, CSV/GeoJSON loading,
//!   point-to-edge snapping
//! - [`metric`]: k-nearest-neighbor lists and pairwise distances, Euclidean
//!   or street-network
//! - [`colocation`]: the global colocation quotient and its kernel-weighted
//!   local variant over adaptive bandwidths
//! - [`inference`]: restricted and global random-labeling Monte Carlo tests
//!   with deterministic seeding
//! - [`diagnostics`]: cross K function with simulation envelopes and the
//!   nearest-neighbor index
//!
//! Quotients read as: 1 matches the random-labeling expectation, above 1 the
//! A points are attracted to B points, below 1 they are isolated from them.
//!
//! ```
//! use colocate::colocation::{global_clq, Kernel};
//! use colocate::metric::MetricConfig;
//! use colocate::point_data::{PointSet, SpatialPoint};
//!
//! let points = PointSet::new(vec![
//!     SpatialPoint::new(0, 0.0, 0.0, "cafe"),
//!     SpatialPoint::new(1, 1.0, 0.0, "theft"),
//!     SpatialPoint::new(2, 2.0, 0.0, "cafe"),
//!     SpatialPoint::new(3, 50.0, 0.0, "theft"),
//! ]).unwrap();
//! let r = global_clq(&points, "theft", "cafe", 1, &MetricConfig::euclidean()).unwrap();
//! assert!(r.value > 0.0);
//! ```

pub mod colocation;
pub mod diagnostics;
pub mod error;
pub mod inference;
pub mod metric;
pub mod point_data;

pub use colocation::{global_clq, kernel_weight, lclq, lclq_all, ClqResult, Kernel, LclqRecord};
pub use diagnostics::{cross_k, nni, CrossKCurve, NniResult};
pub use error::{Error, Result};
pub use inference::{
    derive_rng, relabel_global, relabel_restricted, test_global_clq, test_global_clq_batch,
    test_lclq, PValue, SimulationConfig,
};
pub use metric::{knn, pairwise_distance, MetricConfig, MetricKind, Neighbor, NeighborList};
pub use point_data::{
    load_network, load_points, snap_points, PointSet, RoadNetwork, SnappedPoint, SpatialPoint,
};
