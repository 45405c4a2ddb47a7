//! Categorized point data and road networks.
//!
//! Everything here is immutable after construction and safe to share across
//! threads; category bookkeeping (total counts, per-point category codes) is
//! computed once at load time and reused by every quotient downstream.

mod io;
mod network;

pub use io::{
    load_network, load_network_csv, load_network_geojson, load_points, load_points_csv,
    load_points_geojson, write_points_csv,
};
pub use network::{
    snap_points, NetworkSummary, RoadEdge, RoadNetwork, SnappedPoint, DEFAULT_SNAP_WARN_METERS,
};

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

/// A single categorized point in projected planar coordinates (meters).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialPoint {
    /// Unique identifier within a [`PointSet`].
    pub id: u64,
    pub x: f64,
    pub y: f64,
    /// Category label; never empty.
    pub category: String,
}

impl SpatialPoint {
    pub fn new(id: u64, x: f64, y: f64, category: impl Into<String>) -> Self {
        Self {
            id,
            x,
            y,
            category: category.into(),
        }
    }
}

/// An immutable collection of categorized points.
///
/// Construction validates ids (unique), coordinates (finite) and categories
/// (non-empty), and precomputes per-category counts plus a compact integer
/// code per point so relabeling trials never touch strings.
#[derive(Debug, Clone)]
pub struct PointSet {
    points: Vec<SpatialPoint>,
    category_names: Vec<String>,
    category_counts: BTreeMap<String, usize>,
    codes: Vec<u32>,
    index_by_id: HashMap<u64, usize>,
}

impl PointSet {
    pub fn new(points: Vec<SpatialPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("point set has no points".into()));
        }
        let mut index_by_id = HashMap::with_capacity(points.len());
        let mut category_counts: BTreeMap<String, usize> = BTreeMap::new();
        for (pos, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "point {}: coordinates must be finite, got ({}, {})",
                    p.id, p.x, p.y
                )));
            }
            if p.category.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "point {}: empty category",
                    p.id
                )));
            }
            if index_by_id.insert(p.id, pos).is_some() {
                return Err(Error::DuplicateId(p.id));
            }
            *category_counts.entry(p.category.clone()).or_insert(0) += 1;
        }
        // BTreeMap iteration order gives stable, sorted category codes.
        let category_names: Vec<String> = category_counts.keys().cloned().collect();
        let code_by_name: HashMap<&str, u32> = category_names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.as_str(), i as u32))
            .collect();
        let codes = points
            .iter()
            .map(|p| code_by_name[p.category.as_str()])
            .collect();
        Ok(Self {
            points,
            category_names,
            category_counts,
            codes,
            index_by_id,
        })
    }

    /// Total number of points (the `N` of every quotient).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpatialPoint] {
        &self.points
    }

    pub fn point(&self, position: usize) -> &SpatialPoint {
        &self.points[position]
    }

    /// Position of a point id in input order, if present.
    pub fn position_of(&self, id: u64) -> Option<usize> {
        self.index_by_id.get(&id).copied()
    }

    pub fn category_counts(&self) -> &BTreeMap<String, usize> {
        &self.category_counts
    }

    /// Count of points in `category` (0 when absent).
    pub fn count_of(&self, category: &str) -> usize {
        self.category_counts.get(category).copied().unwrap_or(0)
    }

    /// Distinct category labels in sorted order; the index is the code.
    pub fn categories(&self) -> &[String] {
        &self.category_names
    }

    /// Compact code for a category label.
    pub fn code_of(&self, category: &str) -> Option<u32> {
        self.category_names
            .binary_search_by(|c| c.as_str().cmp(category))
            .ok()
            .map(|i| i as u32)
    }

    pub fn category_name(&self, code: u32) -> &str {
        &self.category_names[code as usize]
    }

    /// Per-point category codes, in input order.
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    /// Positions of all points whose category has `code`, in input order.
    pub fn positions_with_code(&self, code: u32) -> Vec<usize> {
        self.codes
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == code)
            .map(|(i, _)| i)
            .collect()
    }

    /// Resolves a category label, erroring when absent.
    pub fn require_category(&self, category: &str) -> Result<u32> {
        self.code_of(category)
            .ok_or_else(|| Error::CategoryNotFound(category.to_string()))
    }
}
