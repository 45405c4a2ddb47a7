//! CSV and GeoJSON ingestion.
//!
//! Point CSV schema: `id,x,y,category` (header required, UTF-8, `.` decimal).
//! Network CSV schema: edge table `from_id,to_id,length` plus node table
//! `node_id,x,y`. GeoJSON alternatives: a FeatureCollection of Points with
//! the category in a configurable property key, or a FeatureCollection of
//! LineStrings decomposed into straight edges at vertices.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::point_data::{PointSet, RoadNetwork, SpatialPoint};

/// Loads a point set from a path, dispatching on extension:
/// `.geojson`/`.json` are parsed as GeoJSON, anything else as CSV.
pub fn load_points(path: &Path, category_field: &str) -> Result<PointSet> {
    let file = std::fs::File::open(path)?;
    if is_geojson(path) {
        load_points_geojson(file, category_field)
    } else {
        load_points_csv(file)
    }
}

/// Loads points from CSV with the required `id,x,y,category` header.
pub fn load_points_csv<R: Read>(reader: R) -> Result<PointSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MalformedRow {
                row: 1,
                message: format!("missing column {name:?}"),
            })
    };
    let (id_col, x_col, y_col, cat_col) = (col("id")?, col("x")?, col("y")?, col("category")?);

    let mut points = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2; // 1-based, after the header
        let record = record?;
        let field = |c: usize, name: &str| -> Result<&str> {
            record
                .get(c)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::MalformedRow {
                    row,
                    message: format!("missing field {name:?}"),
                })
        };
        let id: u64 = parse_field(field(id_col, "id")?, row, "id")?;
        let x: f64 = parse_field(field(x_col, "x")?, row, "x")?;
        let y: f64 = parse_field(field(y_col, "y")?, row, "y")?;
        let category = field(cat_col, "category")?.to_string();
        points.push(SpatialPoint { id, x, y, category });
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("no point rows".into()));
    }
    PointSet::new(points)
}

/// Loads points from a GeoJSON FeatureCollection of Point features.
///
/// The category is read from `category_field` in each feature's properties;
/// string, number, and boolean values are accepted and coerced to strings.
/// Ids come from an `id` property or the feature `id`, and are assigned
/// sequentially when absent.
pub fn load_points_geojson<R: Read>(mut reader: R, category_field: &str) -> Result<PointSet> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let root: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidGeoJson(format!("parse failure: {e}")))?;
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            Error::InvalidGeoJson("expected a FeatureCollection with features".into())
        })?;

    let mut points = Vec::with_capacity(features.len());
    let mut next_id = 0u64;
    for (i, feature) in features.iter().enumerate() {
        let geometry = feature
            .get("geometry")
            .filter(|g| !g.is_null())
            .ok_or_else(|| Error::InvalidGeoJson(format!("feature {i}: missing geometry")))?;
        let gtype = geometry.get("type").and_then(Value::as_str).unwrap_or("");
        if gtype != "Point" {
            return Err(Error::InvalidGeoJson(format!(
                "feature {i}: expected Point, got {gtype:?}"
            )));
        }
        let coords = geometry
            .get("coordinates")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidGeoJson(format!("feature {i}: missing coordinates")))?;
        if coords.len() < 2 {
            return Err(Error::InvalidGeoJson(format!(
                "feature {i}: expected [x, y] coordinates"
            )));
        }
        let x = coords[0]
            .as_f64()
            .ok_or_else(|| Error::InvalidGeoJson(format!("feature {i}: x is not a number")))?;
        let y = coords[1]
            .as_f64()
            .ok_or_else(|| Error::InvalidGeoJson(format!("feature {i}: y is not a number")))?;

        let properties = feature.get("properties").cloned().unwrap_or(Value::Null);
        let category = properties
            .get(category_field)
            .and_then(scalar_to_string)
            .ok_or_else(|| {
                Error::InvalidGeoJson(format!(
                    "feature {i}: missing category property {category_field:?}"
                ))
            })?;
        let id = properties
            .get("id")
            .and_then(Value::as_u64)
            .or_else(|| feature.get("id").and_then(Value::as_u64))
            .unwrap_or_else(|| {
                let id = next_id;
                next_id += 1;
                id
            });
        next_id = next_id.max(id.saturating_add(1));
        points.push(SpatialPoint { id, x, y, category });
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("no point features".into()));
    }
    PointSet::new(points)
}

/// Writes a point set back out in the canonical CSV schema.
pub fn write_points_csv<W: Write>(points: &PointSet, mut writer: W) -> Result<()> {
    writeln!(writer, "id,x,y,category")?;
    for p in points.points() {
        writeln!(writer, "{},{},{},{}", p.id, p.x, p.y, p.category)?;
    }
    Ok(())
}

/// Loads a road network from a path. GeoJSON files hold LineStrings;
/// otherwise `path` is the edge CSV and `nodes_path` must name the node CSV.
pub fn load_network(path: &Path, nodes_path: Option<&Path>) -> Result<(RoadNetwork, Vec<String>)> {
    if is_geojson(path) {
        load_network_geojson(std::fs::File::open(path)?)
    } else {
        let nodes_path = nodes_path.ok_or_else(|| {
            Error::InvalidParameter("a node table is required alongside an edge CSV".into())
        })?;
        load_network_csv(std::fs::File::open(nodes_path)?, std::fs::File::open(path)?)
    }
}

/// Loads a network from a `node_id,x,y` table and a `from_id,to_id,length` table.
pub fn load_network_csv<R1: Read, R2: Read>(
    nodes: R1,
    edges: R2,
) -> Result<(RoadNetwork, Vec<String>)> {
    let mut node_rows = Vec::new();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(nodes);
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record?;
        if record.len() < 3 {
            return Err(Error::MalformedRow {
                row,
                message: "expected node_id,x,y".into(),
            });
        }
        let id: u64 = parse_field(&record[0], row, "node_id")?;
        let x: f64 = parse_field(&record[1], row, "x")?;
        let y: f64 = parse_field(&record[2], row, "y")?;
        node_rows.push((id, x, y));
    }

    let mut edge_rows = Vec::new();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(edges);
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record?;
        if record.len() < 3 {
            return Err(Error::MalformedRow {
                row,
                message: "expected from_id,to_id,length".into(),
            });
        }
        let from: u64 = parse_field(&record[0], row, "from_id")?;
        let to: u64 = parse_field(&record[1], row, "to_id")?;
        let length: f64 = parse_field(&record[2], row, "length")?;
        edge_rows.push((from, to, length));
    }
    RoadNetwork::new(node_rows, edge_rows)
}

/// Loads a network from a GeoJSON FeatureCollection of LineStrings.
///
/// Each linestring is decomposed into straight edges at its vertices; nodes
/// are deduplicated on exact coordinates. Edge length is the chord length
/// unless the feature carries a `length` property and is a single segment.
pub fn load_network_geojson<R: Read>(mut reader: R) -> Result<(RoadNetwork, Vec<String>)> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let root: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidGeoJson(format!("parse failure: {e}")))?;
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            Error::InvalidGeoJson("expected a FeatureCollection with features".into())
        })?;

    let mut node_ids: HashMap<(u64, u64), u64> = HashMap::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut extra_warnings = Vec::new();
    let mut node_for = |x: f64, y: f64, nodes: &mut Vec<(u64, f64, f64)>| -> u64 {
        let key = (x.to_bits(), y.to_bits());
        *node_ids.entry(key).or_insert_with(|| {
            let id = nodes.len() as u64;
            nodes.push((id, x, y));
            id
        })
    };

    for (i, feature) in features.iter().enumerate() {
        let geometry = feature
            .get("geometry")
            .filter(|g| !g.is_null())
            .ok_or_else(|| Error::InvalidGeoJson(format!("feature {i}: missing geometry")))?;
        let gtype = geometry.get("type").and_then(Value::as_str).unwrap_or("");
        if gtype != "LineString" {
            return Err(Error::InvalidGeoJson(format!(
                "feature {i}: expected LineString, got {gtype:?}"
            )));
        }
        let coords = geometry
            .get("coordinates")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidGeoJson(format!("feature {i}: missing coordinates")))?;
        if coords.len() < 2 {
            return Err(Error::InvalidGeoJson(format!(
                "feature {i}: linestring needs >= 2 vertices"
            )));
        }
        let vertex = |v: &Value| -> Result<(f64, f64)> {
            let pair = v
                .as_array()
                .filter(|a| a.len() >= 2)
                .ok_or_else(|| Error::InvalidGeoJson(format!("feature {i}: bad vertex")))?;
            match (pair[0].as_f64(), pair[1].as_f64()) {
                (Some(x), Some(y)) => Ok((x, y)),
                _ => Err(Error::InvalidGeoJson(format!(
                    "feature {i}: non-numeric vertex"
                ))),
            }
        };
        let explicit_length = feature
            .get("properties")
            .and_then(|p| p.get("length"))
            .and_then(Value::as_f64);
        if explicit_length.is_some() && coords.len() > 2 {
            extra_warnings.push(format!(
                "feature {i}: length property ignored for a multi-segment linestring"
            ));
        }
        for pair in coords.windows(2) {
            let (x0, y0) = vertex(&pair[0])?;
            let (x1, y1) = vertex(&pair[1])?;
            let from = node_for(x0, y0, &mut nodes);
            let to = node_for(x1, y1, &mut nodes);
            let chord = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            let length = match explicit_length {
                Some(len) if coords.len() == 2 => len,
                _ => chord,
            };
            edges.push((from, to, length));
        }
    }
    let (net, mut warnings) = RoadNetwork::new(nodes, edges)?;
    warnings.extend(extra_warnings);
    Ok((net, warnings))
}

fn is_geojson(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref(),
        Some("geojson") | Some("json")
    )
}

fn scalar_to_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) if !s.is_empty() => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, row: usize, name: &str) -> Result<T> {
    s.parse().map_err(|_| Error::MalformedRow {
        row,
        message: format!("cannot parse {name:?} from {s:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_three_rows() {
        let data = "id,x,y,category\n0,0,0,A\n1,1,0,A\n2,5,5,B\n";
        let ps = load_points_csv(data.as_bytes()).unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.count_of("A"), 2);
        assert_eq!(ps.count_of("B"), 1);
    }

    #[test]
    fn csv_bad_x_names_row() {
        let data = "id,x,y,category\n0,0,0,A\n1,abc,0,A\n";
        let err = load_points_csv(data.as_bytes()).unwrap_err();
        match err {
            Error::MalformedRow { row, message } => {
                assert_eq!(row, 3);
                assert!(message.contains("\"x\""), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn csv_coincident_rows_kept() {
        let data = "id,x,y,category\n0,2,2,A\n1,2,2,B\n";
        let ps = load_points_csv(data.as_bytes()).unwrap();
        assert_eq!(ps.len(), 2);
    }

    #[test]
    fn csv_empty_source_errors() {
        let err = load_points_csv("id,x,y,category\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn csv_round_trip_preserves_everything() {
        let data = "id,x,y,category\n0,0.25,-3.5,A\n7,1e6,0.1,B\n9,4,4,A\n";
        let ps = load_points_csv(data.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_points_csv(&ps, &mut buf).unwrap();
        let again = load_points_csv(buf.as_slice()).unwrap();
        assert_eq!(ps.points(), again.points());
        assert_eq!(ps.category_counts(), again.category_counts());
    }

    #[test]
    fn geojson_points_with_category_key() {
        let data = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","geometry":{"type":"Point","coordinates":[1.0,2.0]},"properties":{"kind":"A"}},
            {"type":"Feature","geometry":{"type":"Point","coordinates":[3.0,4.0]},"properties":{"kind":"B","id":11}}
        ]}"#;
        let ps = load_points_geojson(data.as_bytes(), "kind").unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.points()[0].id, 0);
        assert_eq!(ps.points()[1].id, 11);
        assert_eq!(ps.count_of("B"), 1);
    }

    #[test]
    fn geojson_missing_category_errors() {
        let data = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","geometry":{"type":"Point","coordinates":[1.0,2.0]},"properties":{}}
        ]}"#;
        let err = load_points_geojson(data.as_bytes(), "category").unwrap_err();
        assert!(matches!(err, Error::InvalidGeoJson(_)));
    }

    #[test]
    fn network_csv_pair() {
        let nodes = "node_id,x,y\n0,0,0\n1,3,0\n2,3,4\n";
        let edges = "from_id,to_id,length\n0,1,3\n1,2,4\n";
        let (net, warnings) = load_network_csv(nodes.as_bytes(), edges.as_bytes()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(net.summary().node_count, 3);
        assert_eq!(net.summary().edge_count, 2);
        assert_eq!(net.summary().component_count, 1);
    }

    #[test]
    fn geojson_linestring_decomposes_at_vertices() {
        let data = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,0],[3,0],[3,4]]},"properties":{}}
        ]}"#;
        let (net, _) = load_network_geojson(data.as_bytes()).unwrap();
        assert_eq!(net.edge_count(), 2);
        assert_eq!(net.node_count(), 3);
        assert!((net.edges()[0].length - 3.0).abs() < 1e-12);
        assert!((net.edges()[1].length - 4.0).abs() < 1e-12);
    }

    #[test]
    fn geojson_shared_vertices_are_merged() {
        let data = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,0],[1,0]]},"properties":{}},
            {"type":"Feature","geometry":{"type":"LineString","coordinates":[[1,0],[2,0]]},"properties":{}}
        ]}"#;
        let (net, _) = load_network_geojson(data.as_bytes()).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.component_count(), 1);
    }
}
