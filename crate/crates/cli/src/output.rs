//! Output writers: CSV tables, GeoJSON feature collections, and the
//! reproducibility metadata that rides along with every file.

use std::io::Write;
use std::path::{Path, PathBuf};

use colocate::colocation::{ClqResult, LclqRecord};
use colocate::diagnostics::{CrossKCurve, NniResult};
use colocate::point_data::PointSet;
use serde_json::{json, Value};

use crate::{CliError, Command};

pub const TOOL_NAME: &str = "colocate";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The metadata object embedded in GeoJSON outputs and written as a sidecar
/// next to CSV outputs: enough to reproduce the run byte for byte.
pub fn metadata_value(seed: Option<u64>, config: &Command) -> Value {
    json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "seed": seed,
        "config": serde_json::to_value(config).expect("config serializes"),
    })
}

/// Writes `<out>.meta.json` alongside an output file.
pub fn write_metadata_sidecar(
    out: &Path,
    seed: Option<u64>,
    config: &Command,
) -> Result<PathBuf, CliError> {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    let path = out.with_file_name(name);
    let body = serde_json::to_string_pretty(&metadata_value(seed, config)).expect("serializes");
    write_file(&path, format!("{body}\n").as_bytes())?;
    Ok(path)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let attach = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(attach)?;
    f.write_all(bytes).map_err(attach)?;
    Ok(())
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_global_csv(
    path: &Path,
    rows: &[ClqResult],
    trials: usize,
    seed: u64,
) -> Result<(), CliError> {
    let mut body = String::from("a,b,k,metric,clq,p_value,n_a,n_b,n,M,seed\n");
    for r in rows {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.a_category,
            r.b_category,
            r.bandwidth_k,
            r.metric,
            r.value,
            opt_f64(r.p_value.as_ref().map(|p| p.value)),
            r.n_a,
            r.n_b,
            r.n_total,
            trials,
            seed,
        ));
    }
    write_file(path, body.as_bytes())
}

/// Per-point rows `id,x,y,lclq,p_value,significant`; coordinates come from
/// the originating point set.
pub fn write_lclq_csv(
    path: &Path,
    points: &PointSet,
    records: &[LclqRecord],
) -> Result<(), CliError> {
    let mut body = String::from("id,x,y,lclq,p_value,significant\n");
    for r in records {
        let p = points.point(points.position_of(r.point_id).expect("record id in set"));
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.point_id,
            p.x,
            p.y,
            r.value,
            opt_f64(r.p_value),
            r.significant.map(|s| s.to_string()).unwrap_or_default(),
        ));
    }
    write_file(path, body.as_bytes())
}

/// GeoJSON FeatureCollection equivalent of the LCLQ table, with run
/// metadata embedded as a foreign member.
pub fn lclq_feature_collection(
    points: &PointSet,
    records: &[LclqRecord],
    seed: Option<u64>,
    config: &Command,
) -> Value {
    let features: Vec<Value> = records
        .iter()
        .map(|r| {
            let p = points.point(points.position_of(r.point_id).expect("record id in set"));
            json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": [p.x, p.y] },
                "properties": {
                    "id": r.point_id,
                    "category": r.a_category,
                    "lclq": r.value,
                    "p_value": r.p_value,
                    "significant": r.significant,
                },
            })
        })
        .collect();
    json!({
        "type": "FeatureCollection",
        "metadata": metadata_value(seed, config),
        "features": features,
    })
}

pub fn write_lclq_geojson(
    path: &Path,
    points: &PointSet,
    records: &[LclqRecord],
    seed: Option<u64>,
    config: &Command,
) -> Result<(), CliError> {
    let body =
        serde_json::to_string_pretty(&lclq_feature_collection(points, records, seed, config))
            .expect("serializes");
    write_file(path, format!("{body}\n").as_bytes())
}

pub fn write_crossk_csv(path: &Path, curve: &CrossKCurve) -> Result<(), CliError> {
    let mut body = String::from("distance,k_observed,env_low,env_high\n");
    for i in 0..curve.distances.len() {
        body.push_str(&format!(
            "{},{},{},{}\n",
            curve.distances[i], curve.k_observed[i], curve.envelope_low[i], curve.envelope_high[i],
        ));
    }
    write_file(path, body.as_bytes())
}

pub fn write_nni_csv(path: &Path, r: &NniResult) -> Result<(), CliError> {
    let body = format!(
        "n,area,index,z_score,mean_observed,mean_expected\n{},{},{},{},{},{}\n",
        r.n, r.area, r.index, r.z_score, r.mean_observed, r.mean_expected,
    );
    write_file(path, body.as_bytes())
}

/// Per-point comparison rows for the two metrics.
pub struct MetricComparisonRow {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    pub lclq_euclidean: f64,
    pub lclq_network: f64,
}

pub fn write_compare_csv(path: &Path, rows: &[MetricComparisonRow]) -> Result<(), CliError> {
    let mut body = String::from("id,x,y,lclq_euclidean,lclq_network,delta\n");
    for r in rows {
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.id,
            r.x,
            r.y,
            r.lclq_euclidean,
            r.lclq_network,
            r.lclq_network - r.lclq_euclidean,
        ));
    }
    write_file(path, body.as_bytes())
}
