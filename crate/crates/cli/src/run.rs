//! Subcommand execution: wire ingestion through the analysis layers to the
//! writers.

use std::path::Path;
use std::sync::Arc;

use colocate::colocation::{lclq_all, Kernel};
use colocate::diagnostics::{cross_k, nni};
use colocate::inference::{test_global_clq_batch, test_lclq, SimulationConfig};
use colocate::metric::{MetricConfig, MetricKind};
use colocate::point_data::{
    load_network_csv, load_network_geojson, load_points_csv, load_points_geojson, PointSet,
    RoadNetwork,
};
use rand::Rng;

use crate::output::{self, MetricComparisonRow};
use crate::{
    AreaArgs, CliError, Command, CompareMetricsArgs, CrossKArgs, GlobalClqArgs, KernelArg,
    LclqArgs, MetricArg, NetworkArgs, NniArgs,
};

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::GlobalClq(args) => run_global(args),
        Command::Lclq(args) => run_lclq(args),
        Command::CrossK(args) => run_crossk(args),
        Command::Nni(args) => run_nni(args),
        Command::CompareMetrics(args) => run_compare_metrics(args),
        Command::Run(args) => {
            let file = open(&args.config)?;
            let bad =
                |e: serde_json::Error| CliError::Usage(format!("{}: {e}", args.config.display()));
            // Accept either a bare config object or a whole metadata
            // sidecar, which nests the config one level down.
            let mut value: serde_json::Value = serde_json::from_reader(file).map_err(bad)?;
            if let Some(inner) = value.get_mut("config") {
                value = inner.take();
            }
            let inner: Command = serde_json::from_value(value).map_err(bad)?;
            execute(inner)
        }
    }
}

fn run_global(args: GlobalClqArgs) -> Result<(), CliError> {
    let seed = effective_seed(args.sim.seed);
    let points = load_points(&args.input.points, &args.input.category_field)?;
    let metric = build_metric(args.metric, &args.net)?;
    let sim = SimulationConfig::new(args.sim.permutations, seed)?.with_alpha(args.sim.alpha)?;

    let pairs: Vec<(String, String)> = args
        .a
        .iter()
        .flat_map(|a| args.b.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    eprintln!(
        "global-clq: {} pair(s) x {} bandwidth(s), {} trials each (seed {seed})",
        pairs.len(),
        args.k.len(),
        sim.trials
    );

    // One shared neighbor pass per bandwidth, then rows in a, b, k order.
    let mut per_k = Vec::new();
    for &k in &args.k {
        per_k.push(test_global_clq_batch(&points, &pairs, k, &metric, &sim)?);
    }
    let mut rows = Vec::with_capacity(pairs.len() * args.k.len());
    for pair_idx in 0..pairs.len() {
        for batch in &per_k {
            rows.push(batch[pair_idx].clone());
        }
    }
    let out = args.out.clone();
    output::write_global_csv(&out, &rows, sim.trials, seed)?;
    output::write_metadata_sidecar(&out, Some(seed), &Command::GlobalClq(args))?;
    Ok(())
}

fn run_lclq(args: LclqArgs) -> Result<(), CliError> {
    let seed = effective_seed(args.sim.seed);
    let points = load_points(&args.input.points, &args.input.category_field)?;
    let metric = build_metric(args.metric, &args.net)?;
    let sim = SimulationConfig::new(args.sim.permutations, seed)?.with_alpha(args.sim.alpha)?;
    eprintln!(
        "lclq: {} focal point(s) x {} trials (seed {seed})",
        points.count_of(&args.a),
        sim.trials
    );
    let records = test_lclq(
        &points,
        &args.a,
        &args.b,
        args.k,
        &metric,
        kernel(args.kernel),
        &sim,
    )?;

    let geojson_path = args
        .geojson_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("geojson"));
    let config = Command::Lclq(args.clone());
    output::write_lclq_csv(&args.out, &points, &records)?;
    output::write_metadata_sidecar(&args.out, Some(seed), &config)?;
    output::write_lclq_geojson(&geojson_path, &points, &records, Some(seed), &config)?;
    let significant = records
        .iter()
        .filter(|r| r.significant == Some(true))
        .count();
    eprintln!(
        "lclq: {significant} of {} significant at alpha={}",
        records.len(),
        sim.alpha
    );
    Ok(())
}

fn run_crossk(args: CrossKArgs) -> Result<(), CliError> {
    let seed = effective_seed(args.seed);
    let points = load_points(&args.input.points, &args.input.category_field)?;
    let metric = build_metric(args.metric, &args.net)?;
    let area = resolve_area(&args.area, &points)?;
    let sim = SimulationConfig::new(args.permutations, seed)?;
    if let Some(net) = &metric.network {
        if net.component_count() > 1 {
            eprintln!(
                "warning: network has {} components; disconnected pairs are never counted",
                net.component_count()
            );
        }
    }
    let curve = cross_k(
        &points, &args.a, &args.b, args.dmax, args.steps, &metric, area, &sim,
    )?;
    let (above, below) = curve.excursions();
    eprintln!(
        "cross-k: observed within envelopes at {}/{} steps ({above} above, {below} below), seed {seed}",
        curve.distances.len() - above - below,
        curve.distances.len()
    );
    let out = args.out.clone();
    output::write_crossk_csv(&out, &curve)?;
    output::write_metadata_sidecar(&out, Some(seed), &Command::CrossK(args))?;
    Ok(())
}

fn run_nni(args: NniArgs) -> Result<(), CliError> {
    let points = load_points(&args.input.points, &args.input.category_field)?;
    let area = resolve_area(&args.area, &points)?;
    let result = nni(&points, args.a.as_deref(), area)?;
    println!(
        "nni index={} z={} n={} area={} mean_observed={} mean_expected={}",
        result.index,
        result.z_score,
        result.n,
        result.area,
        result.mean_observed,
        result.mean_expected
    );
    if let Some(out) = args.out.clone() {
        output::write_nni_csv(&out, &result)?;
        output::write_metadata_sidecar(&out, None, &Command::Nni(args))?;
    }
    Ok(())
}

fn run_compare_metrics(args: CompareMetricsArgs) -> Result<(), CliError> {
    let points = load_points(&args.input.points, &args.input.category_field)?;
    let network_metric = build_metric(MetricArg::Network, &args.net)?;
    let euclidean = lclq_all(
        &points,
        &args.a,
        &args.b,
        args.k,
        &MetricConfig::euclidean(),
        kernel(args.kernel),
    )?;
    let network = lclq_all(
        &points,
        &args.a,
        &args.b,
        args.k,
        &network_metric,
        kernel(args.kernel),
    )?;

    let mut rows = Vec::with_capacity(euclidean.len());
    for (e, n) in euclidean.iter().zip(&network) {
        debug_assert_eq!(e.point_id, n.point_id);
        let p = points.point(points.position_of(e.point_id).expect("id in set"));
        rows.push(MetricComparisonRow {
            id: e.point_id,
            x: p.x,
            y: p.y,
            lclq_euclidean: e.value,
            lclq_network: n.value,
        });
    }
    let r = pearson(
        &euclidean.iter().map(|r| r.value).collect::<Vec<_>>(),
        &network.iter().map(|r| r.value).collect::<Vec<_>>(),
    );
    println!("pearson_r={r} n_points={}", rows.len());
    let out = args.out.clone();
    output::write_compare_csv(&out, &rows)?;
    output::write_metadata_sidecar(&out, None, &Command::CompareMetrics(args))?;
    Ok(())
}

fn effective_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let drawn = rand::rng().random::<u64>();
        eprintln!("seed: {drawn} (drawn from entropy; pass --seed {drawn} to reproduce)");
        drawn
    })
}

fn kernel(arg: KernelArg) -> Kernel {
    match arg {
        KernelArg::Gaussian => Kernel::Gaussian,
        KernelArg::Box => Kernel::Box,
    }
}

fn open(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
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

fn load_points(path: &Path, category_field: &str) -> Result<PointSet, CliError> {
    let file = open(path)?;
    let points = if is_geojson(path) {
        load_points_geojson(file, category_field)?
    } else {
        load_points_csv(file)?
    };
    Ok(points)
}

fn build_metric(metric: MetricArg, net_args: &NetworkArgs) -> Result<MetricConfig, CliError> {
    match metric {
        MetricArg::Euclidean => Ok(MetricConfig::euclidean()),
        MetricArg::Network => {
            let net = load_network(net_args)?;
            let mut config = MetricConfig::network(Arc::new(net));
            config.snap_warn_threshold = net_args.snap_warn;
            debug_assert_eq!(config.kind, MetricKind::Network);
            Ok(config)
        }
    }
}

fn load_network(net_args: &NetworkArgs) -> Result<RoadNetwork, CliError> {
    let path = net_args.network.as_ref().ok_or_else(|| {
        CliError::Usage("--network is required with the network metric".to_string())
    })?;
    let (net, warnings) = if is_geojson(path) {
        load_network_geojson(open(path)?)?
    } else {
        let nodes = net_args.nodes.as_ref().ok_or_else(|| {
            CliError::Usage("--nodes is required when --network is an edge CSV".to_string())
        })?;
        load_network_csv(open(nodes)?, open(path)?)?
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let s = net.summary();
    eprintln!(
        "network: {} nodes, {} edges, {} component(s)",
        s.node_count, s.edge_count, s.component_count
    );
    Ok(net)
}

fn resolve_area(area: &AreaArgs, points: &PointSet) -> Result<f64, CliError> {
    match (area.area, area.area_bbox) {
        (Some(_), true) => Err(CliError::Usage(
            "pass either --area or --area-bbox, not both".to_string(),
        )),
        (Some(a), false) => Ok(a),
        (None, true) => {
            let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
            let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in points.points() {
                min_x = min_x.min(p.x);
                min_y = min_y.min(p.y);
                max_x = max_x.max(p.x);
                max_y = max_y.max(p.y);
            }
            let bbox = (max_x - min_x) * (max_y - min_y);
            eprintln!(
                "warning: using bounding-box area {bbox}; supply --area for a real study area"
            );
            Ok(bbox)
        }
        (None, false) => Err(CliError::Usage(
            "a study area is required: pass --area M2 or --area-bbox".to_string(),
        )),
    }
}

/// Pearson correlation of two equal-length value vectors.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::pearson;

    #[test]
    fn pearson_reference_values() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&xs, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-12);
        assert!((pearson(&xs, &[8.0, 6.0, 4.0, 2.0]) + 1.0).abs() < 1e-12);
        let r = pearson(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]);
        assert!((r - 0.8).abs() < 1e-12);
    }
}
