use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use latsample_core::decision::ComplianceRule;
use latsample_core::experiments::write_error_table;
use latsample_core::topology::synthetic::{metro, MetroParams};
use latsample_core::{
    build_path_model, calibrate_path_with_tolerance, cochran_n, collect_samples, route,
    run_error_table, run_heatmap, run_selection, Error, ExperimentConfig, Topology,
};
use serde_json::json;

use crate::manifest::{sha256_hex, OutputDir, Summary, SUMMARY_FILE};
use crate::{
    svg, CalibrateArgs, Cli, CochranArgs, Command, HeatmapArgs, RuleArgs, SampleArgs, SelectArgs,
    SynthArgs, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_USAGE,
};

/// Bad flag values that clap cannot reject on its own.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(String);

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Domain(_) => EXIT_USAGE,
                Error::Infeasible { .. } => EXIT_INFEASIBLE,
                _ => EXIT_INPUT,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_INPUT;
        }
    }
    1
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let out = cli.out_dir.as_path();
    match &cli.command {
        Command::Cochran(args) => cochran(args, out),
        Command::Select(args) => select(args, out),
        Command::Heatmap(args) => heatmap(args, out),
        Command::Calibrate(args) => calibrate(args, out),
        Command::Sample(args) => sample(args, out),
        Command::SynthTopology(args) => synth(args, out),
    }
}

fn read_topology(path: &Path) -> anyhow::Result<(Topology, String)> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Parse(format!("{}: not UTF-8: {e}", path.display())))?;
    let topo =
        Topology::from_toml_str(text).with_context(|| format!("loading {}", path.display()))?;
    Ok((topo, sha256_hex(&bytes)))
}

fn rule(args: &RuleArgs) -> anyhow::Result<ComplianceRule> {
    Ok(ComplianceRule::new(args.threshold, args.required_fraction)?)
}

fn cochran(args: &CochranArgs, out: &Path) -> anyhow::Result<()> {
    let mut dir = OutputDir::create(out)?;
    if let Some(e) = args.e {
        let n0 = cochran_n(args.z, args.p, e)?;
        println!("n0 = {n0}");
        dir.write(
            "cochran_n.csv",
            format!("z,p,e,n0\n{},{},{},{}\n", args.z, args.p, e, n0),
        )?;
        dir.finish(
            "cochran",
            json!({ "z": args.z, "p": args.p, "e": e }),
            None,
            None,
        )?;
        return Ok(());
    }
    let sizes = args.n.clone().unwrap_or_else(|| {
        latsample_core::experiments::DEFAULT_SAMPLE_SIZES
            .map(|n| n as u64)
            .to_vec()
    });
    let rows = run_error_table(args.z, args.p, &sizes)?;
    println!("{:>8}  {:>8}", "n0", "e");
    for r in &rows {
        println!("{:>8}  {:>8.4}", r.n0, r.e);
    }
    let mut csv = Vec::new();
    write_error_table(&rows, &mut csv)?;
    dir.write("cochran.csv", csv)?;
    dir.finish(
        "cochran",
        json!({ "z": args.z, "p": args.p, "n": sizes }),
        None,
        None,
    )?;
    Ok(())
}

fn config(
    seed: u64,
    trials: usize,
    sizes: &[usize],
    rule: ComplianceRule,
    tie_break: latsample_core::TieBreakMode,
    workers: usize,
) -> anyhow::Result<ExperimentConfig> {
    let config = ExperimentConfig {
        master_seed: seed,
        trials,
        sample_sizes: sizes.to_vec(),
        rule,
        tie_break,
        workers,
    };
    config.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(config)
}

fn select(args: &SelectArgs, out: &Path) -> anyhow::Result<()> {
    let rule = rule(&args.rule)?;
    let config = config(
        args.run.seed,
        args.trials,
        &args.sizes,
        rule,
        args.tie_break,
        args.run.workers,
    )?;
    let (topo, hash) = read_topology(&args.topology)?;
    let mut labels = Vec::new();
    let mut models = Vec::new();
    let mut paths = Vec::new();
    for dest in &args.destinations {
        let path = route(&topo, &args.source, dest)?;
        let model = build_path_model(&topo, &path)?;
        labels.push(path.label());
        paths.push(json!({
            "label": path.label(),
            "links": path.link_ids,
            "length_km": topo.path_length_km(&path),
            "propagation_us": model.propagation_us(),
            "stage_means_us": model.stage_means_us(),
            "mean_us": model.mean_us(),
            "fraction_below_threshold": model.fraction_below(rule.threshold_us),
        }));
        models.push(model);
    }
    let result = run_selection(&models, &config)?;

    let mut dir = OutputDir::create(out)?;
    let mut csv = Vec::new();
    result.write_csv(&labels, &mut csv)?;
    dir.write("selection.csv", csv)?;
    let title = format!(
        "Path chosen as best ({} trials, threshold {} us)",
        config.trials, rule.threshold_us
    );
    dir.write(
        "selection.svg",
        svg::selection_bars(&result, &labels, &title),
    )?;

    let mut table = String::new();
    let _ = write!(table, "{:>8}", "n0");
    for l in &labels {
        let _ = write!(table, "  {l:>16}");
    }
    println!("{table}");
    let mut per_size = Vec::new();
    for (s, &n0) in result.sample_sizes.iter().enumerate() {
        let freqs = result.frequencies(s);
        let mut line = format!("{n0:>8}");
        for f in &freqs {
            let _ = write!(line, "  {:>15.2}%", 100.0 * f);
        }
        println!("{line}");
        per_size
            .push(json!({ "sample_size": n0, "frequencies": freqs, "counts": result.counts[s] }));
    }

    let config_echo = json!({
        "topology": args.topology,
        "source": args.source,
        "destinations": args.destinations,
        "experiment": config,
    });
    dir.write_json(
        SUMMARY_FILE,
        &Summary {
            experiment: "selection".into(),
            config: config_echo.clone(),
            aggregates: json!({ "paths": paths, "per_sample_size": per_size }),
        },
    )?;
    dir.finish("select", config_echo, Some(hash), Some(config.master_seed))?;
    Ok(())
}

fn heatmap(args: &HeatmapArgs, out: &Path) -> anyhow::Result<()> {
    let rule = rule(&args.rule)?;
    let config = config(
        args.run.seed,
        1,
        &args.sizes,
        rule,
        Default::default(),
        args.run.workers,
    )?;
    let (topo, hash) = read_topology(&args.topology)?;
    let results = run_heatmap(&topo, &config)?;

    let mut dir = OutputDir::create(out)?;
    let mut per_size = Vec::new();
    for r in &results {
        let n0 = r.sample_size;
        let mut csv = Vec::new();
        r.write_csv(&mut csv)?;
        dir.write(&format!("heatmap_n{n0}.csv"), csv)?;
        let title = format!("{} with {n0} samples per pair", topo.name());
        dir.write(&format!("heatmap_n{n0}.svg"), svg::heatmap(r, &title))?;
        println!("n0={n0} {}", r.report.summary_line());
        per_size.push(json!({
            "sample_size": n0,
            "fp": r.report.fp_count,
            "fn": r.report.fn_count,
            "tp": r.report.tp_count,
            "tn": r.report.tn_count,
        }));
    }
    let config_echo = json!({
        "topology": args.topology,
        "threshold_us": rule.threshold_us,
        "required_fraction": rule.required_fraction,
        "sample_sizes": config.sample_sizes,
        "master_seed": config.master_seed,
        "workers": config.workers,
    });
    let truth_compliant = results
        .first()
        .map_or(0, |r| r.cells.iter().filter(|c| c.truth).count());
    dir.write_json(
        SUMMARY_FILE,
        &Summary {
            experiment: "heatmap".into(),
            config: config_echo.clone(),
            aggregates: json!({
                "acos": results.first().map_or(0, |r| r.acos.len()),
                "macos": results.first().map_or(0, |r| r.macos.len()),
                "truly_compliant_pairs": truth_compliant,
                "per_sample_size": per_size,
            }),
        },
    )?;
    dir.finish("heatmap", config_echo, Some(hash), Some(config.master_seed))?;
    Ok(())
}

/// A series chain of `hops` equal links reproducing a calibrated model.
fn calibrated_fragment(
    name: &str,
    offset_us: f64,
    total_mean_us: f64,
    hops: usize,
    service_time_us: f64,
) -> anyhow::Result<Topology> {
    use latsample_core::{LinkSpec, NodeSpec, Role, PROPAGATION_US_PER_KM};

    let stage_mean = total_mean_us / hops as f64;
    let load = 1.0 - service_time_us / stage_mean;
    if !(load > 0.0 && load < 1.0) {
        return Err(UsageError(format!(
            "stage mean {stage_mean} us is not above the service time {service_time_us} us; \
             no link load reproduces it"
        ))
        .into());
    }
    let length_km = offset_us / PROPAGATION_US_PER_KM / hops as f64;
    if length_km.is_nan() || length_km <= 0.0 {
        return Err(UsageError(format!("offset {offset_us} us must be positive")).into());
    }
    let node_id = |i: usize| match i {
        0 => format!("{name}-src"),
        i if i == hops => format!("{name}-dst"),
        i => format!("{name}-h{i}"),
    };
    let nodes = (0..=hops)
        .map(|i| NodeSpec {
            id: node_id(i),
            role: match i {
                0 => Role::Aco,
                i if i == hops => Role::Maco,
                _ => Role::Transit,
            },
        })
        .collect();
    let links = (0..hops)
        .map(|i| {
            let mut l = LinkSpec::new(
                &format!("{name}-l{}", i + 1),
                &node_id(i),
                &node_id(i + 1),
                length_km,
                load,
            );
            l.mean_service_time_us = service_time_us;
            l
        })
        .collect();
    Ok(Topology::new(format!("{name}-calibrated"), nodes, links)?)
}

fn calibrate(args: &CalibrateArgs, out: &Path) -> anyhow::Result<()> {
    let cal = calibrate_path_with_tolerance(
        args.offset,
        args.mean,
        args.threshold,
        args.target,
        args.max_hops,
        args.tolerance,
    )?;
    let fragment = calibrated_fragment(
        &args.name,
        args.offset,
        args.mean,
        cal.hops,
        args.service_time,
    )?;
    println!("hops: {}", cal.hops);
    println!("stage mean: {} us", cal.model.stage_means_us()[0]);
    println!("path mean: {} us", cal.model.mean_us());
    println!(
        "fraction below {} us: {:.6} (target {})",
        args.threshold, cal.achieved, args.target
    );
    let mut dir = OutputDir::create(out)?;
    let file = format!("{}.toml", args.name);
    let path = dir.write(&file, fragment.to_toml())?;
    println!("topology fragment: {}", path.display());
    dir.finish(
        "calibrate",
        json!({
            "offset_us": args.offset,
            "mean_us": args.mean,
            "threshold_us": args.threshold,
            "target": args.target,
            "max_hops": args.max_hops,
            "tolerance": args.tolerance,
            "service_time_us": args.service_time,
            "hops": cal.hops,
            "achieved": cal.achieved,
        }),
        None,
        None,
    )?;
    Ok(())
}

fn sample(args: &SampleArgs, out: &Path) -> anyhow::Result<()> {
    if args.n == 0 {
        bail!(UsageError("--n must be at least 1".into()));
    }
    let (topo, hash) = read_topology(&args.topology)?;
    let path = route(&topo, &args.source, &args.destination)?;
    let model = build_path_model(&topo, &path)?;
    let set = collect_samples(&model, &path.label(), args.n, args.seed)?;
    let mut dir = OutputDir::create(out)?;
    let mut csv = Vec::new();
    set.write_csv(&mut csv)?;
    let p = dir.write("samples.csv", csv)?;
    println!(
        "{} samples of {} -> {}",
        set.len(),
        path.label(),
        p.display()
    );
    dir.finish(
        "sample",
        json!({
            "topology": args.topology,
            "source": args.source,
            "destination": args.destination,
            "n": args.n,
        }),
        Some(hash),
        Some(args.seed),
    )?;
    Ok(())
}

fn synth(args: &SynthArgs, out: &Path) -> anyhow::Result<()> {
    let mut params = MetroParams::default();
    if let Some(seed) = args.seed {
        params.seed = seed;
    }
    let text = metro(&params).to_toml();
    match &args.out {
        Some(file) => {
            std::fs::write(file, &text)
                .with_context(|| format!("cannot write {}", file.display()))?;
            println!("{}", file.display());
        }
        None => {
            let mut dir = OutputDir::create(out)?;
            let p = dir.write("metro-synthetic.toml", &text)?;
            dir.finish(
                "synth-topology",
                json!({ "seed": params.seed }),
                None,
                Some(params.seed),
            )?;
            println!("{}", p.display());
        }
    }
    Ok(())
}
