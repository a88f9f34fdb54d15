//! Seeded Monte Carlo experiments: path selection from samples, per-pair
//! compliance heatmaps and Cochran error tables.
//!
//! All randomness is drawn from child streams whose seeds are mixed from the
//! master seed and the coordinates of the draw (see [`crate::seed`]). Work is
//! split across a private thread pool but results are assembled by index, so
//! output is bit-identical for any worker count.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{
    classify, ground_truth, select_best_path, ComplianceRule, ConfusionReport, ErrorClass,
    TieBreakMode,
};
use crate::delay::{build_path_model, PathDelayModel};
use crate::sampling::{cochran_error, collect_samples};
use crate::seed::{mix, tag};
use crate::topology::{all_pairs, route, Role, Topology};
use crate::{Error, Result};

pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_SAMPLE_SIZES: [usize; 5] = [5, 10, 50, 100, 400];

const SELECTION_TAG: &str = "selection";
const SELECTION_TIE_TAG: &str = "selection-tie";
const HEATMAP_TAG: &str = "heatmap";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub sample_sizes: Vec<usize>,
    pub rule: ComplianceRule,
    pub tie_break: TieBreakMode,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 1,
            trials: DEFAULT_TRIALS,
            sample_sizes: DEFAULT_SAMPLE_SIZES.to_vec(),
            rule: ComplianceRule::default(),
            tie_break: TieBreakMode::default(),
            workers: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("trials must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Domain("workers must be positive".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::Domain("at least one sample size is required".into()));
        }
        if self.sample_sizes[0] == 0 {
            return Err(Error::Domain("sample sizes must be positive".into()));
        }
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "sample sizes must be strictly increasing".into(),
            ));
        }
        ComplianceRule::new(self.rule.threshold_us, self.rule.required_fraction)?;
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Domain(format!("cannot start {} workers: {e}", self.workers)))
    }
}

/// How often each candidate path was chosen, per sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    /// `counts[s][p]`: trials at `sample_sizes[s]` that chose path `p`.
    pub counts: Vec<Vec<u64>>,
}

impl SelectionResult {
    pub fn paths(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn frequencies(&self, size_index: usize) -> Vec<f64> {
        self.counts[size_index]
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect()
    }

    pub fn frequency(&self, sample_size: usize, path: usize) -> Option<f64> {
        let s = self.sample_sizes.iter().position(|&n| n == sample_size)?;
        Some(self.frequencies(s)[path])
    }

    /// Columns `sample_size,path,count,frequency`; `labels` name the paths.
    pub fn write_csv<W: Write>(&self, labels: &[String], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sample_size", "path", "count", "frequency"])?;
        for (s, &n) in self.sample_sizes.iter().enumerate() {
            for (p, f) in self.frequencies(s).into_iter().enumerate() {
                let label = labels
                    .get(p)
                    .cloned()
                    .unwrap_or_else(|| format!("path{}", p + 1));
                w.write_record([
                    n.to_string(),
                    label,
                    self.counts[s][p].to_string(),
                    f.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Repeats "sample every path, pick the best" `trials` times per sample size.
pub fn run_selection(
    models: &[PathDelayModel],
    config: &ExperimentConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    if models.is_empty() {
        return Err(Error::Domain(
            "selection needs at least one candidate path".into(),
        ));
    }
    let ids: Vec<String> = (1..=models.len()).map(|i| format!("path{i}")).collect();
    let pool = config.pool()?;
    let mut counts = Vec::with_capacity(config.sample_sizes.len());
    for &n0 in &config.sample_sizes {
        let picks: Vec<usize> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let sets = models
                        .iter()
                        .zip(&ids)
                        .enumerate()
                        .map(|(p, (m, id))| {
                            let seed = mix(
                                config.master_seed,
                                &[tag(SELECTION_TAG), n0 as u64, p as u64, trial as u64],
                            );
                            collect_samples(m, id, n0, seed)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let tie_seed = mix(
                        config.master_seed,
                        &[tag(SELECTION_TIE_TAG), n0 as u64, trial as u64],
                    );
                    select_best_path(&sets, &config.rule, config.tie_break.with_seed(tie_seed))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let mut row = vec![0u64; models.len()];
        for p in picks {
            row[p] += 1;
        }
        counts.push(row);
    }
    Ok(SelectionResult {
        sample_sizes: config.sample_sizes.clone(),
        trials: config.trials,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCell {
    pub aco: String,
    pub maco: String,
    pub true_fraction: f64,
    pub empirical_fraction: f64,
    pub truth: bool,
    pub decision: bool,
    pub class: ErrorClass,
}

/// Compliance decisions for every ACO × MACO pair at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapResult {
    pub sample_size: usize,
    pub acos: Vec<String>,
    pub macos: Vec<String>,
    /// Row-major: ACO rows, MACO columns.
    pub cells: Vec<HeatCell>,
    pub report: ConfusionReport,
}

impl HeatmapResult {
    pub fn cell(&self, aco: usize, maco: usize) -> &HeatCell {
        &self.cells[aco * self.macos.len() + maco]
    }

    pub fn fp(&self) -> usize {
        self.report.fp_count
    }

    pub fn fn_(&self) -> usize {
        self.report.fn_count
    }

    /// Columns `aco,maco,true_fraction,empirical_fraction,truth,decision,class`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cells {
            w.serialize(c)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

struct PairOutcome {
    true_fraction: f64,
    truth: bool,
    /// (empirical fraction, decision) per sample size
    decisions: Vec<(f64, bool)>,
}

/// Routes every ACO → MACO pair, compares one sampled verdict per sample size
/// with the analytic truth.
pub fn run_heatmap(topology: &Topology, config: &ExperimentConfig) -> Result<Vec<HeatmapResult>> {
    config.validate()?;
    let acos: Vec<String> = topology
        .ids_with_role(Role::Aco)
        .into_iter()
        .map(str::to_owned)
        .collect();
    let macos: Vec<String> = topology
        .ids_with_role(Role::Maco)
        .into_iter()
        .map(str::to_owned)
        .collect();
    if acos.is_empty() || macos.is_empty() {
        return Err(Error::Domain(
            "heatmap needs at least one ACO and one MACO".into(),
        ));
    }
    let pairs = all_pairs(topology);
    let pool = config.pool()?;
    let outcomes: Vec<PairOutcome> = pool.install(|| {
        pairs
            .par_iter()
            .enumerate()
            .map(|(index, (aco, maco))| {
                let path = route(topology, aco, maco)?;
                let model = build_path_model(topology, &path)?;
                let label = path.label();
                let decisions = config
                    .sample_sizes
                    .iter()
                    .map(|&n0| {
                        let seed = mix(
                            config.master_seed,
                            &[tag(HEATMAP_TAG), n0 as u64, index as u64],
                        );
                        let verdict =
                            classify(&collect_samples(&model, &label, n0, seed)?, &config.rule);
                        Ok((verdict.empirical_fraction, verdict.compliant))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PairOutcome {
                    true_fraction: model.fraction_below(config.rule.threshold_us),
                    truth: ground_truth(&model, &config.rule),
                    decisions,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    Ok(config
        .sample_sizes
        .iter()
        .enumerate()
        .map(|(s, &n0)| {
            let mut report = ConfusionReport::default();
            let cells = pairs
                .iter()
                .zip(&outcomes)
                .map(|((aco, maco), o)| {
                    let (empirical_fraction, decision) = o.decisions[s];
                    report.push(format!("{aco}->{maco}"), o.truth, decision);
                    HeatCell {
                        aco: aco.clone(),
                        maco: maco.clone(),
                        true_fraction: o.true_fraction,
                        empirical_fraction,
                        truth: o.truth,
                        decision,
                        class: ErrorClass::of(o.truth, decision),
                    }
                })
                .collect();
            HeatmapResult {
                sample_size: n0,
                acos: acos.clone(),
                macos: macos.clone(),
                cells,
                report,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n0: u64,
    pub e: f64,
}

/// Cochran margin of error for each sample size.
pub fn run_error_table(z: f64, p_assumed: f64, sample_sizes: &[u64]) -> Result<Vec<ErrorRow>> {
    sample_sizes
        .iter()
        .map(|&n0| {
            Ok(ErrorRow {
                n0,
                e: cochran_error(z, p_assumed, n0)?,
            })
        })
        .collect()
}

/// Columns `n0,e`.
pub fn write_error_table<W: Write>(rows: &[ErrorRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
