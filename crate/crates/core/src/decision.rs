//! Control-plane decisions taken from samples, and their scoring against the
//! analytic ground truth. The positive class is "path declared compliant".

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::delay::PathDelayModel;
use crate::sampling::{empirical_fraction_below, SampleSet};
use crate::seed;
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD_US: f64 = 82.0;
pub const DEFAULT_REQUIRED_FRACTION: f64 = 0.99;

/// "At least `required_fraction` of packets at or below `threshold_us`."
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplianceRule {
    pub threshold_us: f64,
    pub required_fraction: f64,
}

impl Default for ComplianceRule {
    fn default() -> Self {
        Self {
            threshold_us: DEFAULT_THRESHOLD_US,
            required_fraction: DEFAULT_REQUIRED_FRACTION,
        }
    }
}

impl ComplianceRule {
    pub fn new(threshold_us: f64, required_fraction: f64) -> Result<Self> {
        if !(threshold_us > 0.0 && threshold_us.is_finite()) {
            return Err(Error::Domain(format!(
                "threshold {threshold_us} must be positive"
            )));
        }
        if !(required_fraction > 0.0 && required_fraction < 1.0) {
            return Err(Error::Domain(format!(
                "required fraction {required_fraction} outside (0, 1)"
            )));
        }
        Ok(Self {
            threshold_us,
            required_fraction,
        })
    }

    pub fn accepts(&self, fraction: f64) -> bool {
        fraction >= self.required_fraction
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceVerdict {
    pub path_id: String,
    pub empirical_fraction: f64,
    pub compliant: bool,
}

/// Verdict from samples alone.
pub fn classify(samples: &SampleSet, rule: &ComplianceRule) -> ComplianceVerdict {
    let empirical_fraction = empirical_fraction_below(samples, rule.threshold_us);
    ComplianceVerdict {
        path_id: samples.path_id().to_owned(),
        empirical_fraction,
        compliant: rule.accepts(empirical_fraction),
    }
}

/// Error-free verdict from the analytic distribution.
pub fn ground_truth(model: &PathDelayModel, rule: &ComplianceRule) -> bool {
    rule.accepts(model.fraction_below(rule.threshold_us))
}

/// How to choose between sample sets with equal empirical fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Smallest empirical mean delay.
    LowestMean,
    /// Smallest empirical maximum delay.
    LowestMax,
    First,
    /// Uniformly at random among the tied sets, from a stream seeded by `seed`.
    Uniform {
        seed: u64,
    },
}

/// A [`TieBreak`] without its seed, as configured for an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakMode {
    LowestMean,
    LowestMax,
    First,
    #[default]
    Uniform,
}

impl TieBreakMode {
    pub fn with_seed(self, seed: u64) -> TieBreak {
        match self {
            Self::LowestMean => TieBreak::LowestMean,
            Self::LowestMax => TieBreak::LowestMax,
            Self::First => TieBreak::First,
            Self::Uniform => TieBreak::Uniform { seed },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LowestMean => "lowest-mean",
            Self::LowestMax => "lowest-max",
            Self::First => "first",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for TieBreakMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TieBreakMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-mean" => Ok(Self::LowestMean),
            "lowest-max" => Ok(Self::LowestMax),
            "first" => Ok(Self::First),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Domain(format!("unknown tie-break {other}"))),
        }
    }
}

/// Index of the set with the largest fraction of delays below the threshold.
pub fn select_best_path(
    sample_sets: &[SampleSet],
    rule: &ComplianceRule,
    tie_break: TieBreak,
) -> Result<usize> {
    if sample_sets.is_empty() {
        return Err(Error::Domain("no candidate paths to choose from".into()));
    }
    let fractions: Vec<f64> = sample_sets
        .iter()
        .map(|s| empirical_fraction_below(s, rule.threshold_us))
        .collect();
    let best = fractions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..fractions.len())
        .filter(|&i| fractions[i] == best)
        .collect();
    if tied.len() == 1 {
        return Ok(tied[0]);
    }
    let lowest_by = |key: fn(&SampleSet) -> f64| {
        // min_by keeps the first of equal keys
        *tied
            .iter()
            .min_by(|&&a, &&b| key(&sample_sets[a]).total_cmp(&key(&sample_sets[b])))
            .expect("tied is nonempty")
    };
    Ok(match tie_break {
        TieBreak::LowestMean => lowest_by(SampleSet::mean_us),
        TieBreak::LowestMax => lowest_by(SampleSet::max_us),
        TieBreak::First => tied[0],
        TieBreak::Uniform { seed } => tied[seed::stream(seed).random_range(0..tied.len())],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorClass {
    #[serde(rename = "TP")]
    TruePositive,
    #[serde(rename = "TN")]
    TrueNegative,
    #[serde(rename = "FP")]
    FalsePositive,
    #[serde(rename = "FN")]
    FalseNegative,
}

impl ErrorClass {
    pub fn of(truth: bool, decision: bool) -> Self {
        match (truth, decision) {
            (true, true) => Self::TruePositive,
            (false, false) => Self::TrueNegative,
            (false, true) => Self::FalsePositive,
            (true, false) => Self::FalseNegative,
        }
    }

    pub fn is_error(self) -> bool {
        matches!(self, Self::FalsePositive | Self::FalseNegative)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::TruePositive => "TP",
            Self::TrueNegative => "TN",
            Self::FalsePositive => "FP",
            Self::FalseNegative => "FN",
        }
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "TP" => Ok(Self::TruePositive),
            "TN" => Ok(Self::TrueNegative),
            "FP" => Ok(Self::FalsePositive),
            "FN" => Ok(Self::FalseNegative),
            other => Err(Error::Parse(format!("unknown error class {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionRecord {
    pub pair_id: String,
    pub truth: bool,
    pub decision: bool,
    pub class: ErrorClass,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfusionReport {
    pub records: Vec<ConfusionRecord>,
    pub tp_count: usize,
    pub tn_count: usize,
    pub fp_count: usize,
    pub fn_count: usize,
}

impl ConfusionReport {
    pub fn push(&mut self, pair_id: impl Into<String>, truth: bool, decision: bool) {
        let class = ErrorClass::of(truth, decision);
        match class {
            ErrorClass::TruePositive => self.tp_count += 1,
            ErrorClass::TrueNegative => self.tn_count += 1,
            ErrorClass::FalsePositive => self.fp_count += 1,
            ErrorClass::FalseNegative => self.fn_count += 1,
        }
        self.records.push(ConfusionRecord {
            pair_id: pair_id.into(),
            truth,
            decision,
            class,
        });
    }

    pub fn errors(&self) -> usize {
        self.fp_count + self.fn_count
    }

    /// `fp=… fn=… tp=… tn=…`
    pub fn summary_line(&self) -> String {
        format!(
            "fp={} fn={} tp={} tn={}",
            self.fp_count, self.fn_count, self.tp_count, self.tn_count
        )
    }

    /// Columns `pair_id,truth,decision,class`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Scores decisions against truths, pair by pair.
pub fn confusion(verdicts: &[ComplianceVerdict], truths: &[bool]) -> Result<ConfusionReport> {
    if verdicts.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: verdicts.len(),
            right: truths.len(),
        });
    }
    let mut report = ConfusionReport::default();
    for (v, &t) in verdicts.iter().zip(truths) {
        report.push(v.path_id.clone(), t, v.compliant);
    }
    Ok(report)
}
