//! Cochran sample-size planning and estimation from finite telemetry samples.

use std::io::{BufRead, Write};

use crate::delay::PathDelayModel;
use crate::seed;
use crate::{Error, Result};

/// Confidence multiplier for 95 % two-sided confidence.
pub const Z_95: f64 = 1.96;
/// Worst-case proportion, which maximizes the required sample count.
pub const WORST_CASE_P: f64 = 0.5;

const CEIL_REL_SLACK: f64 = 1e-12;

fn check_z_p(z: f64, p_assumed: f64) -> Result<()> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!(
            "confidence multiplier z = {z} must be positive"
        )));
    }
    if !(p_assumed > 0.0 && p_assumed < 1.0) {
        return Err(Error::Domain(format!(
            "assumed proportion p = {p_assumed} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Samples needed to estimate a proportion within `±e`: `⌈z²·p·(1−p)/e²⌉`.
pub fn cochran_n(z: f64, p_assumed: f64, e: f64) -> Result<u64> {
    check_z_p(z, p_assumed)?;
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::Domain(format!(
            "margin of error e = {e} outside (0, 1)"
        )));
    }
    let exact = z * z * p_assumed * (1.0 - p_assumed) / (e * e);
    // absorb floating-point noise only, e.g. 400.00000000000006 for e = 0.049
    let n = (exact * (1.0 - CEIL_REL_SLACK)).ceil();
    Ok((n as u64).max(1))
}

/// Margin of error achieved with `n0` samples: `z·√(p·(1−p)/n0)`.
pub fn cochran_error(z: f64, p_assumed: f64, n0: u64) -> Result<f64> {
    check_z_p(z, p_assumed)?;
    if n0 == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    Ok(z * (p_assumed * (1.0 - p_assumed) / n0 as f64).sqrt())
}

/// A sampling budget and its margin of error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CochranPlan {
    pub z: f64,
    pub p_assumed: f64,
    pub e: f64,
    pub n0: u64,
}

impl CochranPlan {
    /// Plan for a requested margin; `n0` rounds up.
    pub fn for_margin(z: f64, p_assumed: f64, e: f64) -> Result<Self> {
        let n0 = cochran_n(z, p_assumed, e)?;
        Ok(Self {
            z,
            p_assumed,
            e,
            n0,
        })
    }

    /// Plan for a fixed sample budget.
    pub fn for_samples(z: f64, p_assumed: f64, n0: u64) -> Result<Self> {
        let e = cochran_error(z, p_assumed, n0)?;
        Ok(Self {
            z,
            p_assumed,
            e,
            n0,
        })
    }
}

/// End-to-end delays observed on one path.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    path_id: String,
    delays_us: Vec<f64>,
    seed: u64,
}

impl SampleSet {
    pub fn new(path_id: impl Into<String>, delays_us: Vec<f64>, seed: u64) -> Result<Self> {
        if delays_us.is_empty() {
            return Err(Error::Domain("a sample set cannot be empty".into()));
        }
        if let Some(d) = delays_us.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::Domain(format!(
                "delay {d} must be finite and positive"
            )));
        }
        Ok(Self {
            path_id: path_id.into(),
            delays_us,
            seed,
        })
    }

    pub fn path_id(&self) -> &str {
        &self.path_id
    }

    pub fn delays_us(&self) -> &[f64] {
        &self.delays_us
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.delays_us.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays_us.is_empty()
    }

    pub fn mean_us(&self) -> f64 {
        self.delays_us.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max_us(&self) -> f64 {
        self.delays_us
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes the set as CSV: a `# path_id:` and `# seed:` preamble, then a
    /// `delay_us` column.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Csv(e.into());
        writeln!(out, "# path_id: {}", self.path_id).map_err(io)?;
        writeln!(out, "# seed: {}", self.seed).map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["delay_us"])?;
        for d in &self.delays_us {
            w.write_record([d.to_string()])?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut meta = |key: &str| -> Result<String> {
            let mut line = String::new();
            input
                .read_line(&mut line)
                .map_err(|e| Error::Csv(e.into()))?;
            line.trim_end()
                .strip_prefix(&format!("# {key}: "))
                .map(str::to_owned)
                .ok_or_else(|| Error::Parse(format!("expected `# {key}:` header line")))
        };
        let path_id = meta("path_id")?;
        let seed = meta("seed")?
            .parse()
            .map_err(|e| Error::Parse(format!("bad seed: {e}")))?;
        let mut r = csv::Reader::from_reader(input);
        let delays = r
            .records()
            .map(|rec| {
                let rec = rec?;
                rec.get(0)
                    .unwrap_or_default()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad delay: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(path_id, delays, seed)
    }
}

/// Draws `n0` independent delays from a stream seeded by `seed`.
pub fn collect_samples(
    model: &PathDelayModel,
    path_id: &str,
    n0: usize,
    seed: u64,
) -> Result<SampleSet> {
    if n0 == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let mut rng = seed::stream(seed);
    let delays = (0..n0).map(|_| model.sample(&mut rng)).collect();
    SampleSet::new(path_id, delays, seed)
}

/// Share of samples with delay `≤ threshold_us`.
pub fn empirical_fraction_below(samples: &SampleSet, threshold_us: f64) -> f64 {
    count_below(samples, threshold_us) as f64 / samples.len() as f64
}

pub(crate) fn count_below(samples: &SampleSet, threshold_us: f64) -> usize {
    samples
        .delays_us()
        .iter()
        .filter(|&&d| d <= threshold_us)
        .count()
}
