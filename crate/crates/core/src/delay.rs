//! Path delay models: a constant propagation offset plus a chain of
//! independent exponential stages, one per traversed M/M/1 link.
//!
//! The exact distribution of the stage sum is hypoexponential. [`PathDelayModel::cdf`]
//! evaluates it by uniformization of the underlying phase-type chain: with
//! `Λ = max rate`, the survival function is
//! `S(x) = Σₙ Pois(n; Λx) · P(chain not absorbed after n jumps)`.
//! Every term is nonnegative, so the sum is stable for repeated and nearly
//! repeated rates, and for an all-equal chain it reduces exactly to the
//! Erlang closed form.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::topology::{PathSpec, Topology};
use crate::{Error, Result};

/// Fiber propagation delay.
pub const PROPAGATION_US_PER_KM: f64 = 5.0;
/// Mean packet service time at 10 Gb/s.
pub const DEFAULT_SERVICE_TIME_US: f64 = 1.0;
pub const DEFAULT_CALIBRATION_TOLERANCE: f64 = 0.01;
/// Stage means closer than this (relative) are merged into one Erlang block.
pub const MERGE_REL_GAP: f64 = 1e-6;

const POISSON_TAIL_CUTOFF: f64 = 1e-20;
const SURVIVAL_CUTOFF: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct PathDelayModel {
    propagation_us: f64,
    stage_means_us: Vec<f64>,
}

impl PathDelayModel {
    pub fn new(propagation_us: f64, stage_means_us: Vec<f64>) -> Result<Self> {
        if !(propagation_us >= 0.0 && propagation_us.is_finite()) {
            return Err(Error::Domain(format!(
                "propagation delay {propagation_us} must be finite and nonnegative"
            )));
        }
        if stage_means_us.is_empty() {
            return Err(Error::Domain(
                "a delay model needs at least one stage".into(),
            ));
        }
        if let Some(m) = stage_means_us
            .iter()
            .find(|m| !(**m > 0.0 && m.is_finite()))
        {
            return Err(Error::Domain(format!(
                "stage mean {m} must be finite and positive"
            )));
        }
        Ok(Self {
            propagation_us,
            stage_means_us,
        })
    }

    /// `k` equal stages sharing `total_queue_mean_us`.
    pub fn equal_stages(propagation_us: f64, total_queue_mean_us: f64, k: usize) -> Result<Self> {
        Self::new(propagation_us, vec![total_queue_mean_us / k as f64; k])
    }

    pub fn propagation_us(&self) -> f64 {
        self.propagation_us
    }

    pub fn stage_means_us(&self) -> &[f64] {
        &self.stage_means_us
    }

    pub fn queue_mean_us(&self) -> f64 {
        self.stage_means_us.iter().sum()
    }

    pub fn mean_us(&self) -> f64 {
        self.propagation_us + self.queue_mean_us()
    }

    /// Stage means grouped into `(mean, multiplicity)` blocks, sorted by mean.
    ///
    /// Exactly equal means share a block; distinct means within
    /// [`MERGE_REL_GAP`] of their neighbour are merged and replaced by the
    /// block average, which keeps the total mean.
    pub fn erlang_blocks(&self) -> Vec<(f64, usize)> {
        let mut means = self.stage_means_us.clone();
        means.sort_by(f64::total_cmp);
        let mut blocks: Vec<(f64, usize)> = Vec::new();
        for m in means {
            match blocks.last_mut() {
                Some((sum_or_mean, count))
                    if {
                        let last = *sum_or_mean / *count as f64;
                        (m - last).abs() <= MERGE_REL_GAP * m.max(last)
                    } =>
                {
                    *sum_or_mean += m;
                    *count += 1;
                }
                _ => blocks.push((m, 1)),
            }
        }
        blocks
            .into_iter()
            .map(|(sum, count)| (sum / count as f64, count))
            .collect()
    }

    /// One end-to-end delay draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.propagation_us
            + self
                .stage_means_us
                .iter()
                .map(|&m| {
                    Exp::new(1.0 / m)
                        .expect("stage rate is positive and finite")
                        .sample(rng)
                })
                .sum::<f64>()
    }

    /// `P(delay > t)`.
    pub fn survival(&self, t_us: f64) -> f64 {
        let x = t_us - self.propagation_us;
        if x <= 0.0 {
            return 1.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        let blocks = self.erlang_blocks();
        let max_rate = blocks.iter().map(|&(m, _)| 1.0 / m).fold(0.0_f64, f64::max);
        // advance probability per uniformized jump, per expanded stage
        let advance: Vec<f64> = blocks
            .iter()
            .flat_map(|&(m, k)| std::iter::repeat_n((1.0 / m) / max_rate, k))
            .map(|q| q.min(1.0))
            .collect();
        let stages = advance.len();

        let a = max_rate * x;
        let ln_a = a.ln();
        let mut in_stage = vec![0.0; stages];
        in_stage[0] = 1.0;
        let mut alive = 1.0;
        let mut ln_weight = -a;
        let mut survival = 0.0;
        let mut n: u64 = 0;
        loop {
            survival += ln_weight.exp() * alive;
            n += 1;
            ln_weight += ln_a - (n as f64).ln();
            // one jump of the embedded chain, last stage first
            for j in (0..stages).rev() {
                let moved = in_stage[j] * advance[j];
                in_stage[j] -= moved;
                if j + 1 < stages {
                    in_stage[j + 1] += moved;
                }
            }
            alive = in_stage.iter().sum();
            if alive < SURVIVAL_CUTOFF {
                break;
            }
            if n as f64 > a && ln_weight.exp() < POISSON_TAIL_CUTOFF {
                break;
            }
        }
        survival.clamp(0.0, 1.0)
    }

    /// `P(delay ≤ t)`, exact up to floating point.
    pub fn cdf(&self, t_us: f64) -> f64 {
        debug_assert!(!t_us.is_nan(), "cdf evaluated at NaN");
        1.0 - self.survival(t_us)
    }

    /// Ground-truth fraction of packets with delay at or below `threshold_us`.
    pub fn fraction_below(&self, threshold_us: f64) -> f64 {
        self.cdf(threshold_us)
    }

    /// Delay `t` with `cdf(t) = p` to within 1e-9.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} outside (0, 1)")));
        }
        let lo0 = self.propagation_us;
        let scale = self.queue_mean_us();
        let mut k = 1.0;
        while self.cdf(lo0 + k * scale) < p {
            k *= 2.0;
        }
        let (mut lo, mut hi) = (lo0, lo0 + k * scale);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let c = self.cdf(mid);
            if (c - p).abs() <= 1e-12 || hi - lo <= f64::EPSILON * hi {
                return Ok(mid);
            }
            if c < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Model for `path` with the default propagation speed.
pub fn build_path_model(topology: &Topology, path: &PathSpec) -> Result<PathDelayModel> {
    build_path_model_with(topology, path, PROPAGATION_US_PER_KM)
}

/// One exponential stage per link, mean `E(X) / (1 − ρ)`, plus
/// `us_per_km × total length` of propagation.
pub fn build_path_model_with(
    topology: &Topology,
    path: &PathSpec,
    us_per_km: f64,
) -> Result<PathDelayModel> {
    topology.validate_path(path)?;
    let links: Vec<_> = path
        .link_ids
        .iter()
        .map(|id| {
            topology
                .link(id)
                .ok_or_else(|| Error::UnknownLink(id.clone()))
        })
        .collect::<Result<_>>()?;
    let length_km: f64 = links.iter().map(|l| l.length_km).sum();
    let stages = links
        .iter()
        .map(|l| l.mean_service_time_us / (1.0 - l.load))
        .collect();
    PathDelayModel::new(us_per_km * length_km, stages)
}

/// Result of [`calibrate_path`].
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub model: PathDelayModel,
    pub hops: usize,
    /// `cdf(threshold)` of the fitted model.
    pub achieved: f64,
}

/// Fits an equal-stage model to a path mean and a tail fraction.
///
/// Tries `k = 1..=max_hops` equal stages summing to `total_queue_mean_us` and
/// keeps the one whose fraction below `threshold_us` is closest to
/// `target_fraction` (smaller `k` on ties).
pub fn calibrate_path(
    offset_us: f64,
    total_queue_mean_us: f64,
    threshold_us: f64,
    target_fraction: f64,
    max_hops: usize,
) -> Result<Calibration> {
    calibrate_path_with_tolerance(
        offset_us,
        total_queue_mean_us,
        threshold_us,
        target_fraction,
        max_hops,
        DEFAULT_CALIBRATION_TOLERANCE,
    )
}

pub fn calibrate_path_with_tolerance(
    offset_us: f64,
    total_queue_mean_us: f64,
    threshold_us: f64,
    target_fraction: f64,
    max_hops: usize,
    tolerance: f64,
) -> Result<Calibration> {
    if threshold_us.is_nan() || threshold_us <= offset_us {
        return Err(Error::Domain(format!(
            "threshold {threshold_us} must exceed the offset {offset_us}"
        )));
    }
    if !(target_fraction > 0.0 && target_fraction < 1.0) {
        return Err(Error::Domain(format!(
            "target fraction {target_fraction} outside (0, 1)"
        )));
    }
    if max_hops == 0 {
        return Err(Error::Domain("max_hops must be at least 1".into()));
    }
    let mut best: Option<Calibration> = None;
    for k in 1..=max_hops {
        let model = PathDelayModel::equal_stages(offset_us, total_queue_mean_us, k)?;
        let achieved = model.cdf(threshold_us);
        let closer = best.as_ref().is_none_or(|b| {
            (achieved - target_fraction).abs() < (b.achieved - target_fraction).abs()
        });
        if closer {
            best = Some(Calibration {
                model,
                hops: k,
                achieved,
            });
        }
    }
    let best = best.expect("max_hops >= 1");
    if (best.achieved - target_fraction).abs() > tolerance {
        return Err(Error::Infeasible {
            target: target_fraction,
            achieved: best.achieved,
            hops: best.hops,
            max_hops,
        });
    }
    Ok(best)
}
