mod common;

use common::*;
use latsample_core::delay::calibrate_path_with_tolerance;
use latsample_core::seed::stream;
use latsample_core::{
    calibrate_path, collect_samples, empirical_fraction_below, Error, PathDelayModel,
};
use rand::Rng;

/// Random model with up to six stages, some sharing a mean.
fn random_model<R: Rng>(rng: &mut R) -> PathDelayModel {
    let k = rng.random_range(1..=6);
    let mut means: Vec<f64> = Vec::with_capacity(k);
    for _ in 0..k {
        if !means.is_empty() && rng.random_bool(0.4) {
            let j = rng.random_range(0..means.len());
            means.push(means[j]);
        } else {
            means.push(rng.random_range(1.0..8.0));
        }
    }
    PathDelayModel::new(rng.random_range(0.0..50.0), means).unwrap()
}

fn grid_points(model: &PathDelayModel, fractions: &[f64]) -> Vec<f64> {
    fractions
        .iter()
        .map(|f| model.propagation_us() + (f * model.queue_mean_us() * 100.0).round() / 100.0)
        .collect()
}

#[test]
fn calibrated_paths_hit_target_tail_fractions() {
    let b = blue().cdf(82.0);
    let g = green().cdf(82.0);
    assert!((b - erlang_cdf(3, 19.0, 38.0)).abs() < 1e-12);
    assert!((g - erlang_cdf(4, 5.0, 14.0)).abs() < 1e-12);
    assert!((b - 0.938).abs() < 5e-4, "{b}");
    assert!((g - 0.9958).abs() < 5e-5, "{g}");
    assert_eq!(blue().fraction_below(82.0), b);
}

#[test]
fn cdf_matches_convolution_oracle() {
    let mut rng = stream(11);
    for _ in 0..10 {
        let m = random_model(&mut rng);
        let ts = grid_points(&m, &[0.2, 0.6, 1.0, 1.8]);
        for (t, o) in ts.iter().zip(trapezoid_cdf(&m, &ts)) {
            let c = m.cdf(*t);
            assert!((c - o).abs() < 1e-6, "{m:?} t={t}: {c} vs {o}");
        }
    }
}

#[test]
fn equal_stages_match_erlang_closed_form() {
    let mut rng = stream(12);
    for _ in 0..200 {
        let k = rng.random_range(1..=12);
        let total = rng.random_range(0.5..60.0);
        let m = PathDelayModel::equal_stages(rng.random_range(0.0..80.0), total, k).unwrap();
        for _ in 0..5 {
            let x = rng.random_range(0.0..3.0 * total);
            let t = m.propagation_us() + x;
            let c = m.cdf(t);
            let e = erlang_cdf(k, total, t - m.propagation_us());
            assert!(
                (c - e).abs() < 1e-12,
                "k={k} total={total} x={x}: {c} vs {e}"
            );
        }
    }
}

#[test]
fn cdf_matches_monte_carlo_frequency() {
    const DRAWS: usize = 1_000_000;
    let mut rng = stream(13);
    for case in 0..5 {
        let m = random_model(&mut rng);
        let t = m.propagation_us() + rng.random_range(0.3..2.0) * m.queue_mean_us();
        let p = m.cdf(t);
        let mut draws = stream(1000 + case);
        let hits = (0..DRAWS).filter(|_| m.sample(&mut draws) <= t).count();
        let freq = hits as f64 / DRAWS as f64;
        assert!(
            (freq - p).abs() <= 4.0 * binomial_se(p, DRAWS),
            "{m:?} t={t}: {freq} vs {p}"
        );
    }
}

#[test]
fn sample_mean_converges() {
    const DRAWS: usize = 1_000_000;
    let mut rng = stream(14);
    let mut models = vec![blue(), green()];
    models.extend((0..3).map(|_| random_model(&mut rng)));
    for (i, m) in models.iter().enumerate() {
        let mut draws = stream(2000 + i as u64);
        let xs: Vec<f64> = (0..DRAWS).map(|_| m.sample(&mut draws)).collect();
        let mean = xs.iter().sum::<f64>() / DRAWS as f64;
        // variance of a sum of independent exponentials
        let var: f64 = m.stage_means_us().iter().map(|s| s * s).sum();
        let se = (var / DRAWS as f64).sqrt();
        assert!((mean - m.mean_us()).abs() <= 3.0 * se, "{m:?}: {mean}");
        assert!(xs.iter().all(|&x| x > m.propagation_us()));
    }
    let mut draws = stream(99);
    let mean = (0..DRAWS).map(|_| blue().sample(&mut draws)).sum::<f64>() / DRAWS as f64;
    assert!((mean - 63.0).abs() < 0.1, "{mean}");
}

#[test]
fn blue_quantile_inverts_the_tail_fraction() {
    let q = blue().quantile(0.937).unwrap();
    assert!((q - 82.0).abs() < 0.2, "{q}");
}

/// Closed-form sweep over k, independent of the crate's CDF.
fn sweep(offset: f64, mean: f64, threshold: f64, target: f64, max: usize) -> (usize, f64) {
    (1..=max)
        .map(|k| (k, erlang_cdf(k, mean, threshold - offset)))
        .fold((0, f64::NAN), |best, (k, f)| {
            if best.0 == 0 || (f - target).abs() < (best.1 - target).abs() {
                (k, f)
            } else {
                best
            }
        })
}

#[test]
fn calibration_recovers_hop_counts() {
    let (k, f) = sweep(44.0, 19.0, 82.0, 0.937, 8);
    assert_eq!(k, 3);
    let cal = calibrate_path(44.0, 19.0, 82.0, 0.937, 8).unwrap();
    assert_eq!(cal.hops, 3);
    assert!((cal.achieved - f).abs() < 1e-12);
    assert!((cal.achieved - 0.938).abs() < 5e-4);
    assert!((cal.model.mean_us() - 63.0).abs() < 1e-9);

    let (k, f) = sweep(68.0, 5.0, 82.0, 0.995, 8);
    assert_eq!(k, 4);
    let cal = calibrate_path(68.0, 5.0, 82.0, 0.995, 8).unwrap();
    assert_eq!(cal.hops, 4);
    assert!((cal.achieved - f).abs() < 1e-12);
    assert!((cal.achieved - 0.9958).abs() < 5e-5);
    assert!((cal.model.mean_us() - 73.0).abs() < 1e-9);
}

#[test]
fn calibration_reports_infeasible_targets() {
    let err = calibrate_path(44.0, 400.0, 82.0, 0.999999, 8).unwrap_err();
    assert!(
        matches!(err, Error::Infeasible { max_hops: 8, .. }),
        "{err}"
    );
    // a tight tolerance turns a near miss into an error
    assert!(calibrate_path_with_tolerance(44.0, 19.0, 82.0, 0.937, 8, 1e-6).is_err());
}

#[test]
fn collected_fraction_concentrates() {
    let set = collect_samples(&blue(), "blue", 100_000, 31).unwrap();
    let f = empirical_fraction_below(&set, 82.0);
    assert!((f - 0.938).abs() < 0.01, "{f}");
}
