use std::f64::consts::{PI, TAU};

use plp_blindspot::stochproc::{sample_obstacle_lines, sample_obstacle_segments, sample_ppp_disk, RngStream};
use rayon::prelude::*;

const DRAWS: u64 = 100_000;

// Kolmogorov distribution: P(√n·D > 1.9495) ≈ 0.001
const KS_CRIT_P001: f64 = 1.9495;
// χ² with 15 degrees of freedom, upper 0.001 quantile
const CHI2_15_P001: f64 = 37.697;

fn count_moments(counts: &[usize]) -> (f64, f64) {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn check_poisson_counts(counts: &[usize], expected: f64) {
    let n = counts.len() as f64;
    let (mean, var) = count_moments(counts);
    // SE of the mean is √(μ/n); SE of the sample variance is √((μ + 2μ²)/n)
    let se_mean = (expected / n).sqrt();
    let se_var = ((expected + 2.0 * expected * expected) / n).sqrt();
    assert!((mean - expected).abs() < 3.0 * se_mean, "mean {mean} vs {expected}");
    assert!((var - expected).abs() < 3.0 * se_var, "variance {var} vs {expected}");
}

#[test]
fn anchor_counts_are_poisson() {
    let counts: Vec<usize> = (0..DRAWS)
        .into_par_iter()
        .map(|i| {
            sample_ppp_disk(0.01, 20.0, &mut RngStream::new(5, i).generator())
                .unwrap()
                .len()
        })
        .collect();
    check_poisson_counts(&counts, 0.01 * PI * 400.0);
    assert!((0.01 * PI * 400.0 - 12.566).abs() < 1e-3);
}

#[test]
fn obstacle_counts_are_poisson() {
    let counts: Vec<usize> = (0..DRAWS)
        .into_par_iter()
        .map(|i| {
            sample_obstacle_lines(0.03, 20.0, &mut RngStream::new(6, i).generator())
                .unwrap()
                .len()
        })
        .collect();
    check_poisson_counts(&counts, 0.03 * PI * 400.0);
    assert!((0.03 * PI * 400.0 - 37.70).abs() < 1e-2);
}

#[test]
fn foot_angles_are_uniform() {
    let mut bins = [0u64; 16];
    let mut total = 0u64;
    let mut i = 0;
    while total < DRAWS {
        for l in sample_obstacle_lines(0.03, 20.0, &mut RngStream::new(7, i).generator()).unwrap() {
            let b = ((l.foot().phi() / TAU) * 16.0) as usize;
            bins[b.min(15)] += 1;
            total += 1;
        }
        i += 1;
    }
    let expected = total as f64 / 16.0;
    let chi2: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_15_P001, "chi2 {chi2} bins {bins:?}");
}

#[test]
fn squared_radius_is_uniform() {
    let mut u: Vec<f64> = Vec::with_capacity(DRAWS as usize + 64);
    let mut i = 0;
    while (u.len() as u64) < DRAWS {
        let pts = sample_ppp_disk(0.05, 20.0, &mut RngStream::new(8, i).generator()).unwrap();
        u.extend(pts.iter().map(|p| (p.norm() / 20.0).powi(2)));
        i += 1;
    }
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(k, &x)| (x - k as f64 / n).max((k + 1) as f64 / n - x))
        .fold(0.0, f64::max);
    assert!(d * n.sqrt() < KS_CRIT_P001, "KS D = {d}");
}

#[test]
fn streams_do_not_depend_on_other_consumers() {
    let alone = sample_ppp_disk(0.05, 20.0, &mut RngStream::new(99, 12).generator()).unwrap();
    // consume many other streams concurrently, then redraw stream 12
    let _: Vec<_> = (0..64u64)
        .into_par_iter()
        .map(|i| sample_ppp_disk(0.05, 20.0, &mut RngStream::new(99, i).generator()).unwrap())
        .collect();
    let again = sample_ppp_disk(0.05, 20.0, &mut RngStream::new(99, 12).generator()).unwrap();
    assert_eq!(alone, again);
}

#[test]
fn segment_and_line_counts_agree_per_stream() {
    for i in 0..500 {
        let s = RngStream::new(31, i);
        let lines = sample_obstacle_lines(0.03, 20.0, &mut s.generator()).unwrap();
        let segs = sample_obstacle_segments(0.03, 6.0, 20.0, &mut s.generator()).unwrap();
        assert_eq!(lines.len(), segs.len());
    }
}
