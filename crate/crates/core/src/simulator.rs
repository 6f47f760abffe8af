//! Monte Carlo estimators.
//!
//! Trial `i` draws everything from [`RngStream`]`(seed, i)` in a fixed order:
//! obstacle feet first, then anchors (or probe points). The obstacle length
//! only decides how each foot is turned into an obstacle, so runs that differ
//! in `L` alone share their random numbers trial by trial.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::analytic;
use crate::config::{ObstacleLength, ScenarioConfig};
use crate::error::{invalid, Error, Result};
use crate::geom::{cell_containing_origin, Obstacle, Point2};
use crate::report::SweepRow;
use crate::stochproc::{
    obstacles_from_feet, sample_feet, sample_obstacle_lines, sample_ppp_disk, uniform_in_disk, RngStream,
};

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub value: f64,
    pub stderr: f64,
    pub n_trials: u64,
    pub master_seed: u64,
}

impl EstimateResult {
    /// Normal-approximation 95% interval.
    pub fn ci95(&self) -> (f64, f64) {
        let half = 1.959_963_984_540_054 * self.stderr;
        (self.value - half, self.value + half)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellAreaSample {
    pub areas: Vec<f64>,
    /// Realizations dropped because the cell touched the sampling window.
    pub n_discarded: u64,
}

impl CellAreaSample {
    pub fn discard_fraction(&self) -> f64 {
        let total = self.areas.len() as u64 + self.n_discarded;
        if total == 0 {
            0.0
        } else {
            self.n_discarded as f64 / total as f64
        }
    }

    pub fn mean(&self) -> f64 {
        mean(&self.areas)
    }
}

// Sequential sum over an ordered slice keeps results independent of threading.
fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

#[inline]
fn visible_from_origin(anchor: Point2, obstacles: &[Obstacle]) -> bool {
    obstacles.iter().all(|o| !o.blocks(Point2::ORIGIN, anchor))
}

/// One realization: `true` when fewer than `k_min` anchors inside the range
/// disk see the origin.
pub fn simulate_blindspot_trial(config: &ScenarioConfig, stream: RngStream) -> Result<bool> {
    let mut rng = stream.generator();
    let feet = sample_feet(config.lambda0, config.range, &mut rng)?;
    let obstacles = obstacles_from_feet(&feet, config.length)?;
    let anchors = sample_ppp_disk(config.lambda, config.range, &mut rng)?;

    let needed = config.k_min as usize;
    let mut seen = 0usize;
    for &a in &anchors {
        if visible_from_origin(a, &obstacles) {
            seen += 1;
            if seen >= needed {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Per-trial blind-spot indicators for trial indices `0..n_trials`.
pub fn trial_indicators(config: &ScenarioConfig, n_trials: u64, master_seed: u64) -> Result<Vec<bool>> {
    config.validate()?;
    (0..n_trials)
        .into_par_iter()
        .map(|i| simulate_blindspot_trial(config, RngStream::new(master_seed, i)))
        .collect()
}

/// Fraction of blind-spot trials.
pub fn estimate_blindspot(config: &ScenarioConfig, n_trials: u64, master_seed: u64) -> Result<EstimateResult> {
    if n_trials < 1 {
        return Err(invalid("n_trials must be >= 1"));
    }
    let hits = trial_indicators(config, n_trials, master_seed)?
        .into_iter()
        .filter(|&b| b)
        .count();
    let n = n_trials as f64;
    let p = hits as f64 / n;
    Ok(EstimateResult {
        value: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        n_trials,
        master_seed,
    })
}

/// Window half-width at which a fixed direction escapes the window with
/// probability below 1e-10.
pub fn cell_window_halfwidth(lambda0: f64) -> f64 {
    (-4.0 * 1e-10_f64.ln() / (PI * lambda0)).sqrt()
}

/// Areas of the origin's cell in independent line-process realizations.
pub fn sample_cell_areas(lambda0: f64, n_samples: u64, master_seed: u64) -> Result<CellAreaSample> {
    if !(lambda0 > 0.0) || !lambda0.is_finite() {
        return Err(invalid(format!("lambda0 must be finite and > 0, got {lambda0}")));
    }
    let w = cell_window_halfwidth(lambda0);
    let outcomes: Vec<Option<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(master_seed, i).generator();
            let lines = sample_obstacle_lines(lambda0, std::f64::consts::SQRT_2 * w, &mut rng)?;
            let cell = cell_containing_origin(&lines, w)?;
            Ok((!cell.truncated).then(|| cell.polygon.area()))
        })
        .collect::<Result<_>>()?;
    let n_discarded = outcomes.iter().filter(|o| o.is_none()).count() as u64;
    Ok(CellAreaSample {
        areas: outcomes.into_iter().flatten().collect(),
        n_discarded,
    })
}

/// Mean area of the unshadowed part of the range disk, from `n_probes`
/// uniform probe points per obstacle realization.
pub fn estimate_mean_unshadowed_area(
    lambda0: f64,
    length: ObstacleLength,
    range: f64,
    n_draws: u64,
    n_probes: u64,
    master_seed: u64,
) -> Result<EstimateResult> {
    if n_draws < 1 || n_probes < 1 {
        return Err(invalid("n_draws and n_probes must be >= 1"));
    }
    if !(range > 0.0) || !range.is_finite() {
        return Err(invalid(format!("range must be finite and > 0, got {range}")));
    }
    let fractions: Vec<f64> = (0..n_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(master_seed, i).generator();
            let feet = sample_feet(lambda0, range, &mut rng)?;
            let obstacles = obstacles_from_feet(&feet, length)?;
            let visible = (0..n_probes)
                .filter(|_| visible_from_origin(uniform_in_disk(range, &mut rng), &obstacles))
                .count();
            Ok(visible as f64 / n_probes as f64)
        })
        .collect::<Result<_>>()?;
    let disk = PI * range * range;
    Ok(EstimateResult {
        value: disk * mean(&fractions),
        stderr: disk * sample_std(&fractions) / (n_draws as f64).sqrt(),
        n_trials: n_draws,
        master_seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Direct simulation of the blind-spot event.
    Mc,
    /// Quadrature against the cell-area law (infinite lines).
    AnalyticAsymptotic,
    /// Independent blocking with infinite lines, closed form.
    AnalyticIndependent,
    /// Independent blocking with the mean unshadowed area estimated by simulation.
    McIndependentSegments,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Mc,
        Method::AnalyticAsymptotic,
        Method::AnalyticIndependent,
        Method::McIndependentSegments,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::AnalyticAsymptotic => "analytic_asymptotic",
            Method::AnalyticIndependent => "analytic_independent",
            Method::McIndependentSegments => "mc_independent_segments",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| {
                invalid(format!(
                    "unknown method {s:?}; expected one of mc, analytic_asymptotic, analytic_independent, mc_independent_segments"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Lambda,
    Length,
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lambda" => Ok(SweepVariable::Lambda),
            "L" | "length" => Ok(SweepVariable::Length),
            other => Err(invalid(format!(
                "unknown sweep variable {other:?}; expected lambda or length"
            ))),
        }
    }
}

fn poisson_pmf(mean: f64, k: u32) -> f64 {
    if mean <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (-mean + k as f64 * mean.ln() - ln_gamma(k as f64 + 1.0)).exp()
}

/// Evaluates every method at every value of the swept parameter.
///
/// Rows come out value by value, methods in the order given. All Monte Carlo
/// rows use the same master seed, so an `L` sweep uses common random numbers.
pub fn run_sweep(
    base: &ScenarioConfig,
    variable: SweepVariable,
    values: &[f64],
    methods: &[Method],
    n_trials: u64,
    master_seed: u64,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(invalid("sweep needs at least one value"));
    }
    if methods.is_empty() {
        return Err(invalid("sweep needs at least one method"));
    }
    if n_trials < 1 {
        return Err(invalid("n_trials must be >= 1"));
    }

    let mut configs = Vec::with_capacity(values.len());
    for &v in values {
        let mut cfg = base.clone();
        match variable {
            SweepVariable::Lambda => cfg.lambda = v,
            SweepVariable::Length => {
                cfg.length = if v.is_infinite() && v > 0.0 {
                    ObstacleLength::Infinite
                } else {
                    ObstacleLength::Finite(v)
                }
            }
        }
        cfg.trials = n_trials;
        cfg.seed = master_seed;
        cfg.validate()?;
        configs.push(cfg);
    }

    let mut area_cache: HashMap<String, EstimateResult> = HashMap::new();
    let mut rows = Vec::with_capacity(values.len() * methods.len());
    for cfg in &configs {
        for &method in methods {
            let mut row = SweepRow {
                method: method.name().to_string(),
                lambda: cfg.lambda,
                lambda0: cfg.lambda0,
                length: cfg.length,
                range: cfg.range,
                k_min: cfg.k_min,
                value: 0.0,
                stderr: None,
                n_trials: None,
                seed: None,
            };
            match method {
                Method::Mc => {
                    let est = estimate_blindspot(cfg, n_trials, master_seed)?;
                    row.value = est.value;
                    row.stderr = Some(est.stderr);
                    row.n_trials = Some(n_trials);
                    row.seed = Some(master_seed);
                }
                Method::AnalyticAsymptotic => {
                    if !(cfg.lambda0 > 0.0) {
                        return Err(invalid("analytic_asymptotic requires lambda0 > 0"));
                    }
                    row.value = analytic::asymptotic_blindspot(cfg.lambda, cfg.lambda0, cfg.k_min)?;
                }
                Method::AnalyticIndependent => {
                    row.value = analytic::independent_blindspot_lines(cfg.lambda, cfg.lambda0, cfg.range, cfg.k_min)?;
                }
                Method::McIndependentSegments => {
                    let key = format!("{}|{}|{}", cfg.lambda0, cfg.length, cfg.range);
                    let area = match area_cache.get(&key) {
                        Some(a) => *a,
                        None => {
                            let a = estimate_mean_unshadowed_area(
                                cfg.lambda0,
                                cfg.length,
                                cfg.range,
                                cfg.area_draws,
                                cfg.area_probes,
                                master_seed,
                            )?;
                            area_cache.insert(key, a);
                            a
                        }
                    };
                    let mean_count = cfg.lambda * area.value;
                    row.value = analytic::poisson_cdf_below(mean_count, cfg.k_min);
                    // delta method: d/dm P(N <= k-1) = -pmf(k-1; m)
                    row.stderr = Some(poisson_pmf(mean_count, cfg.k_min - 1) * cfg.lambda * area.stderr);
                    row.n_trials = Some(cfg.area_draws);
                    row.seed = Some(master_seed);
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}
