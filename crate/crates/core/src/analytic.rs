//! Closed-form and quadrature evaluation of blind-spot probabilities.
//!
//! The area `A` of the line-tessellation cell containing the origin has the
//! law of a typical Poisson-Voronoi cell with parameter `λ0/4`. With
//! `u = (λ0/4)·A` its density is the parameter-free generalized Gamma
//! `a·b^{c/a}/Γ(c/a) · u^{c−1} · exp(−b·u^a)`, so the asymptotic blind-spot
//! probability depends on `λ` and `λ0` only through `λ/λ0`.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{invalid, Error, Result};
use crate::quadrature;

/// Fitted shape constants of the generalized Gamma cell-area law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaFitConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub const CELL_AREA_FIT: GammaFitConstants = GammaFitConstants {
    a: 1.07950,
    b: 3.03226,
    c: 3.31122,
};

impl GammaFitConstants {
    fn ln_norm(&self) -> f64 {
        self.a.ln() + (self.c / self.a) * self.b.ln() - ln_gamma(self.c / self.a)
    }

    /// Density of the normalized area `u = (λ0/4)·A`.
    pub fn normalized_pdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        (self.ln_norm() + (self.c - 1.0) * u.ln() - self.b * u.powf(self.a)).exp()
    }

    pub fn normalized_cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        gamma_lr(self.c / self.a, self.b * u.powf(self.a))
    }

    /// Mean of the normalized area.
    pub fn normalized_mean(&self) -> f64 {
        (ln_gamma((self.c + 1.0) / self.a) - ln_gamma(self.c / self.a)).exp() / self.b.powf(1.0 / self.a)
    }

    /// Mode of the normalized density.
    fn peak(&self) -> f64 {
        ((self.c - 1.0) / (self.a * self.b)).powf(1.0 / self.a)
    }

    /// Smallest `u` past the mode at which the unnormalized density
    /// `u^{c−1}·exp(−b·u^a)` falls below `ratio` times its peak value.
    fn tail_cutoff(&self, ratio: f64) -> f64 {
        let log_shape = |u: f64| (self.c - 1.0) * u.ln() - self.b * u.powf(self.a);
        let peak = self.peak();
        let target = log_shape(peak) + ratio.ln();
        let mut lo = peak;
        let mut hi = 2.0 * peak;
        while log_shape(hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if log_shape(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

const QUAD_REL_TOL: f64 = 1e-8;
const QUAD_ABS_TOL: f64 = 1e-15;
const QUAD_MAX_PANELS: usize = 4000;
const TAIL_RATIO: f64 = 1e-12;

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn check_k_min(k_min: u32) -> Result<()> {
    if k_min >= 1 {
        Ok(())
    } else {
        Err(invalid("k_min must be >= 1"))
    }
}

/// `P(N ≤ k_min − 1)` for `N ~ Poisson(mean)`, accumulated in log space.
pub fn poisson_cdf_below(mean: f64, k_min: u32) -> f64 {
    if mean <= 0.0 {
        return 1.0;
    }
    if k_min == 0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let log_terms: Vec<f64> = (0..k_min)
        .map(|k| -mean + k as f64 * ln_mean - ln_gamma(k as f64 + 1.0))
        .collect();
    let top = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_terms.iter().map(|&t| (t - top).exp()).sum();
    (top + sum.ln()).exp().min(1.0)
}

/// Blind-spot probability given the visible area: fewer than `k_min`
/// anchors of a PPP with intensity `lambda` fall in a region of area `area`.
pub fn conditional_blindspot(lambda: f64, area: f64, k_min: u32) -> Result<f64> {
    check_nonneg("lambda", lambda)?;
    check_nonneg("area", area)?;
    check_k_min(k_min)?;
    Ok(poisson_cdf_below(lambda * area, k_min))
}

/// Density of the origin cell's area under the Gamma fit.
pub fn gamma_cell_area_pdf(area: f64, lambda0: f64) -> Result<f64> {
    check_positive("lambda0", lambda0)?;
    if area.is_nan() {
        return Err(invalid("area is NaN"));
    }
    let mu = 0.25 * lambda0;
    Ok(mu * CELL_AREA_FIT.normalized_pdf(mu * area))
}

/// Distribution function matching [`gamma_cell_area_pdf`].
pub fn gamma_cell_area_cdf(area: f64, lambda0: f64) -> Result<f64> {
    check_positive("lambda0", lambda0)?;
    Ok(CELL_AREA_FIT.normalized_cdf(0.25 * lambda0 * area))
}

/// Mean cell area implied by the Gamma fit, `(4/λ0)·E[u]`.
pub fn gamma_cell_area_mean(lambda0: f64) -> Result<f64> {
    check_positive("lambda0", lambda0)?;
    Ok(4.0 / lambda0 * CELL_AREA_FIT.normalized_mean())
}

/// Blind-spot probability under infinite-line obstacles, integrating the
/// conditional probability against the cell-area law.
pub fn asymptotic_blindspot(lambda: f64, lambda0: f64, k_min: u32) -> Result<f64> {
    check_nonneg("lambda", lambda)?;
    check_positive("lambda0", lambda0)?;
    check_k_min(k_min)?;
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let anchors_per_unit = 4.0 * lambda / lambda0;
    let fit = CELL_AREA_FIT;
    let u_max = fit.tail_cutoff(TAIL_RATIO);
    let q = quadrature::integrate(
        |u| poisson_cdf_below(anchors_per_unit * u, k_min) * fit.normalized_pdf(u),
        0.0,
        u_max,
        QUAD_REL_TOL,
        QUAD_ABS_TOL,
        QUAD_MAX_PANELS,
    )?;
    Ok(q.value.clamp(0.0, 1.0))
}

/// Probability that the point at distance `r` sees the origin past
/// infinite-line obstacles: no foot point in the disk with diameter from
/// the origin to that point.
pub fn visibility_probability(r: f64, lambda0: f64) -> Result<f64> {
    check_nonneg("r", r)?;
    check_nonneg("lambda0", lambda0)?;
    Ok((-lambda0 * PI * r * r / 4.0).exp())
}

/// Smallest obstacle intensity for which a point at distance `range` is
/// visible with probability at most `delta`.
pub fn min_lambda0_for_delta(range: f64, delta: f64) -> Result<f64> {
    check_positive("range", range)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(-4.0 * delta.ln() / (PI * range * range))
}

/// `(E[A_v], λ·E[A_v])` under independent blocking inside the range disk.
pub fn mean_visible_area_lines(lambda: f64, lambda0: f64, range: f64) -> Result<(f64, f64)> {
    check_nonneg("lambda", lambda)?;
    check_nonneg("lambda0", lambda0)?;
    check_positive("range", range)?;
    let disk = PI * range * range;
    let mean_area = if lambda0 == 0.0 {
        disk
    } else {
        -4.0 / lambda0 * (-lambda0 * disk / 4.0).exp_m1()
    };
    Ok((mean_area, lambda * mean_area))
}

/// Baseline that treats every anchor link as independently blocked.
pub fn independent_blindspot_lines(lambda: f64, lambda0: f64, range: f64, k_min: u32) -> Result<f64> {
    check_k_min(k_min)?;
    let (_, mean_count) = mean_visible_area_lines(lambda, lambda0, range)?;
    Ok(poisson_cdf_below(mean_count, k_min))
}

/// Independent-blocking baseline for finite obstacles, given the mean
/// unshadowed area inside the range disk.
pub fn independent_blindspot_segments(
    lambda: f64,
    lambda0: f64,
    length: f64,
    range: f64,
    k_min: u32,
    mean_unshadowed_area: f64,
) -> Result<f64> {
    check_nonneg("lambda", lambda)?;
    check_nonneg("lambda0", lambda0)?;
    check_positive("length", length)?;
    check_positive("range", range)?;
    check_k_min(k_min)?;
    let disk = PI * range * range;
    if !(0.0..=disk).contains(&mean_unshadowed_area) {
        return Err(invalid(format!(
            "mean unshadowed area {mean_unshadowed_area} outside [0, {disk}]"
        )));
    }
    Ok(poisson_cdf_below(lambda * mean_unshadowed_area, k_min))
}

/// Outcome of [`design_anchor_intensity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Design {
    pub lambda: f64,
    /// `asymptotic_blindspot(lambda, lambda0, k_min)`, never above epsilon.
    pub achieved: f64,
}

const DESIGN_TOL: f64 = 1e-6;
const DESIGN_MAX_ITER: usize = 200;

/// Smallest anchor intensity found by bisection whose asymptotic blind-spot
/// probability does not exceed `epsilon`.
///
/// The bracket grows from `lambda0` by doubling, and every trial point is a
/// dyadic multiple of `lambda0`, so the solution scales exactly with
/// `lambda0`.
pub fn design_anchor_intensity(lambda0: f64, epsilon: f64, k_min: u32) -> Result<Design> {
    check_positive("lambda0", lambda0)?;
    check_k_min(k_min)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let b = |lambda: f64| asymptotic_blindspot(lambda, lambda0, k_min);

    let mut lo = 0.0;
    let mut hi = lambda0;
    let mut b_hi = b(hi)?;
    let mut doublings = 0;
    while b_hi > epsilon {
        lo = hi;
        hi *= 2.0;
        b_hi = b(hi)?;
        doublings += 1;
        if doublings > 1000 || !hi.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "could not bracket epsilon {epsilon} (b_as({hi}) = {b_hi})"
            )));
        }
    }

    for _ in 0..DESIGN_MAX_ITER {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let b_mid = b(mid)?;
        if b_mid > epsilon {
            lo = mid;
        } else {
            hi = mid;
            b_hi = b_mid;
        }
    }

    if b_hi > epsilon || b_hi < epsilon - DESIGN_TOL {
        return Err(Error::NumericalFailure(format!(
            "design solver stalled at lambda {hi} with b_as {b_hi} (target {epsilon})"
        )));
    }
    Ok(Design {
        lambda: hi,
        achieved: b_hi,
    })
}
