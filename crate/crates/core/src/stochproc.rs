//! Seeded samplers for the anchor PPP and the obstacle foot-point PPP.
//!
//! Every random draw goes through an [`RngStream`]: a ChaCha8 generator keyed
//! by a master seed and positioned on one of its 2^64 independent streams.
//! Trial `i` of any estimator uses stream `i`, so results do not depend on
//! how trials are scheduled across threads.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::config::ObstacleLength;
use crate::error::{invalid, Result};
use crate::geom::{FootPoint, Obstacle, ObstacleLine, ObstacleSegment, Point2, GEOM_TOL};

/// Identifies one reproducible substream: `(master_seed, stream_index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Exact Poisson variate; `mean == 0` yields 0 without consuming randomness.
pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(invalid(format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Uniform point in the disk of the given radius.
#[inline]
pub fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point2 {
    let phi = TAU * rng.random::<f64>();
    let rho = radius * rng.random::<f64>().sqrt();
    Point2::from_polar(rho, phi)
}

/// Homogeneous PPP of the given intensity restricted to a centred disk.
pub fn sample_ppp_disk<R: Rng + ?Sized>(intensity: f64, radius: f64, rng: &mut R) -> Result<Vec<Point2>> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(invalid(format!("intensity must be finite and >= 0, got {intensity}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid(format!("radius must be finite and > 0, got {radius}")));
    }
    let n = sample_poisson(intensity * std::f64::consts::PI * radius * radius, rng)?;
    Ok((0..n).map(|_| uniform_in_disk(radius, rng)).collect())
}

/// Foot points of the obstacle process inside the disk. Feet within the
/// geometric tolerance of the origin are redrawn.
pub fn sample_feet<R: Rng + ?Sized>(lambda0: f64, radius: f64, rng: &mut R) -> Result<Vec<FootPoint>> {
    let mut feet = sample_ppp_disk(lambda0, radius, rng)?;
    let tol = GEOM_TOL * radius;
    for p in feet.iter_mut() {
        while p.norm() <= tol {
            *p = uniform_in_disk(radius, rng);
        }
    }
    Ok(feet.into_iter().map(FootPoint::from_point).collect())
}

pub fn sample_obstacle_lines<R: Rng + ?Sized>(lambda0: f64, radius: f64, rng: &mut R) -> Result<Vec<ObstacleLine>> {
    Ok(sample_feet(lambda0, radius, rng)?
        .into_iter()
        .map(ObstacleLine::new)
        .collect())
}

/// Segments of total length `length` centred at their feet. Shares its draws
/// with [`sample_obstacle_lines`] for the same generator state.
pub fn sample_obstacle_segments<R: Rng + ?Sized>(
    lambda0: f64,
    length: f64,
    radius: f64,
    rng: &mut R,
) -> Result<Vec<ObstacleSegment>> {
    if !(length > 0.0) {
        return Err(invalid(format!("obstacle length must be > 0, got {length}")));
    }
    sample_feet(lambda0, radius, rng)?
        .into_iter()
        .map(|f| ObstacleSegment::new(f, 0.5 * length))
        .collect()
}

/// Lines for [`ObstacleLength::Infinite`], segments otherwise.
pub fn sample_obstacles<R: Rng + ?Sized>(
    lambda0: f64,
    length: ObstacleLength,
    radius: f64,
    rng: &mut R,
) -> Result<Vec<Obstacle>> {
    let feet = sample_feet(lambda0, radius, rng)?;
    obstacles_from_feet(&feet, length)
}

pub fn obstacles_from_feet(feet: &[FootPoint], length: ObstacleLength) -> Result<Vec<Obstacle>> {
    match length {
        ObstacleLength::Infinite => Ok(feet.iter().map(|&f| ObstacleLine::new(f).into()).collect()),
        ObstacleLength::Finite(l) => {
            if !(l > 0.0) {
                return Err(invalid(format!("obstacle length must be > 0, got {l}")));
            }
            feet.iter()
                .map(|&f| ObstacleSegment::new(f, 0.5 * l).map(Obstacle::from))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_is_empty() {
        let mut rng = RngStream::new(3, 0).generator();
        assert!(sample_ppp_disk(0.0, 20.0, &mut rng).unwrap().is_empty());
        assert!(sample_obstacle_lines(0.0, 20.0, &mut rng).unwrap().is_empty());
        assert!(sample_obstacle_segments(0.0, 4.0, 20.0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = RngStream::new(3, 0).generator();
        assert!(sample_ppp_disk(-1.0, 20.0, &mut rng).is_err());
        assert!(sample_ppp_disk(1.0, 0.0, &mut rng).is_err());
        assert!(sample_obstacle_segments(0.1, 0.0, 20.0, &mut rng).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample_ppp_disk(0.05, 20.0, &mut RngStream::new(11, 4).generator()).unwrap();
        let b = sample_ppp_disk(0.05, 20.0, &mut RngStream::new(11, 4).generator()).unwrap();
        let c = sample_ppp_disk(0.05, 20.0, &mut RngStream::new(11, 5).generator()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|p| p.norm() <= 20.0));
    }

    #[test]
    fn lines_and_segments_share_the_foot_process() {
        let s = RngStream::new(9, 77);
        let lines = sample_obstacle_lines(0.03, 20.0, &mut s.generator()).unwrap();
        let segs = sample_obstacle_segments(0.03, 5.0, 20.0, &mut s.generator()).unwrap();
        assert_eq!(lines.len(), segs.len());
        for (l, g) in lines.iter().zip(&segs) {
            assert_eq!(l.foot(), g.foot());
            assert_eq!(g.half_length(), 2.5);
        }
        let inf = sample_obstacles(0.03, ObstacleLength::Infinite, 20.0, &mut s.generator()).unwrap();
        assert!(inf.iter().zip(&lines).all(|(o, l)| *o == Obstacle::Line(*l)));
    }
}
