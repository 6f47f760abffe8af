use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Obstacle length: infinite lines or finite segments of length `L` metres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObstacleLength {
    Infinite,
    Finite(f64),
}

impl ObstacleLength {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ObstacleLength::Infinite)
    }
}

impl fmt::Display for ObstacleLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObstacleLength::Infinite => f.write_str("inf"),
            ObstacleLength::Finite(l) => write!(f, "{l}"),
        }
    }
}

impl FromStr for ObstacleLength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinite") {
            return Ok(ObstacleLength::Infinite);
        }
        let l: f64 = s
            .parse()
            .map_err(|_| invalid(format!("obstacle length must be a number or 'inf', got {s:?}")))?;
        if l.is_infinite() && l > 0.0 {
            Ok(ObstacleLength::Infinite)
        } else if l > 0.0 {
            Ok(ObstacleLength::Finite(l))
        } else {
            Err(invalid(format!("obstacle length must be > 0, got {l}")))
        }
    }
}

impl Serialize for ObstacleLength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ObstacleLength::Infinite => s.serialize_str("inf"),
            ObstacleLength::Finite(l) => s.serialize_f64(*l),
        }
    }
}

impl<'de> Deserialize<'de> for ObstacleLength {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(l) => l.to_string().parse::<ObstacleLength>(),
            Raw::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// All model and run parameters. Intensities are per m², lengths in metres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Anchor intensity λ.
    pub lambda: f64,
    /// Obstacle foot-point intensity λ0.
    pub lambda0: f64,
    /// Communication range R.
    pub range: f64,
    pub length: ObstacleLength,
    /// Containment threshold δ.
    pub delta: f64,
    /// Design target ε.
    pub epsilon: f64,
    /// Minimum number of visible anchors for localization.
    pub k_min: u32,
    pub trials: u64,
    pub seed: u64,
    /// Obstacle draws used to estimate the mean unshadowed area.
    pub area_draws: u64,
    /// Probe points per obstacle draw for the same estimate.
    pub area_probes: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            lambda: 0.05,
            lambda0: 0.03,
            range: 20.0,
            length: ObstacleLength::Infinite,
            delta: 1e-4,
            epsilon: 0.1,
            k_min: 3,
            trials: 100_000,
            seed: 1,
            area_draws: 1_000,
            area_probes: 4_096,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        fn finite_nonneg(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be finite and >= 0, got {v}")))
            }
        }
        finite_nonneg("lambda", self.lambda)?;
        finite_nonneg("lambda0", self.lambda0)?;
        if !(self.range > 0.0) || !self.range.is_finite() {
            return Err(invalid(format!("range must be finite and > 0, got {}", self.range)));
        }
        if let ObstacleLength::Finite(l) = self.length {
            if !(l > 0.0) || !l.is_finite() {
                return Err(invalid(format!("length must be finite and > 0, got {l}")));
            }
        }
        for (name, p) in [("delta", self.delta), ("epsilon", self.epsilon)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1), got {p}")));
            }
        }
        if self.k_min < 1 {
            return Err(invalid("k_min must be >= 1"));
        }
        if self.trials < 1 {
            return Err(invalid("trials must be >= 1"));
        }
        if self.area_draws < 1 || self.area_probes < 1 {
            return Err(invalid("area_draws and area_probes must be >= 1"));
        }
        Ok(())
    }
}
