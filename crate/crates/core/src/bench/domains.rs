//! Named benchmark domains.

use std::f64::consts::{FRAC_PI_6, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_grid, reinitialize, sample_level_set, LevelSetField};

/// Benchmark domain. The 2D variants are level sets on `[-1, 1]^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainSpec {
    Circle,
    Ellipse,
    Saddle,
    Flower,
    Interval,
}

/// Pseudo-time steps allowed when reinitializing a sampled level set on a
/// single grid. Deeper hierarchies get enough steps to cover their band.
pub const REINIT_STEPS: usize = 100;

impl DomainSpec {
    pub const ALL_2D: [DomainSpec; 4] = [
        DomainSpec::Circle,
        DomainSpec::Ellipse,
        DomainSpec::Saddle,
        DomainSpec::Flower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainSpec::Circle => "circle",
            DomainSpec::Ellipse => "ellipse",
            DomainSpec::Saddle => "saddle",
            DomainSpec::Flower => "flower",
            DomainSpec::Interval => "interval",
        }
    }

    /// False only for the circle, whose formula is already a signed distance.
    pub fn needs_reinit(self) -> bool {
        matches!(
            self,
            DomainSpec::Ellipse | DomainSpec::Saddle | DomainSpec::Flower
        )
    }

    pub fn is_2d(self) -> bool {
        self != DomainSpec::Interval
    }

    /// Level-set formula `phi(x, y)`; `None` for the interval.
    pub fn formula(self) -> Option<fn(f64, f64) -> f64> {
        match self {
            DomainSpec::Circle => Some(circle),
            DomainSpec::Ellipse => Some(ellipse),
            DomainSpec::Saddle => Some(saddle),
            DomainSpec::Flower => Some(flower),
            DomainSpec::Interval => None,
        }
    }

    /// Samples the domain on an `n x n` grid, reinitializing when needed.
    pub fn level_set(self, n: usize) -> Result<LevelSetField> {
        self.level_set_for(n, n)
    }

    /// Samples the domain on an `n x n` grid for a hierarchy down to `n_c`.
    ///
    /// The reinitialization band spans three coarsest-grid cells, since every
    /// level works with the injected fine field.
    pub fn level_set_for(self, n: usize, n_c: usize) -> Result<LevelSetField> {
        let formula = self
            .formula()
            .ok_or_else(|| Error::InvalidArgument("the interval has no 2D level set".into()))?;
        let grid = build_grid(n)?;
        let phi = sample_level_set(grid, formula)?;
        if !self.needs_reinit() {
            return Ok(phi.assume_signed_distance());
        }
        let band = 3.0 * 2.0 / n_c.clamp(1, n) as f64;
        let steps = REINIT_STEPS.max((4.0 * band / grid.h()).ceil() as usize);
        let (phi, _) = reinitialize(&phi, band, steps)?;
        Ok(phi)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" => Ok(DomainSpec::Circle),
            "ellipse" => Ok(DomainSpec::Ellipse),
            "saddle" => Ok(DomainSpec::Saddle),
            "flower" => Ok(DomainSpec::Flower),
            "interval" => Ok(DomainSpec::Interval),
            other => Err(Error::InvalidArgument(format!("unknown domain '{other}'"))),
        }
    }
}

fn center() -> (f64, f64) {
    (SQRT_2 / 20.0, 3f64.sqrt() / 30.0)
}

pub fn circle(x: f64, y: f64) -> f64 {
    let (cx, cy) = center();
    (x - cx).hypot(y - cy) - 0.563
}

pub fn ellipse(x: f64, y: f64) -> f64 {
    let (cx, cy) = center();
    let (s, c) = FRAC_PI_6.sin_cos();
    let big_x = c * x - s * y;
    let big_y = s * x + c * y;
    (big_x - cx).powi(2) / 0.563f64.powi(2) + (big_y - cy).powi(2) / 0.263f64.powi(2) - 1.0
}

pub fn saddle(x: f64, y: f64) -> f64 {
    let s3 = 3f64.sqrt();
    let a = 0.5 * x - 0.5 * s3 * y;
    let b = 1.5 * s3 * x + 1.5 * y - 1.0;
    9.0 * a * a + b * b * b.sin() - 1.0
}

pub fn flower(x: f64, y: f64) -> f64 {
    let r = x.hypot(y);
    if r < 1e-12 {
        return -0.5;
    }
    let petals = y.powi(5) + 5.0 * x.powi(4) * y - 10.0 * x * x * y.powi(3);
    r - 0.5 - petals / (5.0 * r.powi(5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in DomainSpec::ALL_2D.into_iter().chain([DomainSpec::Interval]) {
            assert_eq!(d.name().parse::<DomainSpec>().unwrap(), d);
        }
        assert!("square".parse::<DomainSpec>().is_err());
    }

    #[test]
    fn centers_are_inside() {
        let (cx, cy) = center();
        assert!(circle(cx, cy) < 0.0);
        assert!(ellipse(0.0, 0.0) < 0.0);
        assert!(flower(0.0, 0.0) < 0.0);
        assert!(saddle(0.3, 0.0) < 0.0);
        for d in DomainSpec::ALL_2D {
            let f = d.formula().unwrap();
            assert!(f(0.99, 0.99) > 0.0, "{d}");
        }
    }

    #[test]
    fn flower_has_five_petals() {
        // Along the unit-angle direction theta the boundary radius is 0.5 + sin(5 theta)/5.
        for k in 0..10 {
            let t = 0.3 + k as f64 * 0.6;
            let r = 0.5 + (5.0 * t).sin() / 5.0;
            assert!(flower(r * t.cos(), r * t.sin()).abs() < 1e-12);
        }
    }
}
