use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;

/// Minimum number of log-radial samples.
pub const MIN_POINTS: usize = 16;

/// Uniform grid in the log-radius s = ln r.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogRadialGrid {
    s_min: f64,
    s_max: f64,
    count: usize,
    spacing: f64,
}

impl LogRadialGrid {
    pub fn new(s_min: f64, s_max: f64, count: usize) -> Result<Self> {
        if !(s_min.is_finite() && s_max.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite"));
        }
        if s_min >= s_max {
            return Err(Error::InvalidGrid("s_min must be below s_max"));
        }
        if count < MIN_POINTS {
            return Err(Error::InvalidGrid("at least 16 points are required"));
        }
        Ok(Self {
            s_min,
            s_max,
            count,
            spacing: (s_max - s_min) / (count - 1) as f64,
        })
    }

    /// Symmetric grid [-half_span, half_span].
    pub fn symmetric(half_span: f64, count: usize) -> Result<Self> {
        Self::new(-half_span, half_span, count)
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn span(&self) -> f64 {
        self.s_max - self.s_min
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.spacing
    }

    #[inline]
    pub fn radius(&self, i: usize) -> f64 {
        self.point(i).exp()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Same grid extended by `extra` samples on each side.
    pub fn extended(&self, extra: usize) -> Self {
        let pad = extra as f64 * self.spacing;
        Self {
            s_min: self.s_min - pad,
            s_max: self.s_max + pad,
            count: self.count + 2 * extra,
            spacing: self.spacing,
        }
    }

    /// Indices whose points lie in the inner `fraction` of the grid span.
    pub fn inner_range(&self, fraction: f64) -> core::ops::Range<usize> {
        let margin = 0.5 * (1.0 - fraction) * (self.count - 1) as f64;
        let lo = margin.ceil() as usize;
        let hi = self.count - lo;
        lo..hi.max(lo)
    }

    /// Grids are interchangeable when endpoints and counts agree to rounding.
    pub fn matches(&self, other: &Self) -> bool {
        let tol = 1e-12 * (1.0 + self.span());
        self.count == other.count
            && (self.s_min - other.s_min).abs() <= tol
            && (self.s_max - other.s_max).abs() <= tol
    }
}

impl Default for LogRadialGrid {
    /// s ∈ [-12, 12] with 2048 points.
    fn default() -> Self {
        Self::new(-12.0, 12.0, 2048).expect("default grid is valid")
    }
}

impl<'de> Deserialize<'de> for LogRadialGrid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            s_min: f64,
            s_max: f64,
            count: usize,
            #[serde(default)]
            #[allow(dead_code)]
            spacing: Option<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        LogRadialGrid::new(raw.s_min, raw.s_max, raw.count).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_points() {
        let g = LogRadialGrid::new(-1.0, 1.0, 21).unwrap();
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        assert_eq!(g.point(0), -1.0);
        assert!((g.point(20) - 1.0).abs() < 1e-14);
        assert!(g.points().zip(g.points().skip(1)).all(|(a, b)| a < b));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(LogRadialGrid::new(1.0, -1.0, 32).is_err());
        assert!(LogRadialGrid::new(-1.0, 1.0, 15).is_err());
        assert!(LogRadialGrid::new(f64::NAN, 1.0, 32).is_err());
    }

    #[test]
    fn default_grid() {
        let g = LogRadialGrid::default();
        assert_eq!(g.count(), 2048);
        assert_eq!(g.s_min(), -12.0);
        let inner = g.inner_range(0.8);
        assert!(g.point(inner.start) >= -9.6 - 1e-12);
        assert!(g.point(inner.end - 1) <= 9.6 + 1e-12);
    }

    #[test]
    fn extension_keeps_spacing() {
        let g = LogRadialGrid::default();
        let e = g.extended(10);
        assert!((e.spacing() - g.spacing()).abs() < 1e-15);
        assert!((e.point(10) - g.point(0)).abs() < 1e-12);
    }
}
