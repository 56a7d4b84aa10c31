//! Small geometric value types shared by the solver modules.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Polar coordinates with the angle folded into `[0, 2π)`.
    pub fn polar(&self) -> (f64, f64) {
        let r = self.x.hypot(self.y);
        let mut theta = self.y.atan2(self.x);
        if theta < 0.0 {
            theta += TAU;
        }
        (r, theta)
    }
}

/// A direction in the plane stored as a homogeneous pair.
///
/// Only the line spanned by `(dx, dy)` matters, so vertical tangents are
/// represented without infinities. Constructed pairs are normalized to unit
/// length; orientation is kept as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub dx: f64,
    pub dy: f64,
}

impl Direction {
    /// Returns `None` for a zero or non-finite pair.
    pub fn new(dx: f64, dy: f64) -> Option<Self> {
        let n = dx.hypot(dy);
        if !(n.is_finite() && n > 0.0) {
            return None;
        }
        Some(Self {
            dx: dx / n,
            dy: dy / n,
        })
    }

    /// Unnormalized pair, kept exactly as given.
    pub fn raw(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    pub fn norm(&self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn cross(&self, other: &Direction) -> f64 {
        self.dx * other.dy - other.dx * self.dy
    }

    /// Cross product of the two directions after normalization.
    pub fn normalized_cross(&self, other: &Direction) -> f64 {
        self.cross(other) / (self.norm() * other.norm())
    }

    /// dy/dx, infinite for vertical directions.
    pub fn slope(&self) -> f64 {
        self.dy / self.dx
    }

    /// dx/dy, infinite for horizontal directions.
    pub fn inverse_slope(&self) -> f64 {
        self.dx / self.dy
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            dx: self.dx * k,
            dy: self.dy * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Option<Self> {
        let ok = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite())
            && x_min < x_max
            && y_min < y_max;
        ok.then_some(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// The curve carrying the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    /// Segment `[lo, hi]` of the line `y = 0`.
    Line { lo: f64, hi: f64 },
    /// The circle `x² + y² = 1`.
    UnitCircle,
}

impl Support {
    /// Points along the support, spaced no further apart than `step`.
    pub fn sample(&self, step: f64) -> Vec<Point> {
        match *self {
            Support::Line { lo, hi } => {
                let n = (((hi - lo) / step).ceil() as usize).max(1);
                (0..=n)
                    .map(|k| Point::new(lo + (hi - lo) * k as f64 / n as f64, 0.0))
                    .collect()
            }
            Support::UnitCircle => {
                let n = ((TAU / step).ceil() as usize).max(8);
                (0..=n)
                    .map(|k| {
                        let t = TAU * k as f64 / n as f64;
                        Point::new(t.cos(), t.sin())
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_angle_is_folded() {
        let (r, t) = Point::new(0.0, -2.0).polar();
        assert_eq!(r, 2.0);
        assert!((t - 1.5 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn zero_direction_is_rejected() {
        assert!(Direction::new(0.0, 0.0).is_none());
        assert!(Direction::new(f64::NAN, 1.0).is_none());
        let d = Direction::new(3.0, 4.0).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bbox_must_be_ordered() {
        assert!(BBox::new(0.0, 1.0, 0.0, 1.0).is_some());
        assert!(BBox::new(1.0, 0.0, 0.0, 1.0).is_none());
    }
}
