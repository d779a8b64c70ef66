//! Closed-set predicates used by the referee.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative rounding allowance for the geometry and ratio tests.
pub const GEOMETRY_TOL: f64 = 1e-12;
/// Allowed deviation of `‖normal‖` from one.
pub const NORMAL_TOL: f64 = 1e-12;

/// Closed ball `B̄(y, r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        let b = Ball { center, radius };
        b.validate()?;
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.center.is_empty() {
            return Err(Error::invalid("malformed-move", "ball center must be nonempty"));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::invalid("malformed-move", format!("radius {} must be positive", self.radius)));
        }
        if self.center.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("malformed-move", "ball center must be finite"));
        }
        Ok(())
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        distance(&self.center, p) <= self.radius
    }
}

/// `{x : |⟨normal, x⟩ − offset| ≤ halfwidth}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneNbhd {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub halfwidth: f64,
}

impl HyperplaneNbhd {
    pub fn new(normal: Vec<f64>, offset: f64, halfwidth: f64) -> Result<Self> {
        let h = HyperplaneNbhd {
            normal,
            offset,
            halfwidth,
        };
        h.validate()?;
        Ok(h)
    }

    /// Normalises `normal` first, scaling `offset` accordingly.
    pub fn from_direction(direction: &[f64], offset: f64, halfwidth: f64) -> Result<Self> {
        let n = norm(direction);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("malformed-move", "hyperplane direction must be nonzero"));
        }
        Self::new(direction.iter().map(|x| x / n).collect(), offset / n, halfwidth)
    }

    /// The slab around the hyperplane `{x₁ = p₁}` through `p`.
    pub fn through_point(p: &[f64], halfwidth: f64) -> Result<Self> {
        let mut normal = vec![0.0; p.len()];
        normal[0] = 1.0;
        Self::new(normal, p[0], halfwidth)
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.normal.is_empty() {
            return Err(Error::invalid("malformed-move", "slab normal must be nonempty"));
        }
        if !((norm(&self.normal) - 1.0).abs() <= NORMAL_TOL) {
            return Err(Error::invalid("malformed-move", "slab normal must be a unit vector"));
        }
        if !self.offset.is_finite() {
            return Err(Error::invalid("malformed-move", "slab offset must be finite"));
        }
        if !(self.halfwidth > 0.0) || !self.halfwidth.is_finite() {
            return Err(Error::invalid("malformed-move", "slab halfwidth must be positive"));
        }
        Ok(())
    }

    /// `⟨normal, x⟩ − offset`.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.signed_distance(x).abs() <= self.halfwidth
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `inner ⊆ outer`: `d(y, y') + r' ≤ r`, up to rounding.
pub fn ball_within(inner: &Ball, outer: &Ball) -> bool {
    distance(&inner.center, &outer.center) + inner.radius <= outer.radius * (1.0 + GEOMETRY_TOL)
}

/// Closed ball and closed slab share no point. Near-tangency counts as meeting.
pub fn ball_avoids_slab(ball: &Ball, slab: &HyperplaneNbhd) -> bool {
    slab.signed_distance(&ball.center).abs() - slab.halfwidth - ball.radius > GEOMETRY_TOL * ball.radius
}

/// `x ≥ bound` up to relative rounding.
pub(crate) fn at_least(x: f64, bound: f64) -> bool {
    x >= bound * (1.0 - GEOMETRY_TOL)
}

/// `x ≤ bound` up to relative rounding.
pub(crate) fn at_most(x: f64, bound: f64) -> bool {
    x <= bound * (1.0 + GEOMETRY_TOL)
}

/// `x = target` up to relative rounding.
pub(crate) fn matches(x: f64, target: f64) -> bool {
    (x - target).abs() <= GEOMETRY_TOL * target.abs()
}
