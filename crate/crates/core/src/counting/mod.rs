//! Exact enumeration engines over integer boxes.
//!
//! Every kernel enumerates lexicographically, split into independent slices
//! along the first coordinate; slices are reduced with order-independent
//! operations (integer sums, total-order minima), so results do not depend
//! on the number of worker threads.

mod count;
mod fourterm;
mod growth;
mod minsearch;

pub use count::{count_congruence, count_in_interval, count_with_cutoff};
pub use fourterm::{four_term_count, FourTermParams};
pub use growth::{fit_growth, shrinking_target_run, CountRecord, GrowthFit, ShrinkingTarget};
pub use minsearch::{min_abs_in_shell, min_search_delta, MinRecord, MinTarget, Shell};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real interval with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_open: bool,
    #[serde(default)]
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::invalid("interval", format!("need lo ≤ hi, got [{lo}, {hi}]")));
        }
        Ok(Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// `(center − width/2, center + width/2)`.
    pub fn centered(center: f64, width: f64) -> Result<Self> {
        Self::open(center - width / 2.0, center + width / 2.0)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi && (self.lo_open || self.hi_open)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c > 0.0 {
            Self::new(self.lo * c, self.hi * c, self.lo_open, self.hi_open)
        } else {
            Err(Error::invalid("scale", "interval scale must be positive"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    Euclidean,
    Sup,
}

/// `‖y‖ ≤ t` (closed) or `‖y‖ < t` (strict) in the chosen norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub radius: f64,
    pub norm: Norm,
    pub strict: bool,
}

impl Cutoff {
    pub fn closed(radius: f64, norm: Norm) -> Self {
        Cutoff {
            radius,
            norm,
            strict: false,
        }
    }

    pub fn strict(radius: f64, norm: Norm) -> Self {
        Cutoff {
            radius,
            norm,
            strict: true,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0) || !self.radius.is_finite() {
            return Err(Error::invalid("radius", "norm cutoff must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Largest integer coordinate any admissible point can have.
    pub(crate) fn coordinate_bound(&self) -> i64 {
        let f = self.radius.floor();
        if self.strict && f == self.radius {
            f as i64 - 1
        } else {
            f as i64
        }
    }

    pub(crate) fn admits(&self, y: &[i64]) -> bool {
        match self.norm {
            Norm::Euclidean => {
                let s: f64 = y.iter().map(|&v| (v as f64) * (v as f64)).sum();
                let r2 = self.radius * self.radius;
                if self.strict {
                    s < r2
                } else {
                    s <= r2
                }
            }
            Norm::Sup => {
                let m = y.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as f64;
                if self.strict {
                    m < self.radius
                } else {
                    m <= self.radius
                }
            }
        }
    }
}

pub(crate) fn box_size(ranges: &[(i64, i64)]) -> f64 {
    ranges
        .iter()
        .map(|(lo, hi)| if hi >= lo { (hi - lo + 1) as f64 } else { 0.0 })
        .product()
}

/// Visits every point of `ranges[1..]` with first coordinate `first`, in
/// lexicographic order.
pub(crate) fn odometer(ranges: &[(i64, i64)], first: i64, mut visit: impl FnMut(&[i64])) {
    let n = ranges.len();
    if ranges[1..].iter().any(|(lo, hi)| hi < lo) {
        return;
    }
    let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    x[0] = first;
    loop {
        visit(&x);
        let mut k = n - 1;
        loop {
            if k == 0 {
                return;
            }
            x[k] += 1;
            if x[k] <= ranges[k].1 {
                break;
            }
            x[k] = ranges[k].0;
            k -= 1;
        }
    }
}

/// Parallel count of box points satisfying `pred`. `pred` receives a
/// per-slice scratch buffer of length `ranges.len()`.
pub(crate) fn box_count<P>(ranges: &[(i64, i64)], pred: P) -> u64
where
    P: Fn(&[i64], &mut [f64]) -> bool + Sync,
{
    let (lo, hi) = ranges[0];
    if hi < lo {
        return 0;
    }
    (lo..=hi)
        .into_par_iter()
        .map(|first| {
            let mut scratch = vec![0.0; ranges.len()];
            let mut c = 0u64;
            odometer(ranges, first, |x| {
                if pred(x, &mut scratch) {
                    c += 1;
                }
            });
            c
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_membership() {
        let i = Interval::open(-0.5, 0.5).unwrap();
        assert!(i.contains(0.0) && !i.contains(0.5) && !i.contains(-0.5));
        let c = Interval::closed(1.0, 1.0).unwrap();
        assert!(c.contains(1.0) && !c.is_empty());
        assert!(Interval::open(1.0, 1.0).unwrap().is_empty());
        assert!(Interval::open(1.0, 0.0).is_err());
        assert_eq!(Interval::new(0.0, 2.0, false, true).unwrap().length(), 2.0);
    }

    #[test]
    fn cutoff_bounds() {
        assert_eq!(Cutoff::closed(10.0, Norm::Sup).coordinate_bound(), 10);
        assert_eq!(Cutoff::strict(10.0, Norm::Sup).coordinate_bound(), 9);
        assert_eq!(Cutoff::strict(10.5, Norm::Sup).coordinate_bound(), 10);
        assert!(Cutoff::closed(5.0, Norm::Euclidean).admits(&[3, 4]));
        assert!(!Cutoff::strict(5.0, Norm::Euclidean).admits(&[3, 4]));
    }

    #[test]
    fn odometer_order() {
        let mut seen = Vec::new();
        odometer(&[(0, 0), (-1, 1), (0, 1)], 0, |x| seen.push(x.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, -1, 0]);
        assert_eq!(seen[1], vec![0, -1, 1]);
        assert_eq!(seen[5], vec![0, 1, 1]);
        let mut one = 0;
        odometer(&[(3, 3)], 3, |_| one += 1);
        assert_eq!(one, 1);
    }
}
