use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{box_size, odometer};
use crate::error::{check_budget, Error, Result};
use crate::forms::QuadraticForm;
use crate::ENUMERATION_BUDGET;

/// The function whose absolute value is minimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MinTarget {
    Form { form: QuadraticForm },
    /// `x₁ᵏ − α₂x₂ᵏ − … − α_d x_dᵏ`, with `alphas = [α₂, …, α_d]`.
    Diagonal { k: u32, alphas: Vec<f64> },
}

impl MinTarget {
    pub fn dim(&self) -> usize {
        match self {
            MinTarget::Form { form } => form.dim(),
            MinTarget::Diagonal { alphas, .. } => alphas.len() + 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if let MinTarget::Diagonal { k, alphas } = self {
            if *k == 0 {
                return Err(Error::invalid("degree", "k must be at least 1"));
            }
            if alphas.iter().any(|a| !a.is_finite()) {
                return Err(Error::invalid("coefficient", "coefficients must be finite"));
            }
        }
        Ok(())
    }

    /// Value at `x + θ`.
    pub fn eval_shifted(&self, x: &[i64], theta: &[f64]) -> f64 {
        match self {
            MinTarget::Form { form } => {
                let y: Vec<f64> = x.iter().zip(theta).map(|(&a, b)| a as f64 + b).collect();
                form.eval_unchecked(&y)
            }
            MinTarget::Diagonal { k, alphas } => {
                let k = *k as i32;
                let mut v = (x[0] as f64 + theta[0]).powi(k);
                for (i, a) in alphas.iter().enumerate() {
                    v -= a * (x[i + 1] as f64 + theta[i + 1]).powi(k);
                }
                v
            }
        }
    }
}

/// Sup-norm shell `inner ≤ ‖x‖∞ < outer`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shell {
    pub inner: i64,
    pub outer: i64,
}

impl Shell {
    pub fn new(inner: i64, outer: i64) -> Result<Self> {
        if inner < 0 || outer <= inner {
            return Err(Error::invalid("shell", format!("need 0 ≤ inner < outer, got [{inner}, {outer})")));
        }
        Ok(Shell { inner, outer })
    }

    /// The dyadic shell `N ≤ ‖x‖∞ < 2N`.
    pub fn dyadic(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("shell", "N must be a positive integer"));
        }
        Shell::new(n, 2 * n)
    }

    fn contains(&self, x: &[i64]) -> bool {
        let m = x.iter().map(|v| v.abs()).max().unwrap_or(0);
        m >= self.inner && m < self.outer
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinRecord {
    pub min_abs_value: f64,
    pub argmin: Vec<i64>,
    /// Number of shell points attaining the minimum exactly.
    pub multiplicity: u64,
    pub points_scanned: u64,
}

#[derive(Clone)]
struct Best {
    value: f64,
    argmin: Vec<i64>,
    multiplicity: u64,
    scanned: u64,
}

impl Best {
    fn empty() -> Self {
        Best {
            value: f64::INFINITY,
            argmin: Vec::new(),
            multiplicity: 0,
            scanned: 0,
        }
    }

    fn offer(&mut self, value: f64, x: &[i64]) {
        match value.total_cmp(&self.value) {
            Ordering::Less => {
                self.value = value;
                self.argmin = x.to_vec();
                self.multiplicity = 1;
            }
            Ordering::Equal => {
                self.multiplicity += 1;
                if x > self.argmin.as_slice() {
                    self.argmin = x.to_vec();
                }
            }
            Ordering::Greater => {}
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.scanned += other.scanned;
        match other.value.total_cmp(&self.value) {
            Ordering::Less => {
                self.value = other.value;
                self.argmin = other.argmin;
                self.multiplicity = other.multiplicity;
            }
            Ordering::Equal => {
                self.multiplicity += other.multiplicity;
                if other.argmin > self.argmin {
                    self.argmin = other.argmin;
                }
            }
            Ordering::Greater => {}
        }
        self
    }
}

/// Exact `min |Q(x+θ)|` over integer `x` in the shell. With
/// `require_nonzero = Some(i)` only points with `xᵢ ≠ 0` are admitted.
/// Ties go to the lexicographically greatest minimizer.
pub fn min_abs_in_shell(
    target: &MinTarget,
    theta: &[f64],
    shell: Shell,
    require_nonzero: Option<usize>,
) -> Result<MinRecord> {
    target.validate()?;
    let d = target.dim();
    if theta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: theta.len(),
        });
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("shift", "shift must be finite"));
    }
    if let Some(i) = require_nonzero {
        if i >= d {
            return Err(Error::invalid("coordinate", format!("coordinate {i} out of range")));
        }
    }
    let b = shell.outer - 1;
    let ranges = vec![(-b, b); d];
    check_budget(box_size(&ranges), ENUMERATION_BUDGET)?;
    let best = (-b..=b)
        .into_par_iter()
        .map(|first| {
            let mut best = Best::empty();
            odometer(&ranges, first, |x| {
                if !shell.contains(x) || require_nonzero.is_some_and(|i| x[i] == 0) {
                    return;
                }
                best.scanned += 1;
                best.offer(target.eval_shifted(x, theta).abs(), x);
            })
            ;
            best
        })
        .reduce(Best::empty, Best::merge);
    if best.multiplicity == 0 {
        return Err(Error::invalid("shell", "shell contains no admissible points"));
    }
    Ok(MinRecord {
        min_abs_value: best.value,
        argmin: best.argmin,
        multiplicity: best.multiplicity,
        points_scanned: best.scanned,
    })
}

/// `δ(N)` on the dyadic shell `N ≤ ‖x‖∞ < 2N`.
pub fn min_search_delta(target: &MinTarget, theta: &[f64], n: i64) -> Result<MinRecord> {
    min_abs_in_shell(target, theta, Shell::dyadic(n)?, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pell_shell() {
        let t = MinTarget::Diagonal { k: 2, alphas: vec![2.0] };
        let r = min_search_delta(&t, &[0.0, 0.0], 16).unwrap();
        assert_eq!(r.min_abs_value, 1.0);
        assert_eq!(r.argmin, vec![17, 12]);
    }

    #[test]
    fn pythagorean_shell() {
        let q = QuadraticForm::diagonal(&[1.0, -1.0, -1.0]).unwrap();
        let t = MinTarget::Form { form: q };
        let r = min_search_delta(&t, &[0.0; 3], 4).unwrap();
        assert_eq!(r.min_abs_value, 0.0);
        assert_eq!(t.eval_shifted(&r.argmin, &[0.0; 3]), 0.0);
        assert_eq!(t.eval_shifted(&[5, 4, 3], &[0.0; 3]), 0.0);
    }

    #[test]
    fn form_matches_diagonal() {
        let q = MinTarget::Form {
            form: QuadraticForm::diagonal(&[1.0, -1.0, -0.7]).unwrap(),
        };
        let d = MinTarget::Diagonal { k: 2, alphas: vec![1.0, 0.7] };
        let th = [0.5, 0.0, 0.0];
        let a = min_search_delta(&q, &th, 4).unwrap();
        let b = min_search_delta(&d, &th, 4).unwrap();
        assert!((a.min_abs_value - b.min_abs_value).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shells() {
        assert!(Shell::new(3, 3).is_err());
        assert!(Shell::dyadic(0).is_err());
        let t = MinTarget::Diagonal { k: 2, alphas: vec![2.0] };
        assert!(min_search_delta(&t, &[0.0], 4).is_err());
        let big = MinTarget::Diagonal { k: 2, alphas: vec![1.0, 1.0, 1.0] };
        assert!(min_search_delta(&big, &[0.0; 4], 200).unwrap_err().is_budget());
    }

    #[test]
    fn nonzero_coordinate_filter() {
        let t = MinTarget::Diagonal { k: 2, alphas: vec![2.0] };
        let all = min_abs_in_shell(&t, &[0.0, 0.0], Shell::new(1, 5).unwrap(), None).unwrap();
        let y = min_abs_in_shell(&t, &[0.0, 0.0], Shell::new(1, 5).unwrap(), Some(1)).unwrap();
        assert_eq!(all.min_abs_value, 1.0);
        assert_ne!(y.argmin[1], 0);
        assert!(y.points_scanned < all.points_scanned);
    }
}
