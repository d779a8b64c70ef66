use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::ENUMERATION_BUDGET;

/// Parameters of `|(m₁+θ₁)^α − (m₂+θ₁)^α + β(m₃+θ₂)^α − β(m₄+θ₂)^α| ≤ δM^α`
/// over `mᵢ ∈ [M, 2M]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourTermParams {
    #[serde(rename = "M")]
    pub m: i64,
    pub alpha: f64,
    pub beta_coef: f64,
    #[serde(default)]
    pub theta1: f64,
    #[serde(default)]
    pub theta2: f64,
    pub delta: f64,
}

impl FourTermParams {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::invalid("M", "M must be a positive integer"));
        }
        if !self.alpha.is_finite() || self.alpha == 0.0 || self.alpha == 1.0 {
            return Err(Error::invalid("alpha", format!("alpha ∉ {{0,1}} required, got α = {}", self.alpha)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta", format!("require 0 < δ < 1, got δ = {}", self.delta)));
        }
        if !self.beta_coef.is_finite() || !self.theta1.is_finite() || !self.theta2.is_finite() {
            return Err(Error::invalid("four-term", "β, θ₁, θ₂ must be finite"));
        }
        let m = self.m as f64;
        if m + self.theta1 <= 0.0 || m + self.theta2 <= 0.0 {
            return Err(Error::invalid("four-term", "require M + θ > 0 so the powers are real"));
        }
        Ok(())
    }

    /// Left-hand side before the absolute value, grouped as
    /// `(f₁ − f₂) + β(f₃ − f₄)`.
    pub fn lhs(&self, m: [i64; 4]) -> f64 {
        let p1 = |x: i64| (x as f64 + self.theta1).powf(self.alpha);
        let p2 = |x: i64| (x as f64 + self.theta2).powf(self.alpha);
        (p1(m[0]) - p1(m[1])) + self.beta_coef * (p2(m[2]) - p2(m[3]))
    }

    pub fn bound(&self) -> f64 {
        self.delta * (self.m as f64).powf(self.alpha)
    }
}

/// `𝒩(M, α, δ)`: exact number of solutions in `[M, 2M]⁴`.
pub fn four_term_count(p: &FourTermParams) -> Result<u64> {
    p.validate()?;
    let side = (p.m + 1) as f64;
    check_budget(side.powi(4), ENUMERATION_BUDGET)?;
    let ms: Vec<i64> = (p.m..=2 * p.m).collect();
    let f1: Vec<f64> = ms.iter().map(|&x| (x as f64 + p.theta1).powf(p.alpha)).collect();
    let f2: Vec<f64> = ms.iter().map(|&x| (x as f64 + p.theta2).powf(p.alpha)).collect();
    let mut b: Vec<f64> = Vec::with_capacity(ms.len() * ms.len());
    for x in &f2 {
        for y in &f2 {
            b.push(p.beta_coef * (x - y));
        }
    }
    b.sort_by(f64::total_cmp);
    let bound = p.bound();
    // fl(a + b) is monotone in b, so the admissible b form a contiguous run.
    let count = f1
        .par_iter()
        .map(|x| {
            let mut c = 0u64;
            for y in &f1 {
                let a = x - y;
                let lo = b.partition_point(|&v| a + v < -bound);
                let hi = b.partition_point(|&v| a + v <= bound);
                c += (hi.max(lo) - lo) as u64;
            }
            c
        })
        .sum();
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: i64, alpha: f64, beta: f64, delta: f64) -> FourTermParams {
        FourTermParams {
            m,
            alpha,
            beta_coef: beta,
            theta1: 0.0,
            theta2: 0.0,
            delta,
        }
    }

    #[test]
    fn unit_box() {
        assert_eq!(four_term_count(&params(1, 2.0, 1.0, 0.1)).unwrap(), 6);
    }

    #[test]
    fn full_box_when_bound_is_loose() {
        // max |sum| is (1/9 − 1/36)(1 + β) for M=3, α=−2.
        let p = params(3, -2.0, 0.01, 0.9);
        let max = (1.0 / 9.0 - 1.0 / 36.0) * 1.01;
        assert!(max < p.bound());
        assert_eq!(four_term_count(&p).unwrap(), 4u64.pow(4));
    }

    #[test]
    fn alpha_restrictions() {
        for a in [0.0, 1.0] {
            let e = four_term_count(&params(2, a, 1.0, 0.1)).unwrap_err();
            assert_eq!(e.rule(), "alpha");
        }
        assert!(four_term_count(&params(2, 2.0, 1.0, 1.0)).is_err());
        assert!(four_term_count(&params(0, 2.0, 1.0, 0.5)).is_err());
        assert!(four_term_count(&params(200, 2.0, 1.0, 0.5)).unwrap_err().is_budget());
    }
}
