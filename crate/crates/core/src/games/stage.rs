//! Stage and window bookkeeping for the percentage-game strategy driven by
//! the diagonal flow `b_τ`.
//!
//! With `β < e^{−2τ}` and `n` minimal such that `β^{−n} < e^{2τ(2ⁿ−1)}`:
//!
//! * turn `i` lies in stage `j` when `β^{n(j+1)}r₀ < r_i ≤ β^{nj}r₀`;
//! * window `N_j = {k ≥ 0 : β^{−n(j−1)} ≤ e^{2kτ} < β^{−jn}}`, so `#N_j < 2ⁿ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::geometry::{dot, Ball, HyperplaneNbhd};
use super::{violation, Rule};
use crate::error::{Error, Result};

/// Validates `0 < β < e^{−2τ}`.
pub fn check_stage_parameters(tau: f64, beta: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(violation(Rule::ParameterRange, format!("τ = {tau} must be a positive real")));
    }
    let bound = (-2.0 * tau).exp();
    if !(beta > 0.0 && beta < bound) {
        return Err(violation(
            Rule::ParameterRange,
            format!("stage strategy requires β < e^{{−2τ}} = {bound}; got β = {beta}, τ = {tau}"),
        ));
    }
    Ok(())
}

/// `−n·ln β < 2τ(2ⁿ − 1)`, the log form of `β^{−n} < e^{2τ(2ⁿ−1)}`.
fn n_admissible(tau: f64, beta: f64, n: u32) -> bool {
    -(n as f64) * beta.ln() < 2.0 * tau * (2f64.powi(n as i32) - 1.0)
}

/// Least `n ≥ 1` with `β^{−n} < e^{2τ(2ⁿ−1)}`.
pub fn minimal_n(tau: f64, beta: f64) -> Result<u32> {
    check_stage_parameters(tau, beta)?;
    (1..=60)
        .find(|&n| n_admissible(tau, beta, n))
        .ok_or_else(|| violation(Rule::ParameterRange, "no n ≤ 60 satisfies β^{−n} < e^{2τ(2ⁿ−1)}"))
}

fn check_n(tau: f64, beta: f64, n: u32) -> Result<()> {
    check_stage_parameters(tau, beta)?;
    if n == 0 || !n_admissible(tau, beta, n) {
        return Err(violation(
            Rule::ParameterRange,
            format!("n = {n} violates β^{{−n}} < e^{{2τ(2ⁿ−1)}}"),
        ));
    }
    Ok(())
}

/// The window index `j` with `k ∈ N_j`.
pub fn window_of(tau: f64, beta: f64, n: u32, k: u64) -> u64 {
    let l = -(n as f64) * beta.ln();
    let x = 2.0 * k as f64 * tau;
    let inside = |j: u64| (j as f64 - 1.0) * l <= x && x < j as f64 * l;
    let mut j = (x / l).floor() as u64 + 1;
    // Correct a rounding slip at a window boundary.
    if !inside(j) && j > 1 && inside(j - 1) {
        j -= 1;
    } else if !inside(j) && inside(j + 1) {
        j += 1;
    }
    j
}

/// `j ↦ N_j` for all `k ≤ k_max`. Empty windows are omitted.
pub fn window_partition(tau: f64, beta: f64, n: u32, k_max: u64) -> Result<BTreeMap<u64, Vec<u64>>> {
    check_n(tau, beta, n)?;
    let mut out: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for k in 0..=k_max {
        out.entry(window_of(tau, beta, n, k)).or_default().push(k);
    }
    let cap = 1u64 << n.min(63);
    if let Some((j, w)) = out.iter().find(|(_, w)| w.len() as u64 >= cap) {
        return Err(Error::Oracle(format!("window N_{j} has {} ≥ 2ⁿ elements", w.len())));
    }
    Ok(out)
}

/// All `k ≥ 0` in `N_j`.
pub fn window(tau: f64, beta: f64, n: u32, j: u64) -> Vec<u64> {
    if j == 0 {
        return Vec::new();
    }
    let l = -(n as f64) * beta.ln();
    let lo = (((j - 1) as f64 * l) / (2.0 * tau)).floor().max(0.0) as u64;
    let lo = lo.saturating_sub(1);
    let hi = ((j as f64 * l) / (2.0 * tau)).ceil() as u64 + 1;
    (lo..=hi).filter(|&k| window_of(tau, beta, n, k) == j).collect()
}

/// Stage `j` with `β^{n(j+1)}r₀ < r ≤ β^{nj}r₀`.
pub fn stage_index(beta: f64, n: u32, r0: f64, r: f64) -> Result<u64> {
    if !(r > 0.0 && r <= r0 * (1.0 + 1e-12)) {
        return Err(violation(Rule::ParameterRange, format!("radius {r} outside (0, r₀ = {r0}]")));
    }
    let nf = n as f64;
    let upper = |j: u64| beta.powf(nf * j as f64) * r0;
    let ratio = (r / r0).ln() / (nf * beta.ln());
    let mut j = ratio.max(0.0).floor() as u64;
    while j > 0 && r > upper(j) {
        j -= 1;
    }
    while r <= upper(j + 1) {
        j += 1;
    }
    Ok(j)
}

/// Alice's stage bookkeeping, carried on her moves and kept by the referee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageAnnotation {
    pub tau: f64,
    pub n: u32,
    pub j: u64,
    /// Stage-opening turn `i_j` and its radius `r_{i_j}`.
    pub i_j: u64,
    pub r_ij: f64,
    pub window: Vec<u64>,
    /// One slab per `k ∈ N_j`, halfwidth `β^{n+1}r_{i_j}`.
    pub slabs: Vec<HyperplaneNbhd>,
}

/// Supplies the hyperplane `L(B, k)` for a stage ball and window index.
/// The caller sets the halfwidth.
pub trait HyperplaneOracle: Send + Sync {
    /// Returns `(unit normal, offset)`.
    fn hyperplane(&self, ball: &Ball, k: u64) -> Result<(Vec<f64>, f64)>;
}

/// Test double families for [`HyperplaneOracle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SyntheticOracle {
    /// The same hyperplane for every `k`.
    Constant { normal: Vec<f64>, offset: f64 },
    /// Parallel hyperplanes at well-separated positions across the ball.
    Spread { normal: Vec<f64> },
    /// Hyperplanes through the ball center, normals rotating with `k`.
    ThroughCenter,
    /// Explicit `(normal, offset)` per `k`; missing `k` is an oracle failure.
    Table { entries: BTreeMap<u64, (Vec<f64>, f64)> },
}

fn unit(v: &[f64]) -> Result<Vec<f64>> {
    let n = dot(v, v).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Oracle("oracle normal must be nonzero".into()));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

impl HyperplaneOracle for SyntheticOracle {
    fn hyperplane(&self, ball: &Ball, k: u64) -> Result<(Vec<f64>, f64)> {
        let d = ball.dim();
        let check = |normal: &[f64]| {
            if normal.len() != d {
                Err(Error::Oracle(format!("oracle normal has dimension {}, ball has {d}", normal.len())))
            } else {
                Ok(())
            }
        };
        match self {
            SyntheticOracle::Constant { normal, offset } => {
                check(normal)?;
                let n = unit(normal)?;
                let s = dot(normal, normal).sqrt();
                Ok((n, offset / s))
            }
            SyntheticOracle::Spread { normal } => {
                check(normal)?;
                let n = unit(normal)?;
                // Golden-ratio positions in (−0.9r, 0.9r).
                let phi = 0.618_033_988_749_895;
                let frac = ((k + 1) as f64 * phi).fract();
                let offset = dot(&n, &ball.center) + 0.9 * ball.radius * (2.0 * frac - 1.0);
                Ok((n, offset))
            }
            SyntheticOracle::ThroughCenter => {
                let mut n = vec![0.0; d];
                if d == 1 {
                    n[0] = 1.0;
                } else {
                    let a = k as f64 * std::f64::consts::PI / 7.0;
                    n[0] = a.cos();
                    n[1] = a.sin();
                }
                let offset = dot(&n, &ball.center);
                Ok((n, offset))
            }
            SyntheticOracle::Table { entries } => {
                let (normal, offset) = entries
                    .get(&k)
                    .ok_or_else(|| Error::Oracle(format!("no table entry for k = {k}")))?;
                check(normal)?;
                let s = dot(normal, normal).sqrt();
                Ok((unit(normal)?, offset / s))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_n_example() {
        assert_eq!(minimal_n(1.0, 0.05).unwrap(), 2);
        let e = minimal_n(1.0, 0.2).unwrap_err();
        assert!(e.to_string().contains("β < e^{−2τ}"));
    }

    #[test]
    fn windows_example() {
        let w = window_partition(1.0, 0.05, 2, 5).unwrap();
        assert_eq!(w.get(&0), None);
        assert_eq!(w[&1], vec![0, 1, 2]);
        assert_eq!(w[&2], vec![3, 4, 5]);
        assert_eq!(window(1.0, 0.05, 2, 0), Vec::<u64>::new());
        assert_eq!(window(1.0, 0.05, 2, 1), vec![0, 1, 2]);
        assert_eq!(window(1.0, 0.05, 2, 2), vec![3, 4, 5]);
        assert!(window_partition(1.0, 0.05, 1, 5).is_err());
    }

    #[test]
    fn stage_boundaries() {
        let (b, n) = (0.05, 2);
        assert_eq!(stage_index(b, n, 1.0, 1.0).unwrap(), 0);
        assert_eq!(stage_index(b, n, 1.0, b * b).unwrap(), 1);
        assert_eq!(stage_index(b, n, 1.0, b * b * 1.0001).unwrap(), 0);
        assert_eq!(stage_index(b, n, 1.0, b * b * 0.9999).unwrap(), 1);
        assert_eq!(stage_index(b, n, 1.0, b.powi(4) * 0.5).unwrap(), 2);
        assert!(stage_index(b, n, 1.0, 2.0).is_err());
    }

    #[test]
    fn oracles_return_unit_normals() {
        let ball = Ball::new(vec![0.3, -0.2], 0.5).unwrap();
        let fams = [
            SyntheticOracle::Constant {
                normal: vec![0.0, 2.0],
                offset: 1.0,
            },
            SyntheticOracle::Spread { normal: vec![1.0, 1.0] },
            SyntheticOracle::ThroughCenter,
        ];
        for f in fams {
            for k in 0..5 {
                let (n, _) = f.hyperplane(&ball, k).unwrap();
                assert!((dot(&n, &n) - 1.0).abs() < 1e-12);
            }
        }
        let t = SyntheticOracle::Table { entries: BTreeMap::new() };
        assert!(t.hyperplane(&ball, 0).is_err());
    }
}
