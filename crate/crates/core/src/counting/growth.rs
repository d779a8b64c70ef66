use serde::{Deserialize, Serialize};

use super::{count_in_interval, Interval, Norm};
use crate::error::{Error, Result};
use crate::forms::InhomogeneousForm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub t: f64,
    pub count: u64,
    /// `|I_t|` for the window used at this `t`.
    pub interval_length: f64,
    /// `c·|I_t|·t^{n−2}` with `c` fitted over the whole run.
    pub predicted: Option<f64>,
    pub residual: Option<f64>,
}

impl CountRecord {
    pub fn new(t: f64, count: u64, interval_length: f64) -> Self {
        CountRecord {
            t,
            count,
            interval_length,
            predicted: None,
            residual: None,
        }
    }
}

/// `N(t) ≈ coefficient · t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// Largest `|log N − fitted log N|` over the fitted records.
    pub max_residual: f64,
}

/// Least-squares fit of `log N` against `log t` over records with `N > 0`.
pub fn fit_growth(records: &[CountRecord]) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.count > 0 && r.t > 0.0)
        .map(|r| (r.t.ln(), (r.count as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::invalid(
            "fit",
            format!("need at least 3 records with positive counts, got {}", pts.len()),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit", "need at least two distinct t values"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).abs())
        .fold(0.0, f64::max);
    Ok(GrowthFit {
        exponent,
        coefficient: intercept.exp(),
        max_residual,
    })
}

/// Windows `I_t = (α − c t^{−κ}/2, α + c t^{−κ}/2)` around a fixed target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkingTarget {
    #[serde(default)]
    pub target: f64,
    pub c: f64,
    pub kappa: f64,
    #[serde(default)]
    pub norm: Norm,
}

impl ShrinkingTarget {
    pub fn window(&self, t: f64) -> Result<Interval> {
        Interval::centered(self.target, self.c * t.powf(-self.kappa))
    }
}

/// Exact counts `N_{Q_ξ,I_t}(t)` for each `t`, with `c_Q` fitted by least
/// squares against `|I_t|·t^{n−2}` when at least three counts are positive.
pub fn shrinking_target_run(
    f: &InhomogeneousForm,
    spec: &ShrinkingTarget,
    t_list: &[f64],
) -> Result<Vec<CountRecord>> {
    let n = f.dim() as f64;
    if !(spec.c > 0.0) || !spec.c.is_finite() {
        return Err(Error::invalid("shrink", "c must be a positive real"));
    }
    if !(spec.kappa >= 0.0 && spec.kappa <= (n - 2.0).max(0.0)) {
        return Err(Error::invalid("shrink", format!("κ must lie in [0, {}]", n - 2.0)));
    }
    if !spec.target.is_finite() {
        return Err(Error::invalid("shrink", "target must be finite"));
    }
    if t_list.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::invalid("shrink", "every t must be a positive real"));
    }
    if t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("shrink", "t_list must be strictly increasing"));
    }
    let mut records = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let window = spec.window(t)?;
        let count = count_in_interval(f, &window, t, spec.norm)?;
        records.push(CountRecord::new(t, count, window.length()));
    }
    if records.iter().filter(|r| r.count > 0).count() >= 3 {
        let shape = |r: &CountRecord| r.interval_length * r.t.powf(n - 2.0);
        let num: f64 = records.iter().map(|r| shape(r) * r.count as f64).sum();
        let den: f64 = records.iter().map(|r| shape(r).powi(2)).sum();
        if den > 0.0 {
            let c_q = num / den;
            for r in &mut records {
                let p = c_q * shape(r);
                r.predicted = Some(p);
                r.residual = Some(r.count as f64 - p);
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::QuadraticForm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<CountRecord> {
        [10.0, 20.0, 40.0, 80.0, 160.0]
            .iter()
            .map(|&t| CountRecord::new(t, f(t).round() as u64, 1.0))
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_growth(&synthetic(|t| 3.0 * t * t)).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-6);
        assert!((fit.coefficient - 3.0).abs() < 1e-6);
    }

    #[test]
    fn noisy_linear_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let recs: Vec<CountRecord> = (1..=12)
            .map(|i| {
                let t = 10.0 * i as f64;
                let noise: f64 = rng.random_range(-0.05..0.05);
                CountRecord::new(t, (5.0 * t * (1.0 + noise)).round() as u64, 1.0)
            })
            .collect();
        let fit = fit_growth(&recs).unwrap();
        assert!((0.9..=1.1).contains(&fit.exponent), "{}", fit.exponent);
    }

    #[test]
    fn too_few_positive_counts() {
        let recs = vec![
            CountRecord::new(1.0, 0, 1.0),
            CountRecord::new(2.0, 4, 1.0),
            CountRecord::new(3.0, 9, 1.0),
        ];
        assert!(fit_growth(&recs).is_err());
    }

    #[test]
    fn integer_values_miss_shrinking_window() {
        let f = InhomogeneousForm::homogeneous(QuadraticForm::diagonal(&[1.0, 1.0, -1.0]).unwrap());
        let spec = ShrinkingTarget {
            target: 0.5,
            c: 0.5,
            kappa: 1.0,
            norm: Norm::Euclidean,
        };
        let recs = shrinking_target_run(&f, &spec, &[2.0, 4.0, 8.0]).unwrap();
        assert!(recs.iter().all(|r| r.count == 0 && r.predicted.is_none()));
    }

    #[test]
    fn kappa_zero_is_fixed_window() {
        let f = InhomogeneousForm::homogeneous(QuadraticForm::q0());
        let spec = ShrinkingTarget {
            target: 0.0,
            c: 1.0,
            kappa: 0.0,
            norm: Norm::Sup,
        };
        let recs = shrinking_target_run(&f, &spec, &[3.0, 5.0]).unwrap();
        let fixed = Interval::open(-0.5, 0.5).unwrap();
        for r in recs {
            assert_eq!(r.count, count_in_interval(&f, &fixed, r.t, Norm::Sup).unwrap());
        }
    }

    #[test]
    fn rejects_bad_runs() {
        let f = InhomogeneousForm::homogeneous(QuadraticForm::diagonal(&[1.0, 1.0, -1.0]).unwrap());
        let spec = |kappa| ShrinkingTarget {
            target: 0.0,
            c: 1.0,
            kappa,
            norm: Norm::Sup,
        };
        assert!(shrinking_target_run(&f, &spec(2.0), &[1.0]).is_err());
        assert!(shrinking_target_run(&f, &spec(0.0), &[2.0, 1.0]).is_err());
    }
}
