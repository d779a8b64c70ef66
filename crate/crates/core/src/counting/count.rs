use super::{box_count, box_size, Cutoff, Interval, Norm};
use crate::error::{check_budget, Error, Result};
use crate::forms::{InhomogeneousForm, QuadraticForm};
use crate::ENUMERATION_BUDGET;

/// `N_{Q_ξ,I}(t) = #{y ∈ ℤⁿ : Q_ξ(y) ∈ I, ‖y‖ ≤ t}`.
pub fn count_in_interval(f: &InhomogeneousForm, interval: &Interval, t: f64, norm: Norm) -> Result<u64> {
    count_with_cutoff(f, interval, Cutoff::closed(t, norm))
}

/// As [`count_in_interval`] with an explicit strict or closed norm cutoff.
pub fn count_with_cutoff(f: &InhomogeneousForm, interval: &Interval, cutoff: Cutoff) -> Result<u64> {
    cutoff.validate()?;
    let b = cutoff.coordinate_bound();
    let ranges = vec![(-b, b); f.dim()];
    check_budget(box_size(&ranges), ENUMERATION_BUDGET)?;
    if interval.is_empty() || b < 0 {
        return Ok(0);
    }
    Ok(box_count(&ranges, |y, scratch| {
        cutoff.admits(y) && interval.contains(f.eval_int_into(y, scratch))
    }))
}

/// `#{w ∈ ℤⁿ : Q(w) ∈ I, w ≡ p (mod q), ‖w‖ < t}` (or `≤ t` for a closed
/// cutoff).
pub fn count_congruence(
    form: &QuadraticForm,
    interval: &Interval,
    cutoff: Cutoff,
    residue: &[i64],
    modulus: i64,
) -> Result<u64> {
    cutoff.validate()?;
    if modulus < 1 {
        return Err(Error::invalid("modulus", "q must be a positive integer"));
    }
    if residue.len() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            got: residue.len(),
        });
    }
    let b = cutoff.coordinate_bound();
    let reps: Vec<i64> = residue.iter().map(|p| p.rem_euclid(modulus)).collect();
    // w = r + q·y with |w| ≤ b coordinatewise.
    let ranges: Vec<(i64, i64)> = reps
        .iter()
        .map(|&r| ((-b - r).div_euclid(modulus) + i64::from((-b - r).rem_euclid(modulus) != 0), (b - r).div_euclid(modulus)))
        .collect();
    check_budget(box_size(&ranges), ENUMERATION_BUDGET)?;
    if interval.is_empty() || b < 0 {
        return Ok(0);
    }
    let f = InhomogeneousForm::homogeneous(form.clone());
    Ok(box_count(&ranges, |y, scratch| {
        let w: Vec<i64> = y.iter().zip(&reps).map(|(yi, r)| r + modulus * yi).collect();
        cutoff.admits(&w) && interval.contains(f.eval_int_into(&w, scratch))
    }))
}
