//! Named forms and lattices used throughout the examples and tests.

use crate::error::{Error, Result};
use crate::forms::{decompose_binary, InhomogeneousForm, QuadraticForm};
use crate::lattices::{make_affine_lattice, AffineLattice};

/// The golden ratio `(1 + √5)/2`.
pub const PHI: f64 = 1.618_033_988_749_895;

pub const FORM_NAMES: [&str; 4] = ["q0", "pell", "golden", "ternary-sqrt2"];
pub const LATTICE_NAMES: [&str; 3] = ["z2", "golden", "golden-gap"];

/// `x² − φ²y²`; its values avoid a neighbourhood of zero.
pub fn golden_form() -> QuadraticForm {
    QuadraticForm::binary(1.0, 0.0, -PHI * PHI).expect("symmetric")
}

pub fn pell_form() -> QuadraticForm {
    QuadraticForm::binary(1.0, 0.0, -2.0).expect("symmetric")
}

/// `x² + y² − √2 z²`.
pub fn ternary_sqrt2() -> QuadraticForm {
    QuadraticForm::diagonal(&[1.0, 1.0, -std::f64::consts::SQRT_2]).expect("symmetric")
}

pub fn form(name: &str) -> Result<QuadraticForm> {
    match name {
        "q0" => Ok(QuadraticForm::q0()),
        "pell" => Ok(pell_form()),
        "golden" => Ok(golden_form()),
        "ternary-sqrt2" => Ok(ternary_sqrt2()),
        other => Err(Error::invalid(
            "preset",
            format!("unknown form preset {other:?}; known: {}", FORM_NAMES.join(", ")),
        )),
    }
}

/// `L_φ = {(m, mφ + n)}`: basis columns `(1, φ)` and `(0, 1)`.
pub fn golden_lattice() -> AffineLattice {
    make_affine_lattice([[1.0, 0.0], [PHI, 1.0]], [0.0, 0.0]).expect("unimodular")
}

/// `gℤ²` where `x² − φ²y² = λ·Q₀(g·(x, y))`; its diagonal orbit is bounded.
pub fn golden_gap_lattice() -> AffineLattice {
    let d = decompose_binary(&InhomogeneousForm::homogeneous(golden_form())).expect("indefinite");
    make_affine_lattice(d.map.linear, [0.0, 0.0]).expect("unimodular")
}

pub fn lattice(name: &str) -> Result<AffineLattice> {
    match name {
        "z2" => Ok(AffineLattice::z2()),
        "golden" => Ok(golden_lattice()),
        "golden-gap" => Ok(golden_gap_lattice()),
        other => Err(Error::invalid(
            "preset",
            format!("unknown lattice preset {other:?}; known: {}", LATTICE_NAMES.join(", ")),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::{flow_apply, systole};

    #[test]
    fn all_names_resolve() {
        for n in FORM_NAMES {
            assert!(form(n).is_ok());
        }
        for n in LATTICE_NAMES {
            assert!(lattice(n).is_ok());
        }
        assert!(form("nope").is_err());
    }

    #[test]
    fn phi_constant() {
        assert!((PHI - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_gap_orbit_stays_thick() {
        let l = golden_gap_lattice();
        let min = (0..=2000)
            .map(|k| systole(&flow_apply(&l, k as f64 * 0.01)))
            .fold(f64::INFINITY, f64::min);
        assert!(min >= 0.2, "{min}");
    }

    #[test]
    fn golden_orbit_escapes() {
        let l = golden_lattice();
        assert!(systole(&flow_apply(&l, 20.0)) < 1e-6);
    }
}
