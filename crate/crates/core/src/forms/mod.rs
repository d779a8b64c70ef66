//! Quadratic forms `Q(y) = yᵀAy`, their shifts `Q_ξ(y) = Q(y+ξ)`, and the
//! binary-form machinery relating every indefinite binary form to
//! `Q₀(y₁,y₂) = y₁y₂`.

mod binary;
mod kappa;

pub use binary::{decompose_binary, stabilizer_element, AffineMapElement, BinaryDecomposition};
pub use kappa::{kappa_table, SignatureExponents};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise symmetry tolerance on the coefficient matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest |eigenvalue| count as zero.
pub const EIGEN_REL_TOL: f64 = 1e-10;
/// `|det| > DET_TOL` is the nondegeneracy test.
pub const DET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub nullity: usize,
}

impl Signature {
    pub fn is_indefinite(&self) -> bool {
        self.positive > 0 && self.negative > 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawForm {
    dim: usize,
    coeffs: Vec<f64>,
}

/// A real quadratic form in `dim` variables, `Q(y) = yᵀAy` with `A` symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawForm", into = "RawForm")]
pub struct QuadraticForm {
    dim: usize,
    coeffs: Vec<f64>,
    signature: Signature,
    det: f64,
}

impl TryFrom<RawForm> for QuadraticForm {
    type Error = Error;
    fn try_from(raw: RawForm) -> Result<Self> {
        QuadraticForm::new(raw.dim, raw.coeffs)
    }
}

impl From<QuadraticForm> for RawForm {
    fn from(f: QuadraticForm) -> Self {
        RawForm {
            dim: f.dim,
            coeffs: f.coeffs,
        }
    }
}

impl QuadraticForm {
    /// Builds a form from a row-major `dim × dim` coefficient matrix.
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension", "form dimension must be positive"));
        }
        if coeffs.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("finite-coefficients", "coefficients must be finite"));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (coeffs[i * dim + j] - coeffs[j * dim + i]).abs() > SYMMETRY_TOL {
                    return Err(Error::invalid(
                        "symmetric",
                        format!("coefficient matrix is not symmetric at ({i},{j})"),
                    ));
                }
            }
        }
        let m = DMatrix::from_row_slice(dim, dim, &coeffs);
        let det = m.determinant();
        let signature = signature_from_matrix(m);
        Ok(QuadraticForm {
            dim,
            coeffs,
            signature,
            det,
        })
    }

    /// Diagonal form `Σ dᵢ yᵢ²`.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut coeffs = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            coeffs[i * n + i] = *d;
        }
        Self::new(n, coeffs)
    }

    /// Binary form `a·x² + 2b·xy + c·y²`.
    pub fn binary(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(2, vec![a, b, b, c])
    }

    /// `Q₀(y₁, y₂) = y₁y₂`.
    pub fn q0() -> Self {
        Self::binary(0.0, 0.5, 0.0).expect("Q0 is a valid form")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i * self.dim + j]
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.det.abs() > DET_TOL
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.dim, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `yᵀAy` at a real point. The caller guarantees `y.len() == dim`.
    pub fn eval_unchecked(&self, y: &[f64]) -> f64 {
        let n = self.dim;
        let mut total = 0.0;
        for i in 0..n {
            let row = &self.coeffs[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * y[j];
            }
            total += y[i] * acc;
        }
        total
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(self.eval_unchecked(y))
    }
}

fn signature_from_matrix(m: DMatrix<f64>) -> Signature {
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        nullity: 0,
    };
    if scale == 0.0 {
        sig.nullity = n;
        return sig;
    }
    for e in eig.eigenvalues.iter() {
        if e.abs() <= EIGEN_REL_TOL * scale {
            sig.nullity += 1;
        } else if *e > 0.0 {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
    }
    sig
}

/// Counts of positive, negative and near-zero eigenvalues of the form.
pub fn signature_of(q: &QuadraticForm) -> (usize, usize, usize) {
    let s = q.signature();
    (s.positive, s.negative, s.nullity)
}

/// `Q_ξ(y) = Q(y + ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InhomogeneousForm {
    form: QuadraticForm,
    shift: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawInhomogeneous {
    dim: usize,
    coeffs: Vec<f64>,
    #[serde(default)]
    shift: Option<Vec<f64>>,
}

impl Serialize for InhomogeneousForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawInhomogeneous {
            dim: self.form.dim,
            coeffs: self.form.coeffs.clone(),
            shift: Some(self.shift.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for InhomogeneousForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawInhomogeneous::deserialize(d)?;
        let form = QuadraticForm::new(raw.dim, raw.coeffs).map_err(serde::de::Error::custom)?;
        let shift = raw.shift.unwrap_or_else(|| vec![0.0; form.dim]);
        InhomogeneousForm::new(form, shift).map_err(serde::de::Error::custom)
    }
}

impl InhomogeneousForm {
    pub fn new(form: QuadraticForm, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != form.dim() {
            return Err(Error::DimensionMismatch {
                expected: form.dim(),
                got: shift.len(),
            });
        }
        if shift.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("finite-shift", "shift must be finite"));
        }
        Ok(InhomogeneousForm { form, shift })
    }

    pub fn homogeneous(form: QuadraticForm) -> Self {
        let n = form.dim();
        InhomogeneousForm {
            form,
            shift: vec![0.0; n],
        }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// `Q(y + ξ)` at a real point.
    pub fn eval_real(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.len(),
            });
        }
        let shifted: Vec<f64> = y.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
        Ok(self.form.eval_unchecked(&shifted))
    }

    /// Integer-point evaluation into a caller-provided scratch buffer; used
    /// by the enumeration kernels on their hot path.
    pub(crate) fn eval_int_into(&self, y: &[i64], scratch: &mut [f64]) -> f64 {
        for ((s, yi), xi) in scratch.iter_mut().zip(y).zip(&self.shift) {
            *s = *yi as f64 + xi;
        }
        self.form.eval_unchecked(scratch)
    }
}

/// `Q_ξ(y) = (y+ξ)ᵀA(y+ξ)` at an integer point.
pub fn evaluate_inhomogeneous(f: &InhomogeneousForm, y: &[i64]) -> Result<f64> {
    if y.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: y.len(),
        });
    }
    let mut scratch = vec![0.0; f.dim()];
    Ok(f.eval_int_into(y, &mut scratch))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ternary_sqrt2() -> QuadraticForm {
        QuadraticForm::diagonal(&[1.0, 1.0, -2f64.sqrt()]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let q0 = InhomogeneousForm::homogeneous(QuadraticForm::q0());
        assert_eq!(evaluate_inhomogeneous(&q0, &[2, 3]).unwrap(), 6.0);

        let half = InhomogeneousForm::new(QuadraticForm::q0(), vec![0.5, 0.5]).unwrap();
        assert_eq!(evaluate_inhomogeneous(&half, &[1, 1]).unwrap(), 2.25);

        let t = InhomogeneousForm::new(ternary_sqrt2(), vec![0.0, 0.0, 0.5]).unwrap();
        let v = evaluate_inhomogeneous(&t, &[1, 1, 0]).unwrap();
        assert!((v - (2.0 - 2f64.sqrt() / 4.0)).abs() < 1e-15);
        assert!((v - 1.646447).abs() < 1e-6);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let q0 = InhomogeneousForm::homogeneous(QuadraticForm::q0());
        assert!(matches!(
            evaluate_inhomogeneous(&q0, &[1, 2, 3]),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature_of(&ternary_sqrt2()), (2, 1, 0));
        assert_eq!(signature_of(&QuadraticForm::q0()), (1, 1, 0));
        assert_eq!(
            signature_of(&QuadraticForm::diagonal(&[1.0, 0.0, -1.0]).unwrap()),
            (1, 1, 1)
        );
    }

    #[test]
    fn asymmetric_rejected() {
        let err = QuadraticForm::new(2, vec![1.0, 0.2, 0.1, 1.0]).unwrap_err();
        assert_eq!(err.rule(), "symmetric");
    }

    #[test]
    fn degenerate_detection() {
        assert!(QuadraticForm::q0().is_nondegenerate());
        assert!(!QuadraticForm::diagonal(&[1.0, 0.0]).unwrap().is_nondegenerate());
    }

    #[test]
    fn json_shape() {
        let f = InhomogeneousForm::new(QuadraticForm::q0(), vec![0.5, 0.25]).unwrap();
        let js = serde_json::to_value(&f).unwrap();
        assert_eq!(js["dim"], 2);
        assert_eq!(js["coeffs"], serde_json::json!([0.0, 0.5, 0.5, 0.0]));
        assert_eq!(js["shift"], serde_json::json!([0.5, 0.25]));
        let back: InhomogeneousForm = serde_json::from_value(js).unwrap();
        assert_eq!(back, f);

        let bad = serde_json::json!({"dim": 2, "coeffs": [1.0, 0.0, 0.0], "shift": [0.0, 0.0]});
        assert!(serde_json::from_value::<InhomogeneousForm>(bad).is_err());
    }
}
