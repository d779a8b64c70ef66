use serde::{Deserialize, Serialize};

use super::{InhomogeneousForm, QuadraticForm};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Vec2};

/// Tolerance on `det(linear) = 1` for elements of `SL(2,ℝ) ⋉ ℝ²`.
pub const SL2_DET_TOL: f64 = 1e-9;

/// An element `(g, v)` of `SL(2,ℝ) ⋉ ℝ²`, acting by `(g,v)·y = gy + v`.
///
/// Composition follows `(g,v)(h,w) = (gh, gw + v)`, so that
/// `((g,v)(h,w))·y = (g,v)·((h,w)·y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMapElement {
    pub linear: Mat2,
    pub translation: Vec2,
}

impl AffineMapElement {
    pub fn new(linear: Mat2, translation: Vec2) -> Result<Self> {
        let d = linalg::det(&linear);
        if !((d - 1.0).abs() <= SL2_DET_TOL) {
            return Err(Error::invalid(
                "unimodular",
                format!("det(linear) = {d} differs from 1"),
            ));
        }
        Ok(AffineMapElement {
            linear,
            translation,
        })
    }

    pub fn identity() -> Self {
        AffineMapElement {
            linear: linalg::IDENTITY,
            translation: [0.0, 0.0],
        }
    }

    /// `(b_t, 0)`.
    pub fn flow(t: f64) -> Self {
        AffineMapElement {
            linear: linalg::flow_matrix(t),
            translation: [0.0, 0.0],
        }
    }

    pub fn apply(&self, y: &Vec2) -> Vec2 {
        linalg::add(&linalg::apply(&self.linear, y), &self.translation)
    }

    pub fn compose(&self, other: &AffineMapElement) -> AffineMapElement {
        AffineMapElement {
            linear: linalg::mul(&self.linear, &other.linear),
            translation: linalg::add(&linalg::apply(&self.linear, &other.translation), &self.translation),
        }
    }

    pub fn inverse(&self) -> AffineMapElement {
        // det = 1, so the adjugate is the inverse.
        let g = &self.linear;
        let inv = [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]];
        let t = linalg::apply(&inv, &self.translation);
        AffineMapElement {
            linear: inv,
            translation: [-t[0], -t[1]],
        }
    }
}

/// `Q_ξ(y) = λ·Q₀(map·y)` with `Q₀(y₁,y₂) = y₁y₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryDecomposition {
    pub lambda: f64,
    pub map: AffineMapElement,
}

impl BinaryDecomposition {
    /// Evaluates `λ·Q₀(map·y)`.
    pub fn eval(&self, y: &Vec2) -> f64 {
        let z = self.map.apply(y);
        self.lambda * z[0] * z[1]
    }

    /// Coefficient matrix `λ·gᵀ·Q₀·g` of the homogeneous part.
    pub fn reconstruct(&self) -> Mat2 {
        let g = &self.map.linear;
        let q0 = [[0.0, 0.5], [0.5, 0.0]];
        let m = linalg::mul(&linalg::transpose(g), &linalg::mul(&q0, g));
        linalg::scale(&m, self.lambda)
    }
}

fn require_indefinite_binary(f: &InhomogeneousForm) -> Result<()> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.dim(),
        });
    }
    let sig = f.form().signature();
    if sig.nullity > 0 || !f.form().is_nondegenerate() {
        return Err(Error::invalid("nondegenerate", "binary form is degenerate"));
    }
    if !sig.is_indefinite() {
        return Err(Error::invalid(
            "indefinite",
            "binary form is definite; signature (1,1) required",
        ));
    }
    Ok(())
}

/// Writes an indefinite nondegenerate binary form as `λ·Q₀((g, gξ)·y)`.
///
/// The representative is pinned by: `λ > 0`, `det g = 1`, equal Euclidean
/// norms of the two rows of `g`, and a positive first nonzero entry in the
/// first row. The remaining freedom (`F₀` on the left, `±I`) is exhausted by
/// these conditions.
pub fn decompose_binary(f: &InhomogeneousForm) -> Result<BinaryDecomposition> {
    require_indefinite_binary(f)?;
    let q: &QuadraticForm = f.form();
    let (a, b, c) = (q.coeff(0, 0), q.coeff(0, 1), q.coeff(1, 1));

    // Eigen-decomposition of [[a,b],[b,c]]: mu_pos > 0 > mu_neg.
    let half_trace = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let mu_pos = half_trace + radius;
    let mu_neg = half_trace - radius;
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let e_pos = [theta.cos(), theta.sin()];
    let e_neg = [-theta.sin(), theta.cos()];

    // Q = mu_pos·u² − |mu_neg|·w² = (√mu_pos·u − √|mu_neg|·w)(√mu_pos·u + √|mu_neg|·w).
    let sp = mu_pos.sqrt();
    let sn = (-mu_neg).sqrt();
    let l1 = [sp * e_pos[0] - sn * e_neg[0], sp * e_pos[1] - sn * e_neg[1]];
    let l2 = [sp * e_pos[0] + sn * e_neg[0], sp * e_pos[1] + sn * e_neg[1]];

    let raw = [l1, l2];
    let d = linalg::det(&raw);
    // Row scaling (s, d/s) gives det 1 and λ = d; pick s for equal row norms.
    let n1 = linalg::norm(&l1);
    let n2 = linalg::norm(&l2);
    let s = (d.abs() * n1 / n2).sqrt();
    let mut g = [
        [l1[0] / s, l1[1] / s],
        [l2[0] * s / d, l2[1] * s / d],
    ];
    let mut lambda = d;
    if lambda < 0.0 {
        // Q₀(y₂, −y₁) = −Q₀(y₁, y₂), and [[0,1],[−1,0]] has det 1.
        g = [g[1], [-g[0][0], -g[0][1]]];
        lambda = -lambda;
    }
    let row_scale = linalg::norm(&g[0]);
    let lead = if g[0][0].abs() > 1e-12 * row_scale {
        g[0][0]
    } else {
        g[0][1]
    };
    if lead < 0.0 {
        g = linalg::scale(&g, -1.0);
    }

    let v = linalg::apply(&g, &[f.shift()[0], f.shift()[1]]);
    let map = AffineMapElement::new(g, v)?;
    Ok(BinaryDecomposition { lambda, map })
}

/// The element `S(t) = map⁻¹ (b_t, 0) map` of `SO(Q_ξ)`.
///
/// With `map = (g, gξ)` this equals `(g⁻¹b_t g, g⁻¹b_t gξ − ξ)`.
pub fn stabilizer_element(f: &InhomogeneousForm, t: f64) -> Result<AffineMapElement> {
    let dec = decompose_binary(f)?;
    Ok(dec
        .map
        .inverse()
        .compose(&AffineMapElement::flow(t))
        .compose(&dec.map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(seed: u64, n: usize) -> Vec<Vec2> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)])
            .collect()
    }

    fn assert_decomposes(f: &InhomogeneousForm, dec: &BinaryDecomposition) {
        for y in samples(7, 100) {
            let lhs = f.eval_real(&y).unwrap();
            let rhs = dec.eval(&y);
            let scale = lhs.abs().max(1.0);
            assert!((lhs - rhs).abs() <= 1e-9 * scale, "{lhs} vs {rhs} at {y:?}");
        }
    }

    #[test]
    fn difference_of_squares() {
        let f = InhomogeneousForm::homogeneous(QuadraticForm::binary(1.0, 0.0, -1.0).unwrap());
        let dec = decompose_binary(&f).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((dec.lambda - 2.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&dec.map.linear, &[[r, -r], [r, r]]) < 1e-12);
        assert_eq!(dec.map.translation, [0.0, 0.0]);
        assert_decomposes(&f, &dec);
    }

    #[test]
    fn q0_is_identity() {
        let f = InhomogeneousForm::homogeneous(QuadraticForm::q0());
        let dec = decompose_binary(&f).unwrap();
        assert!((dec.lambda - 1.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&dec.map.linear, &linalg::IDENTITY) < 1e-12);
    }

    #[test]
    fn mixed_form_decomposes() {
        // 2xy + y²
        let f = InhomogeneousForm::homogeneous(QuadraticForm::binary(0.0, 1.0, 1.0).unwrap());
        let dec = decompose_binary(&f).unwrap();
        assert_decomposes(&f, &dec);
        assert!(dec.lambda > 0.0);
        // The representative with λ = −2 and g = (1/√2)[[0,−1],[2,1]] is
        // another valid decomposition; both agree pointwise.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let other = BinaryDecomposition {
            lambda: -2.0,
            map: AffineMapElement::new([[0.0, -r], [2.0 * r, r]], [0.0, 0.0]).unwrap(),
        };
        assert_decomposes(&f, &other);
    }

    #[test]
    fn shifted_form_and_round_trip() {
        let f = InhomogeneousForm::new(QuadraticForm::binary(3.0, -1.25, -0.5).unwrap(), vec![0.3, 0.7]).unwrap();
        let dec = decompose_binary(&f).unwrap();
        assert_decomposes(&f, &dec);
        let m = dec.reconstruct();
        let want = [[3.0, -1.25], [-1.25, -0.5]];
        assert!(linalg::max_abs_diff(&m, &want) < 1e-9);
        let g = dec.map.linear;
        assert!((linalg::norm(&g[0]) - linalg::norm(&g[1])).abs() < 1e-12);
    }

    #[test]
    fn definite_and_degenerate_rejected() {
        let pos = InhomogeneousForm::homogeneous(QuadraticForm::binary(1.0, 0.0, 1.0).unwrap());
        assert_eq!(decompose_binary(&pos).unwrap_err().rule(), "indefinite");
        let deg = InhomogeneousForm::homogeneous(QuadraticForm::binary(1.0, 1.0, 1.0).unwrap());
        assert_eq!(decompose_binary(&deg).unwrap_err().rule(), "nondegenerate");
    }

    #[test]
    fn stabilizer_examples() {
        let q0 = InhomogeneousForm::homogeneous(QuadraticForm::q0());
        let s = stabilizer_element(&q0, 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!(linalg::max_abs_diff(&s.linear, &[[e, 0.0], [0.0, 1.0 / e]]) < 1e-12);
        assert!(s.translation[0].abs() < 1e-15 && s.translation[1].abs() < 1e-15);

        let f = InhomogeneousForm::new(QuadraticForm::binary(1.0, 0.0, -1.0).unwrap(), vec![0.3, 0.7]).unwrap();
        let id = stabilizer_element(&f, 0.0).unwrap();
        assert!(linalg::max_abs_diff(&id.linear, &linalg::IDENTITY) < 1e-12);
        assert!(id.translation[0].abs() < 1e-12 && id.translation[1].abs() < 1e-12);

        let s = stabilizer_element(&f, 0.5).unwrap();
        for y in samples(11, 100) {
            let before = f.eval_real(&y).unwrap();
            let after = f.eval_real(&s.apply(&y)).unwrap();
            assert!((before - after).abs() <= 1e-9 * before.abs().max(1.0));
        }
    }

    #[test]
    fn composition_law() {
        let a = AffineMapElement::new([[2.0, 1.0], [1.0, 1.0]], [0.5, -1.0]).unwrap();
        let b = AffineMapElement::new([[1.0, 3.0], [0.0, 1.0]], [2.0, 0.25]).unwrap();
        let c = AffineMapElement::new([[0.0, -1.0], [1.0, 0.0]], [-0.75, 4.0]).unwrap();
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        assert!(linalg::max_abs_diff(&left.linear, &right.linear) < 1e-12);
        let y = [0.3, -2.0];
        let direct = a.apply(&b.apply(&y));
        let composed = a.compose(&b).apply(&y);
        assert!((direct[0] - composed[0]).abs() < 1e-12 && (direct[1] - composed[1]).abs() < 1e-12);
        let id = a.compose(&a.inverse());
        assert!(linalg::max_abs_diff(&id.linear, &linalg::IDENTITY) < 1e-12);
        assert!(AffineMapElement::new([[2.0, 0.0], [0.0, 1.0]], [0.0, 0.0]).is_err());
    }
}
