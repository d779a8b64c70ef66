use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use super::{make_affine_lattice, AffineLattice};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Vec2};

/// Singular values above this count towards the rank.
pub const TRANSVERSALITY_TOL: f64 = 1e-9;

/// An element `(X, u)` of `𝔰𝔩₂(ℝ) ⋉ ℝ²`, identified with ℝ⁵ through the
/// coordinates `(X₁₁, X₁₂, X₂₁, u₁, u₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    matrix_part: Mat2,
    vector_part: Vec2,
}

impl TangentVector {
    pub fn new(matrix_part: Mat2, vector_part: Vec2) -> Result<Self> {
        if (matrix_part[0][0] + matrix_part[1][1]).abs() > 1e-12 {
            return Err(Error::invalid("traceless", "matrix part must have zero trace"));
        }
        Ok(TangentVector {
            matrix_part,
            vector_part,
        })
    }

    pub fn from_coords(c: [f64; 5]) -> Self {
        TangentVector {
            matrix_part: [[c[0], c[1]], [c[2], -c[0]]],
            vector_part: [c[3], c[4]],
        }
    }

    pub fn coords(&self) -> [f64; 5] {
        let m = &self.matrix_part;
        [m[0][0], m[0][1], m[1][0], self.vector_part[0], self.vector_part[1]]
    }

    pub fn matrix_part(&self) -> Mat2 {
        self.matrix_part
    }

    pub fn vector_part(&self) -> Vec2 {
        self.vector_part
    }

    pub fn norm(&self) -> f64 {
        self.coords().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Generators of `Lie(K_v)`, the Lie algebra of the stabiliser of `M_v`.
pub fn lie_kv(v: Vec2) -> [TangentVector; 3] {
    [
        TangentVector::from_coords([1.0, 0.0, 0.0, -v[0], v[1]]),
        TangentVector::from_coords([0.0, 1.0, 0.0, -v[1], 0.0]),
        TangentVector::from_coords([0.0, 0.0, 1.0, 0.0, -v[0]]),
    ]
}

pub fn lie_f() -> TangentVector {
    TangentVector::from_coords([1.0, 0.0, 0.0, 0.0, 0.0])
}

pub fn lie_h_plus() -> TangentVector {
    TangentVector::from_coords([0.0, 1.0, 0.0, 0.0, 0.0])
}

/// Generated by `E₂₁`, the lower-triangular unipotent direction.
pub fn lie_h_minus() -> TangentVector {
    TangentVector::from_coords([0.0, 0.0, 1.0, 0.0, 0.0])
}

fn rank(rows: &[TangentVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let data: Vec<f64> = rows.iter().flat_map(|r| r.coords()).collect();
    DMatrix::from_row_slice(rows.len(), 5, &data)
        .svd(false, false)
        .rank(TRANSVERSALITY_TOL)
}

/// `span(rows)` does not contain `extra`: adding it raises the rank.
fn escapes(rows: &[TangentVector], extra: TangentVector) -> bool {
    let mut all = rows.to_vec();
    all.push(extra);
    rank(&all) > rank(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalityReport {
    /// `Lie(F) ⊄ Lie(K_v)`.
    pub f_condition: bool,
    /// `Lie(H⁺) ⊄ Lie(F) ⊕ Lie(K_v)`.
    pub hplus_condition: bool,
    /// `Lie(H⁻) ⊄ Lie(F) ⊕ Lie(K_v)`.
    pub hminus_condition: bool,
}

impl TransversalityReport {
    pub fn all(&self) -> bool {
        self.f_condition && self.hplus_condition && self.hminus_condition
    }
}

/// Rank-jump tests for the `(F,H^±)`-transversality of `M_v`.
pub fn transversality_check_mv(v: Vec2) -> TransversalityReport {
    let kv = lie_kv(v);
    let mut kf = kv.to_vec();
    kf.push(lie_f());
    TransversalityReport {
        f_condition: escapes(&kv, lie_f()),
        hplus_condition: escapes(&kf, lie_h_plus()),
        hminus_condition: escapes(&kf, lie_h_minus()),
    }
}

/// Length of the component of `dir/‖dir‖` orthogonal to `span(tangent)`.
pub fn theta_transversality(dir: &TangentVector, tangent: &[TangentVector]) -> Result<f64> {
    let n = dir.norm();
    if !(n > 0.0) {
        return Err(Error::invalid("nonzero-direction", "direction must be nonzero"));
    }
    if rank(tangent) != tangent.len() {
        return Err(Error::invalid(
            "independent-span",
            "manifold tangent vectors must be linearly independent",
        ));
    }
    let mut w: Vec<f64> = dir.coords().iter().map(|x| x / n).collect();
    // Modified Gram–Schmidt on the spanning set, then project out.
    let mut basis: Vec<[f64; 5]> = Vec::new();
    for t in tangent {
        let mut u = t.coords();
        for b in &basis {
            let ip: f64 = u.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in u.iter_mut().zip(b) {
                *x -= ip * y;
            }
        }
        let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in u.iter_mut() {
            *x /= un;
        }
        basis.push(u);
    }
    for b in &basis {
        let ip: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
        for (x, y) in w.iter_mut().zip(b) {
            *x -= ip * y;
        }
    }
    Ok(w.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// The chart `Φ_Λ(x) = exp(x)Λ`, with `exp` computed in the 3×3 affine
/// representation `[[X, u], [0, 0]]`.
pub fn chart_phi(l: &AffineLattice, x: &TangentVector) -> Result<AffineLattice> {
    let m = x.matrix_part;
    let u = x.vector_part;
    let gen = Matrix3::new(m[0][0], m[0][1], u[0], m[1][0], m[1][1], u[1], 0.0, 0.0, 0.0);
    let e = gen.exp();
    let g = [[e[(0, 0)], e[(0, 1)]], [e[(1, 0)], e[(1, 1)]]];
    let t = [e[(0, 2)], e[(1, 2)]];
    let lin = linalg::mul(&g, &l.linear());
    let shift = linalg::add(&linalg::apply(&g, &l.shift()), &t);
    make_affine_lattice(lin, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transversality_examples() {
        assert!(transversality_check_mv([1.0, 1.0]).all());
        assert_eq!(transversality_check_mv([2.0, 2.0]), transversality_check_mv([1.0, 1.0]));
        let degenerate = transversality_check_mv([1.0, 0.0]);
        assert!(!degenerate.hplus_condition);
        assert!(degenerate.f_condition);
        assert!(degenerate.hminus_condition);
        assert!(!transversality_check_mv([0.0, 0.0]).f_condition);
    }

    #[test]
    fn theta_examples() {
        let e1 = TangentVector::from_coords([1.0, 0.0, 0.0, 0.0, 0.0]);
        let e2 = TangentVector::from_coords([0.0, 1.0, 0.0, 0.0, 0.0]);
        let diag = TangentVector::from_coords([1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(theta_transversality(&e1, &[e1]).unwrap().abs() < 1e-15);
        assert!((theta_transversality(&e2, &[e1]).unwrap() - 1.0).abs() < 1e-15);
        assert!((theta_transversality(&diag, &[e1]).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let zero = TangentVector::from_coords([0.0; 5]);
        assert!(theta_transversality(&zero, &[e1]).is_err());
        assert!(theta_transversality(&e2, &[e1, e1]).is_err());
    }

    #[test]
    fn traceless_enforced() {
        assert!(TangentVector::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0]).is_err());
        assert!(TangentVector::new([[1.0, 2.0], [3.0, -1.0]], [0.5, 0.0]).is_ok());
    }

    #[test]
    fn chart_of_flow_generator_is_flow() {
        let l = make_affine_lattice([[1.0, 0.3], [0.2, 1.06]], [0.1, 0.4]).unwrap();
        let x = TangentVector::from_coords([0.7, 0.0, 0.0, 0.0, 0.0]);
        let a = chart_phi(&l, &x).unwrap();
        let b = super::super::flow_apply(&l, 0.7);
        assert!(linalg::max_abs_diff(&a.linear(), &b.linear()) < 1e-9);
        assert!(super::super::dist_to_mv(&a, b.shift()) < 1e-9);
    }
}
