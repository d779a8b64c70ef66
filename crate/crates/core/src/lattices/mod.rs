//! Affine unimodular lattices `gℤ² + w` in the plane and the diagonal flow.

mod correspondence;
mod lie;

pub use correspondence::{
    correspondence_scan, orbit_scan, CorrespondenceParams, CorrespondenceRecord, OrbitRow,
    WitnessFlow,
};
pub use lie::{
    chart_phi, lie_f, lie_h_minus, lie_h_plus, lie_kv, theta_transversality,
    transversality_check_mv, TangentVector, TransversalityReport, TRANSVERSALITY_TOL,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::linalg::{self, Mat2, Vec2};

/// `|det g − 1|` allowed on input before rescaling to determinant one.
pub const DET_INPUT_TOL: f64 = 1e-6;
/// Upper bound on the estimated number of points `points_near` may return.
pub const POINT_BUDGET: f64 = 1e8;
/// Fractional shift coordinates within this distance of an integer snap to it.
const SHIFT_SNAP: f64 = 1e-12;

/// Canonical representative of `gℤ² + w`.
///
/// `basis` holds the Gauss-reduced basis vectors `b₁, b₂` (the columns of the
/// linear part) with `‖b₁‖ ≤ ‖b₂‖`, `|⟨b₁,b₂⟩| ≤ ‖b₁‖²/2`, `det[b₁ b₂] > 0`
/// and a positive first nonzero coordinate of `b₁`. The shift has basis
/// coordinates in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineLattice {
    basis: [Vec2; 2],
    shift: Vec2,
}

impl AffineLattice {
    pub fn basis(&self) -> &[Vec2; 2] {
        &self.basis
    }

    pub fn shift(&self) -> Vec2 {
        self.shift
    }

    /// Linear part as a matrix with columns `b₁, b₂`.
    pub fn linear(&self) -> Mat2 {
        let [b1, b2] = self.basis;
        [[b1[0], b2[0]], [b1[1], b2[1]]]
    }

    /// Coordinates of the shift in the basis `(b₁, b₂)`.
    pub fn shift_coords(&self) -> Vec2 {
        coords(&self.basis, &self.shift)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.shift == [0.0, 0.0]
    }

    /// The projection `gℤ² + ξ ↦ gℤ²`.
    pub fn homogeneous_part(&self) -> AffineLattice {
        AffineLattice {
            basis: self.basis,
            shift: [0.0, 0.0],
        }
    }

    /// The lattice point `w + m·b₁ + n·b₂`.
    pub fn point(&self, m: i64, n: i64) -> Vec2 {
        let [b1, b2] = self.basis;
        let (m, n) = (m as f64, n as f64);
        [
            self.shift[0] + m * b1[0] + n * b2[0],
            self.shift[1] + m * b1[1] + n * b2[1],
        ]
    }

    pub fn z2() -> AffineLattice {
        make_affine_lattice(linalg::IDENTITY, [0.0, 0.0]).expect("Z^2 is unimodular")
    }
}

fn coords(basis: &[Vec2; 2], p: &Vec2) -> Vec2 {
    let [b1, b2] = basis;
    let d = b1[0] * b2[1] - b2[0] * b1[1];
    [
        (p[0] * b2[1] - b2[0] * p[1]) / d,
        (b1[0] * p[1] - p[0] * b1[1]) / d,
    ]
}

fn dot(a: &Vec2, b: &Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Lagrange–Gauss reduction of a planar basis, followed by the orientation
/// and sign normalisation described on [`AffineLattice`].
fn gauss_reduce(mut b1: Vec2, mut b2: Vec2) -> [Vec2; 2] {
    for _ in 0..10_000 {
        if dot(&b2, &b2) < dot(&b1, &b1) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let n1 = dot(&b1, &b1);
        let ip = dot(&b1, &b2);
        if ip.abs() <= 0.5 * n1 * (1.0 + 1e-12) {
            break;
        }
        let mu = (ip / n1).round();
        b2 = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
    }
    if b1[0] * b2[1] - b2[0] * b1[1] < 0.0 {
        b2 = [-b2[0], -b2[1]];
    }
    let scale = b1[0].abs().max(b1[1].abs());
    let lead = if b1[0].abs() > 1e-12 * scale { b1[0] } else { b1[1] };
    if lead < 0.0 {
        b1 = [-b1[0], -b1[1]];
        b2 = [-b2[0], -b2[1]];
    }
    [b1, b2]
}

fn reduce_shift(basis: &[Vec2; 2], w: &Vec2) -> Vec2 {
    let c = coords(basis, w);
    let frac = |x: f64| {
        let mut f = x - x.floor();
        if !(SHIFT_SNAP..1.0 - SHIFT_SNAP).contains(&f) {
            f = 0.0;
        }
        f
    };
    let (c0, c1) = (frac(c[0]), frac(c[1]));
    let [b1, b2] = basis;
    [c0 * b1[0] + c1 * b2[0], c0 * b1[1] + c1 * b2[1]]
}

fn canonical(linear: &Mat2, w: &Vec2) -> AffineLattice {
    let b1 = [linear[0][0], linear[1][0]];
    let b2 = [linear[0][1], linear[1][1]];
    let basis = gauss_reduce(b1, b2);
    let shift = reduce_shift(&basis, w);
    AffineLattice { basis, shift }
}

/// Canonical representative of `gℤ² + w`. `g` is rescaled to determinant 1.
pub fn make_affine_lattice(g: Mat2, w: Vec2) -> Result<AffineLattice> {
    let d = linalg::det(&g);
    if !(d > 0.0) {
        return Err(Error::invalid("unimodular", format!("det g = {d} must be positive")));
    }
    if !((d - 1.0).abs() < DET_INPUT_TOL) {
        return Err(Error::invalid(
            "unimodular",
            format!("|det g − 1| = {} exceeds {DET_INPUT_TOL}", (d - 1.0).abs()),
        ));
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("finite-shift", "shift must be finite"));
    }
    Ok(canonical(&linalg::scale(&g, 1.0 / d.sqrt()), &w))
}

/// Length of the shortest nonzero vector of the linear part.
pub fn systole(l: &AffineLattice) -> f64 {
    linalg::norm(&l.basis[0])
}

/// Canonical form of `(b_t g)ℤ² + b_t w`.
pub fn flow_apply(l: &AffineLattice, t: f64) -> AffineLattice {
    let bt = linalg::flow_matrix(t);
    let g = linalg::mul(&bt, &l.linear());
    let w = linalg::apply(&bt, &l.shift);
    canonical(&g, &w)
}

/// Row-wise enumeration bounds for the points within `radius` of `center`:
/// yields `(n, m_lo, m_hi)` integer ranges, each a superset of the true one.
fn row_ranges(l: &AffineLattice, center: &Vec2, radius: f64) -> Vec<(i64, i64, i64)> {
    let [b1, b2] = l.basis;
    let rel = linalg::sub(center, &l.shift);
    let c = coords(&l.basis, &rel);
    let n1 = dot(&b1, &b1);
    let mu = dot(&b1, &b2) / n1;
    // ‖b₂*‖ = det / ‖b₁‖
    let det = b1[0] * b2[1] - b2[0] * b1[1];
    let h = det / n1.sqrt();
    let len1 = n1.sqrt();
    let n_lo = (c[1] - radius / h).floor() as i64 - 1;
    let n_hi = (c[1] + radius / h).ceil() as i64 + 1;
    (n_lo..=n_hi)
        .filter_map(|n| {
            let dn = n as f64 - c[1];
            let rem = radius * radius - dn * dn * h * h;
            if rem < -1e-9 * radius * radius {
                return None;
            }
            let half = rem.max(0.0).sqrt() / len1;
            let mid = c[0] - dn * mu;
            Some((n, (mid - half).floor() as i64 - 1, (mid + half).ceil() as i64 + 1))
        })
        .collect()
}

fn estimated_points(l: &AffineLattice, radius: f64) -> f64 {
    let r = radius + linalg::norm(&l.basis[1]);
    std::f64::consts::PI * r * r + 4.0 * r / systole(l) + 1.0
}

/// All points of `l` within Euclidean distance `radius` of `center`, each
/// exactly once, ordered by basis coefficients `(n, m)`.
pub fn points_near(l: &AffineLattice, center: Vec2, radius: f64) -> Result<Vec<Vec2>> {
    Ok(coefficients_near(l, center, radius)?
        .into_iter()
        .map(|(m, n)| l.point(m, n))
        .collect())
}

/// Basis coefficients `(m, n)` of the points returned by [`points_near`].
pub fn coefficients_near(l: &AffineLattice, center: Vec2, radius: f64) -> Result<Vec<(i64, i64)>> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::invalid("radius", "radius must be finite and nonnegative"));
    }
    check_budget(estimated_points(l, radius), POINT_BUDGET)?;
    let r2 = radius * radius;
    let rows = row_ranges(l, &center, radius);
    Ok(rows
        .into_par_iter()
        .flat_map_iter(|(n, lo, hi)| {
            (lo..=hi).filter_map(move |m| {
                let p = l.point(m, n);
                let d = linalg::sub(&p, &center);
                (dot(&d, &d) <= r2).then_some((m, n))
            })
        })
        .collect())
}

/// The closest point of `l` to `target`, by exhaustive search over a ±2
/// coefficient neighbourhood of the rounded real coordinates.
pub fn closest_point(l: &AffineLattice, target: &Vec2) -> (Vec2, f64) {
    let rel = linalg::sub(target, &l.shift);
    let c = coords(&l.basis, &rel);
    let (m0, n0) = (c[0].round() as i64, c[1].round() as i64);
    let mut best = ([f64::NAN; 2], f64::INFINITY);
    for dn in -2..=2 {
        for dm in -2..=2 {
            let p = l.point(m0 + dm, n0 + dn);
            let d = linalg::norm(&linalg::sub(&p, target));
            if d < best.1 {
                best = (p, d);
            }
        }
    }
    best
}

/// Distance from `v` to the nearest point of `l`; zero iff `v ∈ l`.
pub fn dist_to_mv(l: &AffineLattice, v: Vec2) -> f64 {
    closest_point(l, &v).1
}

/// A vector with `Q₀(v) = s` and both coordinates nonzero.
pub fn choose_v(s: f64) -> Result<Vec2> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::invalid("nonzero-s", "s must be a nonzero finite real"));
    }
    Ok(if s > 0.0 {
        [s.sqrt(), s.sqrt()]
    } else {
        [-(-s).sqrt(), (-s).sqrt()]
    })
}

/// `Q₀(p) = p₁p₂`.
pub fn q0(p: &Vec2) -> f64 {
    p[0] * p[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Vec2, b: &Vec2, tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn shift_reduced_mod_z2() {
        let l = make_affine_lattice(linalg::IDENTITY, [1.5, -0.5]).unwrap();
        assert!(close(&l.shift_coords(), &[0.5, 0.5], 1e-15));
        let same = make_affine_lattice(linalg::IDENTITY, [0.5, 0.5]).unwrap();
        assert_eq!(same.shift(), [0.5, 0.5]);
        assert_eq!(same.basis(), &[[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn unimodular_integer_change_reduces_to_z2() {
        let l = make_affine_lattice([[1.0, 5.0], [0.0, 1.0]], [0.0, 0.0]).unwrap();
        assert_eq!(l.basis(), &[[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn bad_determinants() {
        assert!(make_affine_lattice([[0.0, 1.0], [1.0, 0.0]], [0.0, 0.0]).is_err());
        assert!(make_affine_lattice([[2.0, 0.0], [0.0, 1.0]], [0.0, 0.0]).is_err());
        let l = make_affine_lattice([[1.0 + 1e-7, 0.0], [0.0, 1.0]], [0.0, 0.0]).unwrap();
        assert!((linalg::det(&l.linear()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn systole_examples() {
        assert_eq!(systole(&AffineLattice::z2()), 1.0);
        for t in [0.0, 0.5, 2.0, 5.0] {
            let l = flow_apply(&AffineLattice::z2(), t);
            assert!((systole(&l) - (-t).exp()).abs() < 1e-12 * (-t).exp().max(1e-300));
        }
        let s = 3f64.sqrt();
        let c = 1.0 / (s / 2.0).sqrt();
        let hex = make_affine_lattice([[c, 0.5 * c], [0.0, s / 2.0 * c]], [0.0, 0.0]).unwrap();
        // brute force over |m|,|n| ≤ 10 gives 1.074569931823542
        assert!((systole(&hex) - 1.074569931823542).abs() < 1e-12);
        assert!((systole(&hex) - (2.0 / s).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn flow_examples() {
        let l = make_affine_lattice(linalg::IDENTITY, [0.5, 0.5]).unwrap();
        assert_eq!(flow_apply(&l, 0.0), l);
        let f = flow_apply(&l, 2f64.ln());
        assert!(close(&f.basis()[0], &[0.0, 0.5], 1e-12) || close(&f.basis()[0], &[0.0, -0.5], 1e-12));
        assert!((f.basis()[1][0].abs() - 2.0).abs() < 1e-12);
        // b_t(0.5, 0.5) = (1, 0.25); its basis coordinates are (±0.5, 0.5).
        assert!(dist_to_mv(&f, [1.0, 0.25]) < 1e-12);
        assert!(close(&f.shift_coords(), &[0.5, 0.5], 1e-12));
        // (0, 0.25) is not in the same coset: (1, 0) ∉ diag(2, 1/2)ℤ².
        assert!(dist_to_mv(&f, [0.0, 0.25]) > 0.5);
    }

    #[test]
    fn points_near_examples() {
        assert_eq!(points_near(&AffineLattice::z2(), [0.0, 0.0], 1.5).unwrap().len(), 9);
        let l = make_affine_lattice(linalg::IDENTITY, [0.5, 0.5]).unwrap();
        let mut pts = points_near(&l, [0.0, 0.0], 1.0).unwrap();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts, vec![[-0.5, -0.5], [-0.5, 0.5], [0.5, -0.5], [0.5, 0.5]]);
        assert!(points_near(&AffineLattice::z2(), [0.0, 0.0], 1e5).unwrap_err().is_budget());
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist_to_mv(&AffineLattice::z2(), [1.0, 1.0]), 0.0);
        let l = make_affine_lattice(linalg::IDENTITY, [0.5, 0.5]).unwrap();
        assert!((dist_to_mv(&l, [1.0, 1.0]) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn choose_v_examples() {
        assert_eq!(choose_v(4.0).unwrap(), [2.0, 2.0]);
        assert_eq!(choose_v(-4.0).unwrap(), [-2.0, 2.0]);
        let v = choose_v(1.0).unwrap();
        assert_eq!(v, [1.0, 1.0]);
        assert_eq!(q0(&v), 1.0);
        assert!(choose_v(0.0).is_err());
    }
}
