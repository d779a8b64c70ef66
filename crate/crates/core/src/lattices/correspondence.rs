use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{choose_v, closest_point, flow_apply, points_near, q0, systole, AffineLattice};
use crate::error::{Error, Result};
use crate::linalg::{self, Vec2};

/// One sample of an orbit scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub t: f64,
    pub systole: f64,
    pub dist_to_mv: f64,
}

fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(Error::invalid("time-step", format!("Δt = {dt} must lie in (0, 0.1]")));
    }
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::invalid("time-horizon", "T must be finite and nonnegative"));
    }
    let k = (t_max / dt + 1e-9).floor() as i64;
    Ok((-k..=k).map(|i| i as f64 * dt).collect())
}

/// `(t, systole(b_tΛ), dist(v, b_tΛ))` for `t ∈ {t_min, t_min+Δt, …} ∩ [t_min, t_max]`.
pub fn orbit_scan(l: &AffineLattice, v: Vec2, t_min: f64, t_max: f64, dt: f64) -> Result<Vec<OrbitRow>> {
    if !(dt > 0.0) || !(t_max >= t_min) {
        return Err(Error::invalid("time-grid", "need Δt > 0 and t_max ≥ t_min"));
    }
    let steps = ((t_max - t_min) / dt + 1e-9).floor() as i64;
    Ok((0..=steps)
        .into_par_iter()
        .map(|i| {
            let t = t_min + i as f64 * dt;
            let lt = flow_apply(l, t);
            OrbitRow {
                t,
                systole: systole(&lt),
                dist_to_mv: closest_point(&lt, &v).1,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceParams {
    pub s: f64,
    pub radius: f64,
    pub t_max: f64,
    pub dt: f64,
    /// Value tolerance below which a same-quadrant point is flowed onto the
    /// line through `v`.
    pub witness_eps: f64,
}

impl CorrespondenceParams {
    pub fn new(s: f64, radius: f64, t_max: f64, dt: f64) -> Self {
        CorrespondenceParams {
            s,
            radius,
            t_max,
            dt,
            witness_eps: 1e-2,
        }
    }
}

/// A lattice point `p` with `Q₀(p) ≈ s` in the quadrant of `v`, together with
/// the time `t*` at which `b_{t*}p` lies on the line `ℝv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessFlow {
    pub point: Vec2,
    pub value_error: f64,
    pub t_star: f64,
    /// `‖b_{t*}p − v‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceRecord {
    pub v: Vec2,
    /// `min |Q₀(p) − s|` over points within the radius.
    pub value_gap: f64,
    pub witness_point: Vec2,
    /// `min_t dist(v, b_tΛ)` over the time grid.
    pub orbit_gap: f64,
    pub witness_time: f64,
    /// Best same-quadrant witness with value error below `witness_eps`.
    pub witness_flow: Option<WitnessFlow>,
    /// Near-`s` witnesses outside the quadrant of `v`; reported, not flowed.
    pub off_quadrant_witnesses: usize,
    pub points_scanned: usize,
}

/// `t*` with `b_{t*}p` on the line through `v`: `e^{2t*} = (p₂v₁)/(p₁v₂)`.
pub fn line_time(p: &Vec2, v: &Vec2) -> f64 {
    0.5 * ((p[1] * v[0]) / (p[0] * v[1])).ln()
}

/// Compares the value set `Q₀(Λ)` near `s` with the orbit `FΛ` near `M_v`.
pub fn correspondence_scan(l: &AffineLattice, params: &CorrespondenceParams) -> Result<CorrespondenceRecord> {
    let v = choose_v(params.s)?;
    let grid = time_grid(params.t_max, params.dt)?;
    let pts = points_near(l, [0.0, 0.0], params.radius)?;

    let s = params.s;
    let (value_gap, witness_point) = pts
        .par_iter()
        .map(|p| ((q0(p) - s).abs(), *p))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(cmp_vec(&a.1, &b.1)))
        .unwrap_or((f64::INFINITY, [f64::NAN; 2]));

    let same_quadrant = |p: &Vec2| p[0] * v[0] > 0.0 && p[1] * v[1] > 0.0;
    let near: Vec<&Vec2> = pts
        .iter()
        .filter(|p| (q0(p) - s).abs() < params.witness_eps)
        .collect();
    let off_quadrant_witnesses = near.iter().filter(|p| !same_quadrant(p)).count();
    let witness_flow = near
        .iter()
        .filter(|p| same_quadrant(p))
        .map(|p| ((q0(p) - s).abs(), **p))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(cmp_vec(&a.1, &b.1)))
        .map(|(value_error, p)| {
            let t_star = line_time(&p, &v);
            let moved = linalg::apply(&linalg::flow_matrix(t_star), &p);
            WitnessFlow {
                point: p,
                value_error,
                t_star,
                residual: linalg::norm(&linalg::sub(&moved, &v)),
            }
        });

    let (orbit_gap, witness_time) = grid
        .par_iter()
        .map(|&t| (closest_point(&flow_apply(l, t), &v).1, t))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.abs().total_cmp(&b.1.abs())).then(a.1.total_cmp(&b.1)))
        .expect("time grid is nonempty");

    Ok(CorrespondenceRecord {
        v,
        value_gap,
        witness_point,
        orbit_gap,
        witness_time,
        witness_flow,
        off_quadrant_witnesses,
        points_scanned: pts.len(),
    })
}

fn cmp_vec(a: &Vec2, b: &Vec2) -> std::cmp::Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}
