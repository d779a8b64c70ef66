//! Stateless strategies: each move is a function of the current state
//! (plus fixed parameters and, for random Bob, a seed).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{ball_avoids_slab, ball_within, Ball, HyperplaneNbhd};
use super::stage::{check_stage_parameters, minimal_n, stage_index, window, HyperplaneOracle, StageAnnotation, SyntheticOracle};
use super::{violation, GameState, Move, Pending, Rule, Variant};
use crate::error::{Error, Result};

pub trait Strategy: Send + Sync {
    fn name(&self) -> String;

    /// The next move, or `None` to resign.
    fn next_move(&self, state: &GameState) -> Result<Option<Move>>;

    /// Seed used by randomized strategies, recorded in transcripts.
    fn seed(&self) -> Option<u64> {
        None
    }
}

fn far_slab(state: &GameState) -> Result<HyperplaneNbhd> {
    let b = state.current_ball();
    let eps = state.kind().beta() * b.radius;
    let mut n = vec![0.0; b.dim()];
    n[0] = 1.0;
    HyperplaneNbhd::new(n, b.center[0] + 2.0 * b.radius + eps, eps)
}

/// A move that constrains nothing.
fn dummy_move(state: &GameState) -> Result<Move> {
    match state.kind().variant {
        Variant::Classical { alpha, .. } => {
            let b = state.current_ball();
            Ok(Move::AliceBall {
                ball: Ball::new(b.center.clone(), alpha * b.radius)?,
            })
        }
        Variant::Haw { .. } | Variant::Hpw { .. } => Ok(Move::slabs(vec![far_slab(state)?])),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AliceDummy;

impl Strategy for AliceDummy {
    fn name(&self) -> String {
        "alice-dummy".into()
    }

    fn next_move(&self, state: &GameState) -> Result<Option<Move>> {
        dummy_move(state).map(Some)
    }
}

/// At turn `i`, blocks the slab of halfwidth `βr_i` around the hyperplane
/// `{x₁ = (q_i)₁}`; in one dimension this is the point `q_i` itself. Once the
/// list is exhausted Alice plays dummy moves.
#[derive(Debug, Clone)]
pub struct AliceAvoidCountable {
    pub points: Vec<Vec<f64>>,
}

impl Strategy for AliceAvoidCountable {
    fn name(&self) -> String {
        format!("alice-avoid-countable({} points)", self.points.len())
    }

    fn next_move(&self, state: &GameState) -> Result<Option<Move>> {
        if !matches!(state.kind().variant, Variant::Haw { .. }) {
            return Err(violation(Rule::ParameterRange, "avoid-countable plays the hyperplane absolute game only"));
        }
        let i = state.round() as usize;
        let Some(q) = self.points.get(i - 1) else {
            return dummy_move(state).map(Some);
        };
        if q.len() != state.kind().dimension {
            return Err(Error::DimensionMismatch {
                expected: state.kind().dimension,
                got: q.len(),
            });
        }
        let eps = state.kind().beta() * state.current_ball().radius;
        Ok(Some(Move::slabs(vec![HyperplaneNbhd::through_point(q, eps)?])))
    }
}

/// Stage/window strategy for the percentage game. At a stage-opening turn it
/// asks the oracle for `L(B_{i_j}, k)` for every `k ∈ N_j` and plays all of
/// them with halfwidth `β^{n+1}r_{i_j}`; later in the stage it replays the
/// stage slabs that still meet the current ball.
pub struct AliceStageWindow {
    pub tau: f64,
    pub oracle: Box<dyn HyperplaneOracle>,
}

impl AliceStageWindow {
    pub fn new(tau: f64, oracle: Box<dyn HyperplaneOracle>) -> Self {
        AliceStageWindow { tau, oracle }
    }
}

impl Strategy for AliceStageWindow {
    fn name(&self) -> String {
        format!("alice-stage-window(τ={})", self.tau)
    }

    fn next_move(&self, state: &GameState) -> Result<Option<Move>> {
        let Variant::Hpw { beta } = state.kind().variant else {
            return Err(violation(Rule::ParameterRange, "stage strategy plays the hyperplane percentage game only"));
        };
        check_stage_parameters(self.tau, beta)?;
        let n = minimal_n(self.tau, beta)?;
        let ball = state.current_ball();
        let j = stage_index(beta, n, state.base_radius(), ball.radius)?;
        if let Some(st) = state.stage_data() {
            if st.j == j && st.n == n && st.tau == self.tau {
                let live: Vec<HyperplaneNbhd> =
                    st.slabs.iter().filter(|s| !ball_avoids_slab(ball, s)).cloned().collect();
                return Ok(Some(Move::AliceSlabs {
                    slabs: live,
                    stage: Some(st.clone()),
                }));
            }
        }
        let ks = window(self.tau, beta, n, j);
        let eps = beta.powi(n as i32 + 1) * ball.radius;
        let slabs = ks
            .iter()
            .map(|&k| {
                let (normal, offset) = self.oracle.hyperplane(ball, k)?;
                HyperplaneNbhd::new(normal, offset, eps).map_err(|e| Error::Oracle(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let annotation = StageAnnotation {
            tau: self.tau,
            n,
            j,
            i_j: state.round(),
            r_ij: ball.radius,
            window: ks,
            slabs: slabs.clone(),
        };
        Ok(Some(Move::AliceSlabs {
            slabs,
            stage: Some(annotation),
        }))
    }
}

fn unit_ball_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return p;
        }
    }
}

fn offset_ball(c: &[f64], dir: &[f64], t: f64, radius: f64) -> Ball {
    Ball {
        center: c.iter().zip(dir).map(|(a, b)| a + t * b).collect(),
        radius,
    }
}

fn bob_legal(state: &GameState, ball: &Ball, slabs: &[HyperplaneNbhd], need: usize) -> bool {
    ball_within(ball, state.current_ball()) && slabs.iter().filter(|s| ball_avoids_slab(ball, s)).count() >= need
}

/// Random Bob: up to 64 proposals with radius ratio in `[max(β, 1/2), 0.95]`
/// and a uniform center, then a search over tangent-inside balls of the
/// minimum radius along coordinate and slab normal directions. Resigns if
/// nothing legal is found.
#[derive(Debug, Clone, Copy)]
pub struct BobRandom {
    pub seed: u64,
}

impl Strategy for BobRandom {
    fn name(&self) -> String {
        format!("bob-random(seed={})", self.seed)
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn next_move(&self, state: &GameState) -> Result<Option<Move>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(state.round());
        let d = state.kind().dimension;
        let beta = state.kind().beta();
        match state.pending() {
            Some(Pending::Ball { ball: a }) => {
                let r = beta * a.radius;
                let p = unit_ball_point(&mut rng, d);
                Ok(Some(Move::BobBall {
                    ball: offset_ball(&a.center, &p, a.radius - r, r),
                }))
            }
            Some(Pending::Slabs { slabs }) => {
                let need = match state.kind().variant {
                    Variant::Haw { .. } => slabs.len(),
                    _ => GameState::quota(slabs.len()),
                };
                let b = state.current_ball();
                for _ in 0..64 {
                    let u = rng.random_range(beta.max(0.5)..=0.95_f64.max(beta));
                    let r = u * b.radius;
                    let p = unit_ball_point(&mut rng, d);
                    let cand = offset_ball(&b.center, &p, b.radius - r, r);
                    if bob_legal(state, &cand, slabs, need) {
                        return Ok(Some(Move::BobBall { ball: cand }));
                    }
                }
                let r = beta * b.radius;
                let mut dirs: Vec<Vec<f64>> = Vec::new();
                for s in slabs {
                    dirs.push(s.normal.clone());
                }
                for k in 0..d {
                    let mut e = vec![0.0; d];
                    e[k] = 1.0;
                    dirs.push(e);
                }
                for dir in &dirs {
                    for step in 0..=64 {
                        let t = (1.0 - step as f64 / 32.0) * (b.radius - r);
                        let cand = offset_ball(&b.center, dir, t, r);
                        if bob_legal(state, &cand, slabs, need) {
                            return Ok(Some(Move::BobBall { ball: cand }));
                        }
                    }
                }
                Ok(None)
            }
            None => Err(violation(Rule::TurnOrder, "Bob has nothing to answer")),
        }
    }
}

/// Deterministic Bob shrinking by `factor` (at least `β`) toward `direction`.
#[derive(Debug, Clone)]
pub struct BobGeometric {
    pub factor: f64,
    pub direction: Vec<f64>,
}

impl Strategy for BobGeometric {
    fn name(&self) -> String {
        format!("bob-geometric(factor={})", self.factor)
    }

    fn next_move(&self, state: &GameState) -> Result<Option<Move>> {
        let d = state.kind().dimension;
        if self.direction.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.direction.len(),
            });
        }
        let len = self.direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = if len > 0.0 {
            self.direction.iter().map(|x| x / len).collect()
        } else {
            vec![0.0; d]
        };
        let beta = state.kind().beta();
        let (outer, r) = match state.pending() {
            Some(Pending::Ball { ball }) => (ball.clone(), beta * ball.radius),
            Some(Pending::Slabs { .. }) => {
                let b = state.current_ball();
                (b.clone(), self.factor.max(beta).min(1.0) * b.radius)
            }
            None => return Err(violation(Rule::TurnOrder, "Bob has nothing to answer")),
        };
        // Tangent placement can fail containment by rounding; step inward by
        // growing multiples of the center's resolution until it holds.
        let scale = outer.center.iter().fold(outer.radius, |m, c| m.max(c.abs())) * f64::EPSILON;
        let mut ball = offset_ball(&outer.center, &u, outer.radius - r, r);
        let mut step = scale;
        while !ball_within(&ball, &outer) && step < outer.radius - r {
            ball = offset_ball(&outer.center, &u, outer.radius - r - step, r);
            step *= 2.0;
        }
        Ok(Some(Move::BobBall { ball }))
    }
}

/// Reduced fractions `p/q ∈ [lo, hi]` with `q ≤ max_denominator`, ordered
/// by denominator and then numerator.
pub fn countable_targets(lo: f64, hi: f64, max_denominator: u64) -> Vec<Vec<f64>> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let mut out = Vec::new();
    for q in 1..=max_denominator as i64 {
        let p_lo = (lo * q as f64).ceil() as i64;
        let p_hi = (hi * q as f64).floor() as i64;
        for p in p_lo..=p_hi {
            if gcd(p, q) == 1 {
                out.push(vec![p as f64 / q as f64]);
            }
        }
    }
    out
}

/// Serializable strategy description for the service and CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum StrategySpec {
    Dummy,
    AvoidCountable { points: Vec<Vec<f64>> },
    /// One-dimensional rationals from [`countable_targets`].
    AvoidRationals { lo: f64, hi: f64, max_denominator: u64 },
    StageWindow { tau: f64, oracle: SyntheticOracle },
    RandomBob { seed: u64 },
    GeometricBob { factor: f64, direction: Vec<f64> },
}

impl StrategySpec {
    pub fn build(&self) -> Result<Box<dyn Strategy>> {
        Ok(match self {
            StrategySpec::Dummy => Box::new(AliceDummy),
            StrategySpec::AvoidCountable { points } => Box::new(AliceAvoidCountable { points: points.clone() }),
            StrategySpec::AvoidRationals { lo, hi, max_denominator } => {
                if !(lo <= hi) || *max_denominator == 0 || *max_denominator > 10_000 {
                    return Err(violation(Rule::ParameterRange, "need lo ≤ hi and 1 ≤ max_denominator ≤ 10000"));
                }
                Box::new(AliceAvoidCountable {
                    points: countable_targets(*lo, *hi, *max_denominator),
                })
            }
            StrategySpec::StageWindow { tau, oracle } => Box::new(AliceStageWindow::new(*tau, Box::new(oracle.clone()))),
            StrategySpec::RandomBob { seed } => Box::new(BobRandom { seed: *seed }),
            StrategySpec::GeometricBob { factor, direction } => Box::new(BobGeometric {
                factor: *factor,
                direction: direction.clone(),
            }),
        })
    }

    pub fn player(&self) -> super::Player {
        match self {
            StrategySpec::RandomBob { .. } | StrategySpec::GeometricBob { .. } => super::Player::Bob,
            _ => super::Player::Alice,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{new_game, GameKind};

    #[test]
    fn first_avoidance_slab() {
        let g = new_game(GameKind::haw(0.1, 1), Ball::new(vec![0.0], 1.0).unwrap()).unwrap();
        let a = AliceAvoidCountable { points: vec![vec![0.0]] };
        let Some(Move::AliceSlabs { slabs, .. }) = a.next_move(&g).unwrap() else {
            panic!("expected slabs")
        };
        assert_eq!(slabs[0].offset, 0.0);
        assert!((slabs[0].halfwidth - 0.1).abs() < 1e-15);
    }

    #[test]
    fn outside_target_is_legal() {
        let mut g = new_game(GameKind::haw(0.1, 1), Ball::new(vec![0.0], 1.0).unwrap()).unwrap();
        let a = AliceAvoidCountable { points: vec![vec![5.0]] };
        let mv = a.next_move(&g).unwrap().unwrap();
        g.apply(mv).unwrap();
    }

    #[test]
    fn rationals_order() {
        let t = countable_targets(-1.0, 1.0, 3);
        let flat: Vec<f64> = t.into_iter().map(|v| v[0]).collect();
        assert_eq!(flat, vec![-1.0, 0.0, 1.0, -0.5, 0.5, -2.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn random_bob_is_seeded() {
        let mut g = new_game(GameKind::haw(0.1, 2), Ball::new(vec![0.0, 0.0], 1.0).unwrap()).unwrap();
        g.apply(AliceDummy.next_move(&g).unwrap().unwrap()).unwrap();
        let a = BobRandom { seed: 9 }.next_move(&g).unwrap();
        let b = BobRandom { seed: 9 }.next_move(&g).unwrap();
        let c = BobRandom { seed: 10 }.next_move(&g).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
