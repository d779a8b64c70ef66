//! Referee and strategies for Schmidt's `(α, β)`-game, the hyperplane
//! absolute game (HAW) and the hyperplane percentage game (HPW).
//!
//! A [`GameState`] is driven by [`GameState::apply`], which validates a
//! [`Move`] against the rules of its [`GameKind`] and either records it or
//! rejects it naming the violated [`Rule`].

mod geometry;
mod matches;
mod stage;
mod strategy;

pub use geometry::{ball_avoids_slab, ball_within, distance, Ball, HyperplaneNbhd, GEOMETRY_TOL, NORMAL_TOL};
pub use matches::{
    play_match, replay, LimitEstimate, MatchOutcome, Termination, Transcript, TranscriptHeader,
};
pub use stage::{
    check_stage_parameters, minimal_n, stage_index, window_of, window_partition, HyperplaneOracle,
    StageAnnotation, SyntheticOracle,
};
pub use strategy::{
    countable_targets, AliceAvoidCountable, AliceDummy, AliceStageWindow, BobGeometric, BobRandom,
    Strategy, StrategySpec,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use geometry::{at_least, at_most, matches as ratio_matches};

/// Named rules the referee enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    ParameterRange,
    GameOver,
    TurnOrder,
    MalformedMove,
    RadiusRatio,
    HalfwidthBound,
    Containment,
    Disjointness,
    AvoidanceQuota,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::ParameterRange,
        Rule::GameOver,
        Rule::TurnOrder,
        Rule::MalformedMove,
        Rule::RadiusRatio,
        Rule::HalfwidthBound,
        Rule::Containment,
        Rule::Disjointness,
        Rule::AvoidanceQuota,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::ParameterRange => "parameter-range",
            Rule::GameOver => "game-over",
            Rule::TurnOrder => "turn-order",
            Rule::MalformedMove => "malformed-move",
            Rule::RadiusRatio => "radius-ratio",
            Rule::HalfwidthBound => "halfwidth-bound",
            Rule::Containment => "containment",
            Rule::Disjointness => "disjointness",
            Rule::AvoidanceQuota => "avoidance-quota",
        }
    }

    pub fn parse(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

fn violation(rule: Rule, message: impl Into<String>) -> Error {
    Error::invalid(rule.as_str(), message)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::Alice => "alice",
            Player::Bob => "bob",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Variant {
    Classical { alpha: f64, beta: f64 },
    Haw { beta: f64 },
    Hpw { beta: f64 },
}

impl Variant {
    pub fn beta(&self) -> f64 {
        match *self {
            Variant::Classical { beta, .. } | Variant::Haw { beta } | Variant::Hpw { beta } => beta,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Classical { .. } => "classical",
            Variant::Haw { .. } => "haw",
            Variant::Hpw { .. } => "hpw",
        }
    }
}

/// Default HPW threshold `β₀(n)`: `1/5` for `n = 1`, `1/(2·3ⁿ)` otherwise.
pub fn default_beta0(n: usize) -> f64 {
    if n == 1 {
        0.2
    } else {
        0.5 / 3f64.powi(n as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameKind {
    pub variant: Variant,
    pub dimension: usize,
    /// Replaces [`default_beta0`] for HPW games.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
}

impl GameKind {
    pub fn classical(alpha: f64, beta: f64, dimension: usize) -> Self {
        GameKind {
            variant: Variant::Classical { alpha, beta },
            dimension,
            beta0: None,
        }
    }

    pub fn haw(beta: f64, dimension: usize) -> Self {
        GameKind {
            variant: Variant::Haw { beta },
            dimension,
            beta0: None,
        }
    }

    pub fn hpw(beta: f64, dimension: usize) -> Self {
        GameKind {
            variant: Variant::Hpw { beta },
            dimension,
            beta0: None,
        }
    }

    pub fn with_beta0(mut self, beta0: f64) -> Self {
        self.beta0 = Some(beta0);
        self
    }

    pub fn beta(&self) -> f64 {
        self.variant.beta()
    }

    pub fn beta0(&self) -> f64 {
        self.beta0.unwrap_or_else(|| default_beta0(self.dimension))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(violation(Rule::ParameterRange, "dimension must be at least 1"));
        }
        let open01 = |x: f64| x > 0.0 && x < 1.0;
        match self.variant {
            Variant::Classical { alpha, beta } => {
                if !open01(alpha) || !open01(beta) {
                    return Err(violation(
                        Rule::ParameterRange,
                        format!("classical game requires α, β ∈ (0,1); got α = {alpha}, β = {beta}"),
                    ));
                }
            }
            Variant::Haw { beta } => {
                if !(beta > 0.0 && beta < 1.0 / 3.0) {
                    return Err(violation(
                        Rule::ParameterRange,
                        format!("hyperplane absolute game requires β ∈ (0,1/3); got β = {beta}"),
                    ));
                }
            }
            Variant::Hpw { beta } => {
                let b0 = self.beta0();
                if !(b0 > 0.0 && b0 < 1.0) {
                    return Err(violation(Rule::ParameterRange, format!("β₀ override {b0} must lie in (0,1)")));
                }
                if !(beta > 0.0 && beta < b0) {
                    let note = if self.dimension == 1 && self.beta0.is_none() {
                        " (β₀(1)=1/5)".to_string()
                    } else {
                        String::new()
                    };
                    return Err(violation(
                        Rule::ParameterRange,
                        format!(
                            "hyperplane percentage game requires β ∈ (0,β₀(n)) with β₀({}) = {b0}{note}; got β = {beta}",
                            self.dimension
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A move. The mover is implied by the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Move {
    /// Classical game: Alice's ball `A_i`.
    AliceBall { ball: Ball },
    /// HAW (exactly one slab) or HPW (any number of slabs).
    AliceSlabs {
        slabs: Vec<HyperplaneNbhd>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stage: Option<StageAnnotation>,
    },
    BobBall { ball: Ball },
    Resign { player: Player },
}

impl Move {
    pub fn player(&self) -> Player {
        match self {
            Move::AliceBall { .. } | Move::AliceSlabs { .. } => Player::Alice,
            Move::BobBall { .. } => Player::Bob,
            Move::Resign { player } => *player,
        }
    }

    pub fn slabs(slabs: Vec<HyperplaneNbhd>) -> Move {
        Move::AliceSlabs { slabs, stage: None }
    }
}

/// Alice's standing constraint for Bob's next ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Pending {
    Ball { ball: Ball },
    Slabs { slabs: Vec<HyperplaneNbhd> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Verdict {
    pub fn accepted() -> Self {
        Verdict {
            accepted: true,
            rule: None,
            message: None,
        }
    }

    pub fn rejected(err: &Error) -> Self {
        let (rule, message) = match err {
            Error::InvalidParameter { rule, message } => (Rule::parse(rule), message.clone()),
            other => (None, other.to_string()),
        };
        Verdict {
            accepted: false,
            rule,
            message: Some(message),
        }
    }
}

/// Radius of `B_i` when the move was made, and the radius (or largest
/// halfwidth) the move proposed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    pub current: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    /// 1-based sequence number over all attempts in the transcript.
    pub turn: u64,
    /// Index `i` of the current ball `B_i`.
    pub round: u64,
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    pub verdict: Verdict,
    pub radii: Radii,
    /// HPW: slabs of Alice's last move that Bob's accepted ball still meets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surviving: Option<usize>,
    /// HPW with a stage annotation: stage slabs Bob's accepted ball meets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_surviving: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    kind: GameKind,
    to_move: Player,
    round: u64,
    base_radius: f64,
    current_ball: Ball,
    pending: Option<Pending>,
    /// Accepted balls `B₁, B₂, …` (and `A_i` for the classical game) in order.
    balls: Vec<Ball>,
    history: Vec<MoveRecord>,
    stage_data: Option<StageAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resigned: Option<Player>,
}

/// Starts a game with Bob's `B₁` recorded and Alice to move.
pub fn new_game(kind: GameKind, initial_ball: Ball) -> Result<GameState> {
    kind.validate()?;
    initial_ball
        .validate()
        .map_err(|e| violation(Rule::ParameterRange, e.to_string()))?;
    if initial_ball.dim() != kind.dimension {
        return Err(violation(
            Rule::ParameterRange,
            format!("initial ball has dimension {}, game has {}", initial_ball.dim(), kind.dimension),
        ));
    }
    Ok(GameState {
        kind,
        to_move: Player::Alice,
        round: 1,
        base_radius: initial_ball.radius,
        current_ball: initial_ball.clone(),
        pending: None,
        balls: vec![initial_ball],
        history: Vec::new(),
        stage_data: None,
        resigned: None,
    })
}

/// Applies `mv` to a copy of `state`.
pub fn apply_move(state: &GameState, mv: &Move) -> Result<GameState> {
    let mut s = state.clone();
    s.apply(mv.clone())?;
    Ok(s)
}

impl GameState {
    pub fn kind(&self) -> &GameKind {
        &self.kind
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    /// Index `i` of the current ball `B_i`.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Radius `r₀` of the initial ball.
    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn current_ball(&self) -> &Ball {
        &self.current_ball
    }

    pub fn pending(&self) -> Option<&Pending> {
        self.pending.as_ref()
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn history(&self) -> &[MoveRecord] {
        &self.history
    }

    pub fn stage_data(&self) -> Option<&StageAnnotation> {
        self.stage_data.as_ref()
    }

    pub fn resigned(&self) -> Option<Player> {
        self.resigned
    }

    pub fn is_over(&self) -> bool {
        self.resigned.is_some()
    }

    /// Number of slabs Bob must avoid: `⌈N_i/2⌉`.
    pub fn quota(n_slabs: usize) -> usize {
        n_slabs.div_ceil(2)
    }

    /// Validates `mv`; on success records it and returns the record. On
    /// failure the state is unchanged.
    pub fn apply(&mut self, mv: Move) -> Result<MoveRecord> {
        let outcome = self.check(&mv)?;
        let record = MoveRecord {
            turn: self.history.len() as u64 + 1,
            round: self.round,
            player: mv.player(),
            radii: self.radii_of(&mv),
            verdict: Verdict::accepted(),
            surviving: outcome.surviving,
            stage_surviving: outcome.stage_surviving,
            mv: mv.clone(),
        };
        match mv {
            Move::Resign { player } => self.resigned = Some(player),
            Move::AliceBall { ball } => {
                self.balls.push(ball.clone());
                self.pending = Some(Pending::Ball { ball });
                self.to_move = Player::Bob;
            }
            Move::AliceSlabs { slabs, stage } => {
                if stage.is_some() {
                    self.stage_data = stage;
                }
                self.pending = Some(Pending::Slabs { slabs });
                self.to_move = Player::Bob;
            }
            Move::BobBall { ball } => {
                self.balls.push(ball.clone());
                self.current_ball = ball;
                self.pending = None;
                self.round += 1;
                self.to_move = Player::Alice;
            }
        }
        self.history.push(record.clone());
        Ok(record)
    }

    /// A rejection record for `mv` (the state is not modified).
    pub fn rejection_record(&self, mv: &Move, err: &Error, turn: u64) -> MoveRecord {
        MoveRecord {
            turn,
            round: self.round,
            player: mv.player(),
            mv: mv.clone(),
            verdict: Verdict::rejected(err),
            radii: self.radii_of(mv),
            surviving: None,
            stage_surviving: None,
        }
    }

    fn radii_of(&self, mv: &Move) -> Radii {
        let proposed = match mv {
            Move::AliceBall { ball } | Move::BobBall { ball } => Some(ball.radius),
            Move::AliceSlabs { slabs, .. } => slabs.iter().map(|s| s.halfwidth).reduce(f64::max),
            Move::Resign { .. } => None,
        };
        Radii {
            current: self.current_ball.radius,
            proposed,
        }
    }

    /// Checks in order: game over, turn order, well-formedness, radius and
    /// halfwidth bounds, containment, then disjointness or the quota.
    fn check(&self, mv: &Move) -> Result<CheckOutcome> {
        if self.resigned.is_some() {
            return Err(violation(Rule::GameOver, "the game has ended"));
        }
        if mv.player() != self.to_move {
            return Err(violation(
                Rule::TurnOrder,
                format!("it is {}'s turn, not {}'s", self.to_move, mv.player()),
            ));
        }
        let n = self.kind.dimension;
        let r = self.current_ball.radius;
        let beta = self.kind.beta();
        match (mv, self.kind.variant) {
            (Move::Resign { .. }, _) => Ok(CheckOutcome::default()),
            (Move::AliceBall { ball }, Variant::Classical { alpha, .. }) => {
                check_ball_shape(ball, n)?;
                if !ratio_matches(ball.radius, alpha * r) {
                    return Err(violation(
                        Rule::RadiusRatio,
                        format!("need r_i' = αr_i = {}, got {}", alpha * r, ball.radius),
                    ));
                }
                if !ball_within(ball, &self.current_ball) {
                    return Err(violation(Rule::Containment, "need d(y_i, y_i') ≤ (1 − α)r_i"));
                }
                Ok(CheckOutcome::default())
            }
            (Move::BobBall { ball }, Variant::Classical { .. }) => {
                check_ball_shape(ball, n)?;
                let Some(Pending::Ball { ball: a }) = &self.pending else {
                    return Err(violation(Rule::MalformedMove, "no pending ball from Alice"));
                };
                if !ratio_matches(ball.radius, beta * a.radius) {
                    return Err(violation(
                        Rule::RadiusRatio,
                        format!("need r_(i+1) = βr_i' = {}, got {}", beta * a.radius, ball.radius),
                    ));
                }
                if !ball_within(ball, a) {
                    return Err(violation(Rule::Containment, "need d(y_(i+1), y_i') ≤ (1 − β)r_i'"));
                }
                Ok(CheckOutcome::default())
            }
            (Move::AliceSlabs { slabs, .. }, Variant::Haw { .. } | Variant::Hpw { .. }) => {
                let haw = matches!(self.kind.variant, Variant::Haw { .. });
                if haw && slabs.len() != 1 {
                    return Err(violation(
                        Rule::MalformedMove,
                        format!("hyperplane absolute game takes exactly one slab, got {}", slabs.len()),
                    ));
                }
                for s in slabs {
                    s.validate()?;
                    if s.dim() != n {
                        return Err(violation(
                            Rule::MalformedMove,
                            format!("slab has dimension {}, game has {n}", s.dim()),
                        ));
                    }
                }
                for s in slabs {
                    if !at_most(s.halfwidth, beta * r) {
                        return Err(violation(
                            Rule::HalfwidthBound,
                            format!("need 0 < ε ≤ βr_i = {}, got ε = {}", beta * r, s.halfwidth),
                        ));
                    }
                }
                Ok(CheckOutcome::default())
            }
            (Move::BobBall { ball }, Variant::Haw { .. } | Variant::Hpw { .. }) => {
                check_ball_shape(ball, n)?;
                let Some(Pending::Slabs { slabs }) = &self.pending else {
                    return Err(violation(Rule::MalformedMove, "no pending slabs from Alice"));
                };
                if !at_least(ball.radius, beta * r) {
                    return Err(violation(
                        Rule::RadiusRatio,
                        format!("need r_(i+1) ≥ βr_i = {}, got {}", beta * r, ball.radius),
                    ));
                }
                if !ball_within(ball, &self.current_ball) {
                    return Err(violation(Rule::Containment, "need B_(i+1) ⊆ B_i"));
                }
                let avoided = slabs.iter().filter(|s| ball_avoids_slab(ball, s)).count();
                if matches!(self.kind.variant, Variant::Haw { .. }) {
                    if avoided != slabs.len() {
                        return Err(violation(Rule::Disjointness, "need B_(i+1) ⊆ B_i ∖ A_i"));
                    }
                    return Ok(CheckOutcome::default());
                }
                let need = Self::quota(slabs.len());
                if avoided < need {
                    return Err(violation(
                        Rule::AvoidanceQuota,
                        format!("ball avoids {avoided} of {} slabs, needs at least {need}", slabs.len()),
                    ));
                }
                let stage_surviving = self
                    .stage_data
                    .as_ref()
                    .map(|st| st.slabs.iter().filter(|s| !ball_avoids_slab(ball, s)).count());
                Ok(CheckOutcome {
                    surviving: Some(slabs.len() - avoided),
                    stage_surviving,
                })
            }
            (mv, variant) => Err(violation(
                Rule::MalformedMove,
                format!("move {} is not valid in the {} game", move_name(mv), variant.name()),
            )),
        }
    }
}

#[derive(Default)]
struct CheckOutcome {
    surviving: Option<usize>,
    stage_surviving: Option<usize>,
}

fn move_name(mv: &Move) -> &'static str {
    match mv {
        Move::AliceBall { .. } => "alice_ball",
        Move::AliceSlabs { .. } => "alice_slabs",
        Move::BobBall { .. } => "bob_ball",
        Move::Resign { .. } => "resign",
    }
}

fn check_ball_shape(ball: &Ball, n: usize) -> Result<()> {
    ball.validate()?;
    if ball.dim() != n {
        return Err(violation(
            Rule::MalformedMove,
            format!("ball has dimension {}, game has {n}", ball.dim()),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Ball {
        Ball::new(vec![0.0; n], 1.0).unwrap()
    }

    fn rule_of(e: Error) -> &'static str {
        e.rule()
    }

    #[test]
    fn parameter_ranges() {
        assert_eq!(rule_of(new_game(GameKind::haw(0.4, 1), unit(1)).unwrap_err()), "parameter-range");
        let e = new_game(GameKind::hpw(0.25, 1), unit(1)).unwrap_err();
        assert!(e.to_string().contains("β₀(1)=1/5"), "{e}");
        assert!(new_game(GameKind::classical(0.5, 0.5, 1), unit(1)).is_ok());
        assert!(new_game(GameKind::hpw(0.25, 1).with_beta0(0.3), unit(1)).is_ok());
        assert!(new_game(GameKind::classical(0.5, 1.0, 1), unit(1)).is_err());
        assert!(new_game(GameKind::haw(0.1, 2), unit(1)).is_err());
    }

    #[test]
    fn haw_radius_ratio_rejected() {
        let mut g = new_game(GameKind::haw(0.1, 1), unit(1)).unwrap();
        g.apply(Move::slabs(vec![HyperplaneNbhd::through_point(&[0.0], 0.1).unwrap()])).unwrap();
        let e = g
            .apply(Move::BobBall {
                ball: Ball::new(vec![0.5], 0.9 * 0.1).unwrap(),
            })
            .unwrap_err();
        assert_eq!(e.rule(), "radius-ratio");
        assert_eq!(g.round(), 1);
    }

    #[test]
    fn haw_tangent_inside_accepted() {
        let mut g = new_game(GameKind::haw(0.1, 1), unit(1)).unwrap();
        g.apply(Move::slabs(vec![HyperplaneNbhd::through_point(&[0.0], 0.1).unwrap()])).unwrap();
        g.apply(Move::BobBall {
            ball: Ball::new(vec![0.9], 0.1).unwrap(),
        })
        .unwrap();
        assert_eq!(g.round(), 2);
        assert_eq!(g.to_move(), Player::Alice);
    }

    #[test]
    fn hpw_quota_rounds_up() {
        let mut g = new_game(GameKind::hpw(0.1, 1), unit(1)).unwrap();
        let slabs = [-0.6, 0.0, 0.6]
            .iter()
            .map(|&p| HyperplaneNbhd::through_point(&[p], 0.1).unwrap())
            .collect();
        g.apply(Move::slabs(slabs)).unwrap();
        let one = Ball::new(vec![0.0], 0.6).unwrap();
        assert_eq!(g.apply(Move::BobBall { ball: one }).unwrap_err().rule(), "avoidance-quota");
        let two = Ball::new(vec![0.6], 0.15).unwrap();
        let rec = g.apply(Move::BobBall { ball: two }).unwrap();
        assert_eq!(rec.surviving, Some(1));
    }

    #[test]
    fn turn_order_and_kind_mismatch() {
        let mut g = new_game(GameKind::haw(0.1, 1), unit(1)).unwrap();
        let e = g.apply(Move::BobBall { ball: unit(1) }).unwrap_err();
        assert_eq!(e.rule(), "turn-order");
        let e = g.apply(Move::AliceBall { ball: unit(1) }).unwrap_err();
        assert_eq!(e.rule(), "malformed-move");
        let e = g.apply(Move::slabs(vec![])).unwrap_err();
        assert_eq!(e.rule(), "malformed-move");
    }

    #[test]
    fn classical_round() {
        let mut g = new_game(GameKind::classical(0.5, 0.5, 2), unit(2)).unwrap();
        let a = Ball::new(vec![0.5, 0.0], 0.5).unwrap();
        g.apply(Move::AliceBall { ball: a }).unwrap();
        let bad = Ball::new(vec![0.5, 0.0], 0.3).unwrap();
        assert_eq!(g.apply(Move::BobBall { ball: bad }).unwrap_err().rule(), "radius-ratio");
        let out = Ball::new(vec![0.0, 0.0], 0.25).unwrap();
        assert_eq!(g.apply(Move::BobBall { ball: out }).unwrap_err().rule(), "containment");
        let ok = Ball::new(vec![0.75, 0.0], 0.25).unwrap();
        g.apply(Move::BobBall { ball: ok }).unwrap();
        assert_eq!(g.balls().len(), 3);
    }

    #[test]
    fn resignation_ends_game() {
        let mut g = new_game(GameKind::haw(0.1, 1), unit(1)).unwrap();
        g.apply(Move::Resign { player: Player::Alice }).unwrap();
        assert!(g.is_over());
        let e = g.apply(Move::slabs(vec![])).unwrap_err();
        assert_eq!(e.rule(), "game-over");
    }
}
