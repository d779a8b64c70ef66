//! Running matches between strategies, transcripts and replay.

use serde::{Deserialize, Serialize};

use super::geometry::Ball;
use super::strategy::Strategy;
use super::{new_game, GameKind, GameState, Move, MoveRecord, Player, Rule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub kind: GameKind,
    pub initial_ball: Ball,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub alice: Option<String>,
    #[serde(default)]
    pub bob: Option<String>,
    #[serde(default)]
    pub max_turns: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub records: Vec<MoveRecord>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: TranscriptHeader,
}

impl Transcript {
    pub fn new(header: TranscriptHeader) -> Self {
        Transcript {
            header,
            records: Vec::new(),
        }
    }

    /// One JSON object per line: the header first, then one line per move.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&HeaderLine {
            header: self.header.clone(),
        })
        .expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Transcript::to_jsonl`]. Blank lines and `#` comment lines
    /// are skipped.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        });
        let first = lines
            .next()
            .ok_or_else(|| Error::invalid("transcript", "empty transcript"))?;
        let header: HeaderLine = serde_json::from_str(first)
            .map_err(|e| Error::invalid("transcript", format!("bad header line: {e}")))?;
        let records = lines
            .enumerate()
            .map(|(i, l)| {
                serde_json::from_str(l)
                    .map_err(|e| Error::invalid("transcript", format!("bad record {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<MoveRecord>>>()?;
        Ok(Transcript {
            header: header.header,
            records,
        })
    }
}

/// Replays every record against a fresh referee and checks that each
/// verdict is reproduced. Returns the final state.
pub fn replay(t: &Transcript) -> Result<GameState> {
    let mut state = new_game(t.header.kind, t.header.initial_ball.clone())?;
    for rec in &t.records {
        let diverged = |what: String| Error::Oracle(format!("replay diverged at turn {}: {what}", rec.turn));
        let mut trial = state.clone();
        match (trial.apply(rec.mv.clone()), rec.verdict.accepted) {
            (Ok(got), true) => {
                if got.surviving != rec.surviving || got.stage_surviving != rec.stage_surviving || got.round != rec.round {
                    return Err(diverged("recorded bookkeeping differs".into()));
                }
                state = trial;
            }
            (Err(e), false) => {
                if Rule::parse(e.rule()) != rec.verdict.rule {
                    return Err(diverged(format!("rejected for {} instead of {:?}", e.rule(), rec.verdict.rule)));
                }
            }
            (Ok(_), false) => return Err(diverged("recorded rejection is now accepted".into())),
            (Err(e), true) => return Err(diverged(format!("recorded acceptance is now rejected: {e}"))),
        }
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Resigned { player: Player },
    IllegalMove { player: Player, rule: Option<Rule>, message: String },
    StrategyError { player: Player, message: String },
}

/// The limit point lies within `error_bound` of `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub center: Vec<f64>,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchOutcome {
    pub transcript: Transcript,
    pub state: GameState,
    pub termination: Termination,
    pub limit: LimitEstimate,
}

/// Plays until `max_turns` rounds have been completed, a player resigns, or
/// a strategy produces an illegal move (which is recorded as rejected).
pub fn play_match(state: GameState, alice: &dyn Strategy, bob: &dyn Strategy, max_turns: u64) -> MatchOutcome {
    let mut state = state;
    let header = TranscriptHeader {
        kind: *state.kind(),
        initial_ball: state.balls()[0].clone(),
        seed: bob.seed().or(alice.seed()),
        alice: Some(alice.name()),
        bob: Some(bob.name()),
        max_turns: Some(max_turns),
    };
    let mut rejected: Option<MoveRecord> = None;
    let termination = loop {
        if state.is_over() {
            break Termination::Resigned {
                player: state.resigned().expect("over"),
            };
        }
        if state.round() > max_turns {
            break Termination::Completed;
        }
        let player = state.to_move();
        let strat = match player {
            Player::Alice => alice,
            Player::Bob => bob,
        };
        match strat.next_move(&state) {
            Ok(Some(mv)) => {
                if let Err(e) = state.apply(mv.clone()) {
                    let turn = state.history().len() as u64 + 1;
                    rejected = Some(state.rejection_record(&mv, &e, turn));
                    break Termination::IllegalMove {
                        player,
                        rule: Rule::parse(e.rule()),
                        message: e.to_string(),
                    };
                }
            }
            Ok(None) => {
                state.apply(Move::Resign { player }).expect("resigning on turn is legal");
            }
            Err(e) => {
                break Termination::StrategyError {
                    player,
                    message: e.to_string(),
                }
            }
        }
    };
    let mut transcript = Transcript::new(header);
    transcript.records = state.history().to_vec();
    transcript.records.extend(rejected);
    let b = state.current_ball();
    let limit = LimitEstimate {
        center: b.center.clone(),
        error_bound: b.radius,
    };
    MatchOutcome {
        transcript,
        state,
        termination,
        limit,
    }
}
