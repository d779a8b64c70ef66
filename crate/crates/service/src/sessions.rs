//! Game sessions: a remote player against an engine strategy.

use oppenheim_core::games::{
    new_game, replay, Ball, GameKind, GameState, Move, MoveRecord, Player, StrategySpec, Transcript, TranscriptHeader,
};
use oppenheim_core::Result;
use serde::{Deserialize, Serialize};

/// Body of `POST /sessions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateSession {
    pub kind: GameKind,
    /// Defaults to the unit ball at the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_ball: Option<Ball>,
    /// The side played over HTTP. Defaults to Bob.
    #[serde(default = "default_remote")]
    pub remote: Player,
    /// Strategy for the other side. Defaults to the dummy strategy.
    #[serde(default = "default_engine")]
    pub engine: StrategySpec,
}

fn default_remote() -> Player {
    Player::Bob
}

fn default_engine() -> StrategySpec {
    StrategySpec::Dummy
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub(crate) enum SessionEvent {
    Created {
        id: String,
        created_ms: u64,
        #[serde(default)]
        idempotency_key: Option<String>,
        request: CreateSession,
    },
    Move {
        at_ms: u64,
        record: MoveRecord,
    },
}

/// A session as returned by the API. `transcript` holds every verdict,
/// rejections included, and replays to `state`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub created_ms: u64,
    pub updated_ms: u64,
    pub remote: Player,
    pub engine: StrategySpec,
    pub to_move: Player,
    pub is_over: bool,
    pub state: GameState,
    pub transcript: Transcript,
}

/// Body of a successful `POST /sessions/{id}/moves`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveResponse {
    pub record: MoveRecord,
    /// The engine's answer, when it was the engine's turn next.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reply: Option<MoveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine_error: Option<String>,
    pub session: SessionView,
}

#[derive(Debug, Clone)]
pub(crate) struct Session {
    pub id: String,
    pub created_ms: u64,
    pub updated_ms: u64,
    pub idempotency_key: Option<String>,
    pub remote: Player,
    pub engine: StrategySpec,
    pub transcript: Transcript,
    pub state: GameState,
}

fn header(req: &CreateSession, ball: &Ball) -> TranscriptHeader {
    let (engine, remote) = (Some(engine_name(&req.engine)), Some("remote".to_string()));
    let (alice, bob) = match req.remote {
        Player::Bob => (engine, remote),
        Player::Alice => (remote, engine),
    };
    TranscriptHeader {
        kind: req.kind,
        initial_ball: ball.clone(),
        seed: match req.engine {
            StrategySpec::RandomBob { seed } => Some(seed),
            _ => None,
        },
        alice,
        bob,
        max_turns: None,
    }
}

fn engine_name(spec: &StrategySpec) -> String {
    spec.build().map(|s| s.name()).unwrap_or_else(|_| "invalid".into())
}

impl Session {
    /// Validates the request and sets up the game. Does not run the engine.
    pub fn create(id: String, now: u64, idempotency_key: Option<String>, req: &CreateSession) -> Result<Session> {
        let ball = match &req.initial_ball {
            Some(b) => b.clone(),
            None => Ball::new(vec![0.0; req.kind.dimension], 1.0)?,
        };
        let state = new_game(req.kind, ball.clone())?;
        if req.engine.player() == req.remote {
            return Err(oppenheim_core::Error::invalid(
                "strategy-side",
                format!("engine strategy plays {}, which is the remote side", req.remote),
            ));
        }
        req.engine.build()?;
        Ok(Session {
            id,
            created_ms: now,
            updated_ms: now,
            idempotency_key,
            remote: req.remote,
            engine: req.engine.clone(),
            transcript: Transcript::new(header(req, &ball)),
            state,
        })
    }

    /// Rebuilds a session from its event log, re-verifying every verdict.
    pub fn restore(events: &[SessionEvent]) -> std::result::Result<Session, String> {
        let Some(SessionEvent::Created {
            id,
            created_ms,
            idempotency_key,
            request,
        }) = events.first()
        else {
            return Err("log does not start with a creation event".into());
        };
        let mut s = Session::create(id.clone(), *created_ms, idempotency_key.clone(), request).map_err(|e| e.to_string())?;
        for ev in &events[1..] {
            match ev {
                SessionEvent::Move { at_ms, record } => {
                    s.transcript.records.push(record.clone());
                    s.updated_ms = *at_ms;
                }
                SessionEvent::Created { .. } => return Err("duplicate creation event".into()),
            }
        }
        s.state = replay(&s.transcript).map_err(|e| e.to_string())?;
        Ok(s)
    }

    pub fn created_event(&self, req: &CreateSession) -> SessionEvent {
        SessionEvent::Created {
            id: self.id.clone(),
            created_ms: self.created_ms,
            idempotency_key: self.idempotency_key.clone(),
            request: req.clone(),
        }
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            created_ms: self.created_ms,
            updated_ms: self.updated_ms,
            remote: self.remote,
            engine: self.engine.clone(),
            to_move: self.state.to_move(),
            is_over: self.state.is_over(),
            state: self.state.clone(),
            transcript: self.transcript.clone(),
        }
    }

    /// Applies `mv`, recording the verdict either way. Returns the record
    /// and, for a rejection, the referee's error.
    pub fn play(&mut self, mv: Move, now: u64) -> (MoveRecord, Option<oppenheim_core::Error>) {
        self.updated_ms = now;
        let out = match self.state.apply(mv.clone()) {
            Ok(rec) => (rec, None),
            Err(e) => {
                let turn = self.state.history().len() as u64 + 1;
                (self.state.rejection_record(&mv, &e, turn), Some(e))
            }
        };
        self.transcript.records.push(out.0.clone());
        out
    }

    /// Lets the engine move if it is its turn. Returns the new record, or the
    /// strategy's error message.
    pub fn engine_turn(&mut self, now: u64) -> (Option<MoveRecord>, Option<String>) {
        if self.state.is_over() || self.state.to_move() == self.remote {
            return (None, None);
        }
        let player = self.state.to_move();
        let mv = match self.engine.build().and_then(|s| s.next_move(&self.state)) {
            Ok(Some(mv)) => mv,
            Ok(None) => Move::Resign { player },
            Err(e) => return (None, Some(e.to_string())),
        };
        let (r, err) = self.play(mv, now);
        (Some(r), err.map(|e| format!("engine move rejected: {e}")))
    }
}
