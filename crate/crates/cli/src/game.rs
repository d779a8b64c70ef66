//! `game` and `replay` subcommands, including line-based human play.

use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use oppenheim_core::games::{
    apply_move, new_game, play_match, replay, Ball, GameKind, GameState, HyperplaneNbhd, Move, Player, Strategy,
    StrategySpec, SyntheticOracle, Termination, Transcript, Verdict,
};
use oppenheim_core::{Error, Result};
use serde::Serialize;

use crate::{parse_list, CmdResult, Ctx};

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Classical,
    Haw,
    Hpw,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliceArg {
    Dummy,
    AvoidRationals,
    AvoidPoints,
    StageWindow,
    Human,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobArg {
    Random,
    Geometric,
    Human,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleArg {
    Constant,
    Spread,
    ThroughCenter,
}

/// Points `x1,y1;x2,y2;…`.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Points(Vec<Vec<f64>>);

fn parse_points(s: &str) -> std::result::Result<Points, String> {
    s.split(';').map(parse_list).collect::<std::result::Result<_, _>>().map(Points)
}

#[derive(Args, Debug, Serialize)]
pub struct GameArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Alice's ratio (classical game only).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: f64,
    /// Override of the HPW threshold β₀(n).
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Center of B₁ (default: the origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, value_enum, default_value = "dummy")]
    alice: AliceArg,
    /// Rational targets in [lo, hi] for avoid-rationals.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 20)]
    max_den: u64,
    /// Targets for avoid-points, as `x1,y1;x2,y2;…`.
    #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
    points: Option<Points>,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, value_enum, default_value = "through-center")]
    oracle: OracleArg,
    /// Oracle normal for the constant and spread families.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    normal: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    offset: f64,
    #[arg(long, value_enum, default_value = "random")]
    bob: BobArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Radius ratio for the geometric Bob.
    #[arg(long, default_value_t = 0.5)]
    factor: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    direction: Option<Vec<f64>>,
    /// Rounds to play.
    #[arg(long, default_value_t = 20)]
    turns: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ReplayArgs {
    /// Transcript written by `game`.
    transcript: PathBuf,
}

impl GameArgs {
    fn kind(&self) -> Result<GameKind> {
        let k = match self.kind {
            KindArg::Classical => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::invalid("parameter-range", "the classical game needs --alpha"))?;
                GameKind::classical(alpha, self.beta, self.dim)
            }
            KindArg::Haw => GameKind::haw(self.beta, self.dim),
            KindArg::Hpw => GameKind::hpw(self.beta, self.dim),
        };
        Ok(match self.beta0 {
            Some(b) => k.with_beta0(b),
            None => k,
        })
    }

    fn normal(&self) -> Vec<f64> {
        self.normal.clone().unwrap_or_else(|| {
            let mut e = vec![0.0; self.dim];
            e[0] = 1.0;
            e
        })
    }

    fn alice(&self) -> Result<Box<dyn Strategy>> {
        let spec = match self.alice {
            AliceArg::Human => return Ok(Box::new(Human)),
            AliceArg::Dummy => StrategySpec::Dummy,
            AliceArg::AvoidRationals => StrategySpec::AvoidRationals {
                lo: self.lo,
                hi: self.hi,
                max_denominator: self.max_den,
            },
            AliceArg::AvoidPoints => StrategySpec::AvoidCountable {
                points: self
                    .points
                    .clone()
                    .ok_or_else(|| Error::invalid("strategy", "avoid-points needs --points"))?
                    .0,
            },
            AliceArg::StageWindow => StrategySpec::StageWindow {
                tau: self.tau,
                oracle: match self.oracle {
                    OracleArg::Constant => SyntheticOracle::Constant {
                        normal: self.normal(),
                        offset: self.offset,
                    },
                    OracleArg::Spread => SyntheticOracle::Spread { normal: self.normal() },
                    OracleArg::ThroughCenter => SyntheticOracle::ThroughCenter,
                },
            },
        };
        spec.build()
    }

    fn bob(&self) -> Result<Box<dyn Strategy>> {
        let spec = match self.bob {
            BobArg::Human => return Ok(Box::new(Human)),
            BobArg::Random => StrategySpec::RandomBob { seed: self.seed },
            BobArg::Geometric => StrategySpec::GeometricBob {
                factor: self.factor,
                direction: self.direction.clone().unwrap_or_else(|| self.normal()),
            },
        };
        spec.build()
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    termination: Option<&'a Termination>,
    round: u64,
    to_move: Player,
    is_over: bool,
    final_ball: &'a Ball,
    last_verdict: Option<&'a Verdict>,
    state: &'a GameState,
}

fn summary<'a>(t: &'a Transcript, state: &'a GameState, termination: Option<&'a Termination>) -> Summary<'a> {
    Summary {
        termination,
        round: state.round(),
        to_move: state.to_move(),
        is_over: state.is_over(),
        final_ball: state.current_ball(),
        last_verdict: t.records.last().map(|r| &r.verdict),
        state,
    }
}

pub fn run(ctx: &Ctx, a: &GameArgs) -> CmdResult {
    let kind = a.kind()?;
    let center = a.center.clone().unwrap_or_else(|| vec![0.0; a.dim]);
    let state = new_game(kind, Ball::new(center, a.radius)?)?;
    let (alice, bob) = (a.alice()?, a.bob()?);
    let out = play_match(state, alice.as_ref(), bob.as_ref(), a.turns);
    let mut o = ctx.out("game", a)?;
    o.raw(&out.transcript.to_jsonl())?;
    o.finish()?;
    let s = summary(&out.transcript, &out.state, Some(&out.termination));
    let line = serde_json::to_string(&s).map_err(io::Error::other)?;
    if ctx.output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

pub fn replay_cmd(ctx: &Ctx, a: &ReplayArgs) -> CmdResult {
    let text = std::fs::read_to_string(&a.transcript)?;
    let t = Transcript::from_jsonl(&text)?;
    let state = replay(&t)?;
    let mut o = ctx.out("replay", a)?;
    o.json(&summary(&t, &state, None))?;
    Ok(o.finish()?)
}

/// A player on the terminal. Prompts go to stderr; moves are read from
/// stdin, one per line, and re-prompted until legal. End of input resigns.
///
/// Move syntax: `ball c₁ … cₙ r`, `slab n₁ … nₙ offset ε; slab …`, `slabs`
/// (no slabs), `resign`, or a JSON move.
struct Human;

fn parse_nums(words: &[&str]) -> std::result::Result<Vec<f64>, String> {
    words.iter().map(|w| w.parse::<f64>().map_err(|e| format!("{w:?}: {e}"))).collect()
}

fn parse_move(line: &str, state: &GameState) -> std::result::Result<Move, String> {
    let line = line.trim();
    if line.starts_with('{') {
        return serde_json::from_str(line).map_err(|e| e.to_string());
    }
    let n = state.kind().dimension;
    let words: Vec<&str> = line.split_whitespace().collect();
    match words.first().copied() {
        Some("resign") => Ok(Move::Resign {
            player: state.to_move(),
        }),
        Some("ball") => {
            let v = parse_nums(&words[1..])?;
            if v.len() != n + 1 {
                return Err(format!("ball needs {n} coordinates and a radius"));
            }
            let ball = Ball {
                center: v[..n].to_vec(),
                radius: v[n],
            };
            Ok(match state.to_move() {
                Player::Alice => Move::AliceBall { ball },
                Player::Bob => Move::BobBall { ball },
            })
        }
        Some("slabs") if words.len() == 1 => Ok(Move::slabs(vec![])),
        Some("slab") => {
            let mut slabs = Vec::new();
            for part in line.split(';') {
                let w: Vec<&str> = part.split_whitespace().collect();
                if w.first() != Some(&"slab") {
                    return Err("each slab starts with `slab`".into());
                }
                let v = parse_nums(&w[1..])?;
                if v.len() != n + 2 {
                    return Err(format!("slab needs {n} normal coordinates, an offset and a halfwidth"));
                }
                slabs.push(HyperplaneNbhd {
                    normal: v[..n].to_vec(),
                    offset: v[n],
                    halfwidth: v[n + 1],
                });
            }
            Ok(Move::slabs(slabs))
        }
        _ => Err("expected ball, slab, slabs, resign or a JSON move".into()),
    }
}

impl Strategy for Human {
    fn name(&self) -> String {
        "human".into()
    }

    fn next_move(&self, state: &GameState) -> Result<Option<Move>> {
        let stdin = io::stdin();
        let mut err = io::stderr();
        loop {
            let b = state.current_ball();
            let _ = writeln!(
                err,
                "round {} · {} to move · B = center {:?}, radius {}",
                state.round(),
                state.to_move(),
                b.center,
                b.radius
            );
            if let Some(p) = state.pending() {
                let _ = writeln!(err, "pending: {}", serde_json::to_string(p).unwrap_or_default());
            }
            let _ = write!(err, "> ");
            let _ = err.flush();
            let mut line = String::new();
            match stdin.lock().read_line(&mut line) {
                Ok(0) | Err(_) => return Ok(None),
                Ok(_) => {}
            }
            if line.trim().is_empty() {
                continue;
            }
            match parse_move(&line, state) {
                Err(e) => {
                    let _ = writeln!(err, "cannot parse move: {e}");
                }
                Ok(mv) => match apply_move(state, &mv) {
                    Ok(_) => return Ok(Some(mv)),
                    Err(e) => {
                        let _ = writeln!(err, "rejected [{}]: {e}", e.rule());
                    }
                },
            }
        }
    }
}
