//! HTTP facade over the game referee and the counting and lattice kernels.
//!
//! Game sessions pair a remote player with an engine strategy; jobs run
//! kernels on a bounded worker pool. Everything is persisted as append-only
//! JSONL under a data directory and rebuilt from it on startup.

mod app;
mod config;
mod error;
pub mod jobs;
mod sessions;
mod store;

pub use app::{router, serve, AppState};
pub use config::Config;
pub use error::{ApiError, ErrorBody};
pub use jobs::{FormSpec, JobSpec, JobStatus, JobView, LatticeSpec};
pub use sessions::{CreateSession, MoveResponse, SessionView};

use std::time::{SystemTime, UNIX_EPOCH};

pub(crate) fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}
