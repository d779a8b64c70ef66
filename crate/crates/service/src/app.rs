use std::collections::HashMap;
use std::io;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use oppenheim_core::games::{Move, Rule};
use serde_json::json;
use tokio::sync::Semaphore;

use crate::config::Config;
use crate::error::ApiError;
use crate::jobs::{failure, JobEvent, JobSpec, JobStatus, JobView};
use crate::now_ms;
use crate::sessions::{CreateSession, MoveResponse, Session, SessionEvent, SessionView};
use crate::store::{Collection, Store};

pub const IDEMPOTENCY_HEADER: &str = "idempotency-key";

/// Shared handle to sessions, jobs and the store.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    store: Store,
    /// Each session has a single writer: whoever holds its mutex.
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    session_keys: Mutex<HashMap<String, String>>,
    jobs: Mutex<HashMap<String, JobView>>,
    job_keys: Mutex<HashMap<String, String>>,
    workers: Arc<Semaphore>,
}

fn persist_err(e: io::Error) -> ApiError {
    ApiError::internal(format!("persistence failed: {e}"))
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    b.map(|Json(v)| v)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "malformed-request", e.body_text()))
}

fn idempotency_key(headers: &HeaderMap) -> Option<String> {
    headers.get(IDEMPOTENCY_HEADER).and_then(|v| v.to_str().ok()).map(str::to_string)
}

impl AppState {
    /// Opens the data directory and rebuilds every session and job from its
    /// log. Jobs that had not finished are queued again, so this must run
    /// inside a Tokio runtime.
    pub fn open(config: &Config) -> io::Result<AppState> {
        let store = Store::open(&config.data_dir)?;
        let mut sessions = HashMap::new();
        let mut session_keys = HashMap::new();
        for (id, events) in store.load::<SessionEvent>(Collection::Sessions)? {
            match events.and_then(|ev| Session::restore(&ev)) {
                Ok(s) => {
                    if let Some(k) = &s.idempotency_key {
                        session_keys.insert(k.clone(), s.id.clone());
                    }
                    sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
                }
                Err(e) => tracing::warn!(session = %id, "skipping unreadable session log: {e}"),
            }
        }
        let mut jobs = HashMap::new();
        let mut job_keys = HashMap::new();
        for (id, events) in store.load::<JobEvent>(Collection::Jobs)? {
            match events.and_then(|ev| fold_job(&ev)) {
                Ok((job, key)) => {
                    if let Some(k) = key {
                        job_keys.insert(k, job.id.clone());
                    }
                    jobs.insert(job.id.clone(), job);
                }
                Err(e) => tracing::warn!(job = %id, "skipping unreadable job log: {e}"),
            }
        }
        let unfinished: Vec<(String, JobSpec)> = jobs
            .values()
            .filter(|j| matches!(j.status, JobStatus::Queued | JobStatus::Running))
            .map(|j| (j.id.clone(), j.spec.clone()))
            .collect();
        let state = AppState {
            inner: Arc::new(Inner {
                store,
                sessions: RwLock::new(sessions),
                session_keys: Mutex::new(session_keys),
                jobs: Mutex::new(jobs),
                job_keys: Mutex::new(job_keys),
                workers: Arc::new(Semaphore::new(config.workers.max(1))),
            }),
        };
        for (id, spec) in unfinished {
            state.set_status(&id, JobStatus::Queued, None, None);
            state.launch(id, spec);
        }
        Ok(state)
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.inner
            .sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session", id))
    }

    fn record(&self, id: &str, at_ms: u64, record: &oppenheim_core::games::MoveRecord) -> Result<(), ApiError> {
        let ev = SessionEvent::Move {
            at_ms,
            record: record.clone(),
        };
        self.inner.store.append(Collection::Sessions, id, &ev).map_err(persist_err)
    }

    /// Creates a session, running the engine first if it plays Alice.
    /// Returns `false` with the existing session for a repeated key.
    pub fn create_session(&self, key: Option<String>, req: &CreateSession) -> Result<(bool, SessionView), ApiError> {
        let mut keys = self.inner.session_keys.lock().expect("key map poisoned");
        if let Some(existing) = key.as_ref().and_then(|k| keys.get(k)) {
            let s = self.session(existing)?;
            let view = s.lock().expect("session poisoned").view();
            return Ok((false, view));
        }
        let now = now_ms();
        let id = uuid::Uuid::new_v4().simple().to_string();
        let mut s =
            Session::create(id.clone(), now, key.clone(), req).map_err(|e| ApiError::kernel(StatusCode::BAD_REQUEST, &e))?;
        self.inner
            .store
            .append(Collection::Sessions, &id, &s.created_event(req))
            .map_err(persist_err)?;
        if let (Some(rec), _) = s.engine_turn(now) {
            self.record(&id, now, &rec)?;
        }
        let view = s.view();
        self.inner
            .sessions
            .write()
            .expect("session map poisoned")
            .insert(id.clone(), Arc::new(Mutex::new(s)));
        if let Some(k) = key {
            keys.insert(k, id);
        }
        Ok((true, view))
    }

    pub fn get_session(&self, id: &str) -> Result<SessionView, ApiError> {
        Ok(self.session(id)?.lock().expect("session poisoned").view())
    }

    /// Applies the remote player's move and, if accepted, the engine's reply.
    pub fn post_move(&self, id: &str, mv: Move) -> Result<MoveResponse, ApiError> {
        let arc = self.session(id)?;
        let mut s = arc.lock().expect("session poisoned");
        if s.state.is_over() {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                Rule::GameOver.as_str(),
                format!("session {id} is finished"),
            ));
        }
        if mv.player() != s.remote {
            return Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                Rule::TurnOrder.as_str(),
                format!("the remote side of session {id} is {}", s.remote),
            ));
        }
        let now = now_ms();
        let (rec, err) = s.play(mv, now);
        self.record(id, now, &rec)?;
        match err {
            Some(e) => Err(ApiError::kernel(StatusCode::UNPROCESSABLE_ENTITY, &e).with_detail(json!({ "record": rec }))),
            None => {
                let (reply, engine_error) = s.engine_turn(now);
                if let Some(r) = &reply {
                    self.record(id, now, r)?;
                }
                Ok(MoveResponse {
                    record: rec,
                    reply,
                    engine_error,
                    session: s.view(),
                })
            }
        }
    }

    /// Queues a job. Returns `false` with the existing job for a repeated key.
    pub fn submit_job(&self, key: Option<String>, spec: JobSpec) -> Result<(bool, JobView), ApiError> {
        let mut keys = self.inner.job_keys.lock().expect("key map poisoned");
        if let Some(existing) = key.as_ref().and_then(|k| keys.get(k)) {
            return Ok((false, self.get_job(existing)?));
        }
        let now = now_ms();
        let id = uuid::Uuid::new_v4().simple().to_string();
        let ev = JobEvent::Submitted {
            id: id.clone(),
            created_ms: now,
            job: spec.clone(),
            idempotency_key: key.clone(),
        };
        self.inner.store.append(Collection::Jobs, &id, &ev).map_err(persist_err)?;
        let view = JobView {
            id: id.clone(),
            spec: spec.clone(),
            status: JobStatus::Queued,
            result: None,
            error: None,
            created_ms: now,
            updated_ms: now,
        };
        self.inner.jobs.lock().expect("job map poisoned").insert(id.clone(), view.clone());
        if let Some(k) = key {
            keys.insert(k, id.clone());
        }
        drop(keys);
        self.launch(id, spec);
        Ok((true, view))
    }

    pub fn get_job(&self, id: &str) -> Result<JobView, ApiError> {
        self.inner
            .jobs
            .lock()
            .expect("job map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("job", id))
    }

    fn set_status(
        &self,
        id: &str,
        status: JobStatus,
        result: Option<serde_json::Value>,
        error: Option<crate::error::ErrorBody>,
    ) {
        let now = now_ms();
        let ev = match (status, &result, &error) {
            (JobStatus::Running, _, _) => Some(JobEvent::Running { at_ms: now }),
            (JobStatus::Done, Some(r), _) => Some(JobEvent::Done {
                at_ms: now,
                result: r.clone(),
            }),
            (JobStatus::Failed, _, Some(e)) => Some(JobEvent::Failed {
                at_ms: now,
                error: e.clone(),
            }),
            _ => None,
        };
        if let Some(ev) = ev {
            if let Err(e) = self.inner.store.append(Collection::Jobs, id, &ev) {
                tracing::error!(job = %id, "could not persist job status: {e}");
            }
        }
        if let Some(j) = self.inner.jobs.lock().expect("job map poisoned").get_mut(id) {
            j.status = status;
            j.result = result;
            j.error = error;
            j.updated_ms = now;
        }
    }

    /// Runs the job once a worker permit is free.
    fn launch(&self, id: String, spec: JobSpec) {
        let this = self.clone();
        tokio::spawn(async move {
            let _permit = this.inner.workers.clone().acquire_owned().await.expect("worker pool closed");
            this.set_status(&id, JobStatus::Running, None, None);
            match tokio::task::spawn_blocking(move || spec.run()).await {
                Ok(Ok(v)) => this.set_status(&id, JobStatus::Done, Some(v), None),
                Ok(Err(e)) => this.set_status(&id, JobStatus::Failed, None, Some(failure(&e))),
                Err(e) => this.set_status(
                    &id,
                    JobStatus::Failed,
                    None,
                    Some(crate::error::ErrorBody {
                        rule: "worker-panic".into(),
                        message: e.to_string(),
                        detail: serde_json::Value::Null,
                    }),
                ),
            }
        });
    }
}

fn fold_job(events: &[JobEvent]) -> Result<(JobView, Option<String>), String> {
    let Some(JobEvent::Submitted {
        id,
        created_ms,
        job,
        idempotency_key,
    }) = events.first()
    else {
        return Err("log does not start with a submission event".into());
    };
    let mut view = JobView {
        id: id.clone(),
        spec: job.clone(),
        status: JobStatus::Queued,
        result: None,
        error: None,
        created_ms: *created_ms,
        updated_ms: *created_ms,
    };
    for ev in &events[1..] {
        match ev {
            JobEvent::Running { at_ms } => {
                view.status = JobStatus::Running;
                view.updated_ms = *at_ms;
            }
            JobEvent::Done { at_ms, result } => {
                view.status = JobStatus::Done;
                view.result = Some(result.clone());
                view.updated_ms = *at_ms;
            }
            JobEvent::Failed { at_ms, error } => {
                view.status = JobStatus::Failed;
                view.error = Some(error.clone());
                view.updated_ms = *at_ms;
            }
            JobEvent::Submitted { .. } => return Err("duplicate submission event".into()),
        }
    }
    Ok((view, idempotency_key.clone()))
}

async fn create_session(
    State(app): State<AppState>,
    headers: HeaderMap,
    req: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req = body(req)?;
    let (fresh, view) = app.create_session(idempotency_key(&headers), &req)?;
    Ok((if fresh { StatusCode::CREATED } else { StatusCode::OK }, Json(view)))
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    app.get_session(&id).map(Json)
}

async fn post_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    mv: Result<Json<Move>, JsonRejection>,
) -> Result<Json<MoveResponse>, ApiError> {
    let mv = body(mv)?;
    app.post_move(&id, mv).map(Json)
}

async fn submit_job(
    State(app): State<AppState>,
    headers: HeaderMap,
    spec: Result<Json<JobSpec>, JsonRejection>,
) -> Result<(StatusCode, Json<JobView>), ApiError> {
    let spec = body(spec)?;
    let (fresh, view) = app.submit_job(idempotency_key(&headers), spec)?;
    Ok((if fresh { StatusCode::ACCEPTED } else { StatusCode::OK }, Json(view)))
}

async fn get_job(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<JobView>, ApiError> {
    app.get_job(&id).map(Json)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/jobs", post(submit_job))
        .route("/jobs/{id}", get(get_job))
        .with_state(state)
}

/// Opens the data directory and serves until the process is stopped.
pub async fn serve(config: Config) -> io::Result<()> {
    let state = AppState::open(&config)?;
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    tracing::info!(addr = %listener.local_addr()?, data = %config.data_dir.display(), workers = config.workers, "listening");
    axum::serve(listener, router(state)).await
}
