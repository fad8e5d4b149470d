//! The per-session actor: reads client frames, runs turns and streams
//! chunks, paced by their pauses and cancelled by barge-in.
//!
//! One task owns the session, so sending a chunk and noticing a barge-in
//! never race: whichever the task reaches first happens first.

use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use getgoing_core::delivery::DeliveryMode;
use tokio::sync::mpsc;
use tokio::time::{sleep_until, Instant};

use crate::log::Direction;
use crate::session::{Chunk, Session, SessionParams, Shared, Turn};
use crate::wire::{WireError, WireMessage, DIALOG_ENDED, NO_SESSION, SESSION_EXISTS};

pub type Inbound = Result<WireMessage, WireError>;

const CHANNEL_DEPTH: usize = 64;

/// Settings shared by every session a server runs.
#[derive(Debug)]
pub struct Service {
    pub shared: Arc<Shared>,
    /// Where finished sessions are written.
    pub logs: Option<PathBuf>,
    /// Fixed start clock; otherwise the wall clock.
    pub clock: Option<u32>,
    /// Fixed sampling seed; otherwise random per session.
    pub seed: Option<u64>,
    /// Wait each chunk's pause before sending the next.
    pub pace: bool,
    assigned: AtomicU64,
}

impl Service {
    pub fn new(shared: Arc<Shared>) -> Self {
        Service {
            shared,
            logs: None,
            clock: None,
            seed: None,
            pace: true,
            assigned: AtomicU64::new(0),
        }
    }

    pub fn with_logs(mut self, dir: PathBuf) -> Self {
        self.logs = Some(dir);
        self
    }

    pub fn with_clock(mut self, minutes: u32) -> Self {
        self.clock = Some(minutes);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_pacing(mut self, pace: bool) -> Self {
        self.pace = pace;
        self
    }

    /// Modes for sessions that do not ask for one alternate, SeTD first.
    pub fn assign_mode(&self) -> DeliveryMode {
        match self.assigned.fetch_add(1, Ordering::Relaxed) % 2 {
            0 => DeliveryMode::SeTD,
            _ => DeliveryMode::SD,
        }
    }

    fn params(
        &self,
        mode: Option<DeliveryMode>,
        client_id: &str,
        clock: Option<u32>,
    ) -> SessionParams {
        let mode = mode.unwrap_or_else(|| self.assign_mode());
        let clock = clock.or(self.clock).unwrap_or_else(wall_clock);
        let seed = self.seed.unwrap_or_else(rand::random);
        SessionParams::new(client_id, mode, clock, seed)
    }
}

/// Minutes since local midnight.
pub fn wall_clock() -> u32 {
    use chrono::Timelike;
    let now = chrono::Local::now();
    now.hour() * 60 + now.minute()
}

/// Both ends of an in-process connection to a session actor.
pub struct Connection {
    pub tx: mpsc::Sender<Inbound>,
    pub rx: mpsc::Receiver<WireMessage>,
}

/// Spawn a session actor on the current runtime.
pub fn connect(service: Arc<Service>) -> Connection {
    let (in_tx, in_rx) = mpsc::channel(CHANNEL_DEPTH);
    let (out_tx, out_rx) = mpsc::channel(CHANNEL_DEPTH);
    tokio::spawn(run_session(service, in_rx, out_tx));
    Connection {
        tx: in_tx,
        rx: out_rx,
    }
}

struct Stream {
    pending: VecDeque<Chunk>,
    due: Instant,
    ends: bool,
}

struct Actor {
    service: Arc<Service>,
    out: mpsc::Sender<WireMessage>,
    session: Option<Session>,
    stream: Option<Stream>,
    closed: bool,
}

impl Actor {
    async fn send(&mut self, msg: WireMessage) {
        if let Some(s) = &mut self.session {
            s.record(Direction::Server, &msg);
        }
        if self.out.send(msg).await.is_err() {
            self.closed = true;
        }
    }

    /// Start streaming a turn. Its first chunk goes out at once.
    async fn begin(&mut self, turn: Turn) {
        self.stream = Some(Stream {
            pending: turn.chunks().into(),
            due: Instant::now(),
            ends: turn.ends,
        });
        self.next_chunk().await;
    }

    /// Close the current turn, dropping whatever was not sent yet.
    async fn end_turn(&mut self) {
        if let Some(stream) = self.stream.take() {
            self.send(WireMessage::TurnEnd {}).await;
            if stream.ends {
                self.send(WireMessage::DialogEnd {}).await;
                self.closed = true;
            }
        }
    }

    async fn next_chunk(&mut self) {
        let pace = self.service.pace;
        let Some(stream) = &mut self.stream else {
            return;
        };
        let Some(chunk) = stream.pending.pop_front() else {
            return self.end_turn().await;
        };
        let wait = if pace { chunk.break_ms } else { 0 };
        stream.due = Instant::now() + Duration::from_millis(u64::from(wait));
        let last = stream.pending.is_empty();
        self.send(chunk.into()).await;
        if last {
            self.end_turn().await;
        }
    }

    async fn on_message(&mut self, msg: Inbound) {
        let msg = match msg {
            Ok(m) => m,
            Err(e) => {
                if let Some(s) = &mut self.session {
                    s.record(Direction::Client, &serde_json::json!({ "rejected": e.0 }));
                }
                return self.send(e.to_message()).await;
            }
        };
        match msg {
            WireMessage::Start {
                mode,
                client_id,
                clock,
            } => {
                if self.session.is_some() {
                    return self
                        .send(WireMessage::error(
                            SESSION_EXISTS,
                            "session already started",
                        ))
                        .await;
                }
                let params = self.service.params(mode, &client_id, clock);
                let (mut session, turn) = Session::open(self.service.shared.clone(), params);
                session.record(
                    Direction::Client,
                    &WireMessage::Start {
                        mode,
                        client_id: session.header().caller_id_hash.clone(),
                        clock,
                    },
                );
                let reply = WireMessage::Session {
                    session_id: session.id().to_string(),
                    mode: session.mode(),
                };
                tracing::info!(session = %session.id(), mode = %session.mode(), "session opened");
                self.session = Some(session);
                self.send(reply).await;
                self.begin(turn).await;
            }
            WireMessage::Utterance { text } => {
                let Some(session) = &self.session else {
                    return self
                        .send(WireMessage::error(NO_SESSION, "send start first"))
                        .await;
                };
                if session.ended() {
                    return self
                        .send(WireMessage::error(DIALOG_ENDED, "the dialog is over"))
                        .await;
                }
                self.end_turn().await;
                if self.closed {
                    return;
                }
                let turn = self.session.as_mut().unwrap().handle_utterance(&text);
                self.begin(turn).await;
            }
            WireMessage::BargeIn {} => {
                if let Some(s) = &mut self.session {
                    s.record(Direction::Client, &WireMessage::BargeIn {});
                }
                self.end_turn().await;
            }
            other => {
                let e = WireError(format!("{} is not a client message", other.kind()));
                self.send(e.to_message()).await;
            }
        }
    }

    fn persist(&self) {
        let (Some(dir), Some(session)) = (&self.service.logs, &self.session) else {
            return;
        };
        match session.log().save(dir) {
            Ok(path) => {
                tracing::info!(session = %session.id(), path = %path.display(), "log written")
            }
            Err(e) => tracing::error!(session = %session.id(), error = %e, "could not write log"),
        }
    }
}

/// Serve one client until the dialog ends or the client goes away, then
/// write the session log.
pub async fn run_session(
    service: Arc<Service>,
    mut inbound: mpsc::Receiver<Inbound>,
    out: mpsc::Sender<WireMessage>,
) {
    let mut actor = Actor {
        service,
        out,
        session: None,
        stream: None,
        closed: false,
    };
    while !actor.closed {
        let due = actor.stream.as_ref().map(|s| s.due);
        tokio::select! {
            biased;
            msg = inbound.recv() => match msg {
                Some(msg) => actor.on_message(msg).await,
                None => break,
            },
            _ = sleep_until(due.unwrap_or_else(Instant::now)), if due.is_some() => actor.next_chunk().await,
        }
    }
    actor.persist();
}
