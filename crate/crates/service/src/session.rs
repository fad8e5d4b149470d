//! One dialog per session: text in, rendered system turns out.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use getgoing_core::assets;
use getgoing_core::delivery::{
    join, plain_text, to_ssml, Bindings, DeliveryMode, MarkupDoc, PromptBank,
};
use getgoing_core::dialog::EngineOutput;
use getgoing_core::directions::MapDataset;
use getgoing_core::nlu::{understand, TaggerModel};
use getgoing_core::trip::{render_output, TripDialog};
use serde::Serialize;
use thiserror::Error;

use crate::log::{
    caller_hash, now_ms, Direction, LogEvent, LogHeader, SessionLog, SystemEvent, UserEvent,
    LOG_FORMAT,
};
use crate::wire::WireMessage;

pub const APOLOGY: &str = "apology";
const FALLBACK_APOLOGY: &str = "Sorry, something went wrong. Please try again.";

#[derive(Debug, Error)]
pub enum SetupError {
    #[error(transparent)]
    Delivery(#[from] getgoing_core::delivery::DeliveryError),
    #[error(transparent)]
    Directions(#[from] getgoing_core::directions::DirectionsError),
}

/// Read-only data every session uses.
#[derive(Debug)]
pub struct Shared {
    pub model: TaggerModel,
    pub bank: PromptBank,
    pub map: Arc<MapDataset>,
}

impl Shared {
    pub fn new(model: TaggerModel, bank: PromptBank, map: MapDataset) -> Self {
        Shared {
            model,
            bank,
            map: Arc::new(map),
        }
    }

    /// The given tagger with the shipped prompts and demo map.
    pub fn with_demo_data(model: TaggerModel) -> Result<Self, SetupError> {
        Ok(Shared::new(
            model,
            assets::prompt_bank()?,
            assets::demo_map()?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionParams {
    pub session_id: String,
    pub caller_id_hash: String,
    pub mode: DeliveryMode,
    pub clock: u32,
    pub seed: u64,
}

impl SessionParams {
    /// Hashes `client_id`; the raw identifier is not kept.
    pub fn new(client_id: &str, mode: DeliveryMode, clock: u32, seed: u64) -> Self {
        SessionParams {
            session_id: uuid::Uuid::new_v4().to_string(),
            caller_id_hash: caller_hash(client_id),
            mode,
            clock,
            seed,
        }
    }
}

/// A piece of a system turn, ending at a pause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub seq: u32,
    pub ssml: String,
    pub text: String,
    pub break_ms: u32,
}

impl From<Chunk> for WireMessage {
    fn from(c: Chunk) -> Self {
        WireMessage::Chunk {
            seq: c.seq,
            ssml: c.ssml,
            text: c.text,
            break_ms: c.break_ms,
        }
    }
}

/// Split a document at its pauses; each chunk carries the pause after it.
pub fn chunk_doc(doc: &MarkupDoc) -> Vec<Chunk> {
    doc.chunks()
        .into_iter()
        .enumerate()
        .map(|(i, (part, break_ms))| Chunk {
            seq: i as u32,
            ssml: to_ssml(&part),
            text: plain_text(&part),
            break_ms,
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Turn {
    pub index: u32,
    pub output: EngineOutput,
    pub doc: MarkupDoc,
    /// The dialog is over after this turn.
    pub ends: bool,
}

impl Turn {
    pub fn chunks(&self) -> Vec<Chunk> {
        chunk_doc(&self.doc)
    }

    pub fn plain_text(&self) -> String {
        plain_text(&self.doc)
    }
}

pub struct Session {
    shared: Arc<Shared>,
    header: LogHeader,
    trip: TripDialog,
    events: Vec<LogEvent>,
    turns: u32,
}

impl Session {
    /// Start the dialog. The returned turn is the welcome.
    pub fn open(shared: Arc<Shared>, params: SessionParams) -> (Session, Turn) {
        let header = LogHeader {
            format: LOG_FORMAT.to_string(),
            session_id: params.session_id,
            caller_id_hash: params.caller_id_hash,
            mode: params.mode,
            clock: params.clock,
            seed: params.seed,
        };
        let trip = TripDialog::new(shared.map.clone(), params.clock);
        let mut session = Session {
            shared,
            header,
            trip,
            events: Vec::new(),
            turns: 0,
        };
        let turn = session.run(|trip| trip.start());
        (session, turn)
    }

    pub fn id(&self) -> &str {
        &self.header.session_id
    }

    pub fn mode(&self) -> DeliveryMode {
        self.header.mode
    }

    pub fn header(&self) -> &LogHeader {
        &self.header
    }

    pub fn trip(&self) -> &TripDialog {
        &self.trip
    }

    pub fn ended(&self) -> bool {
        self.trip.ended()
    }

    pub fn handle_utterance(&mut self, text: &str) -> Turn {
        self.record(
            Direction::User,
            &UserEvent {
                text: text.to_string(),
            },
        );
        let shared = self.shared.clone();
        self.run(|trip| trip.handle_slots(understand(&shared.model, text)))
    }

    fn run(&mut self, step: impl FnOnce(&mut TripDialog) -> EngineOutput) -> Turn {
        let trip = &mut self.trip;
        let (output, doc) = match catch_unwind(AssertUnwindSafe(|| step(trip))) {
            Ok(output) => match self.render(&output) {
                Ok(doc) => (output, doc),
                Err(e) => {
                    tracing::warn!(session = %self.header.session_id, error = %e, "render failed");
                    (output, self.apology())
                }
            },
            Err(_) => {
                tracing::error!(session = %self.header.session_id, "dialog turn panicked");
                (EngineOutput::default(), self.apology())
            }
        };
        let turn = Turn {
            index: self.turns,
            ends: output.ends(),
            output,
            doc,
        };
        self.turns += 1;
        self.record(
            Direction::System,
            &SystemEvent {
                turn: turn.index,
                text: turn.plain_text(),
                ssml: to_ssml(&turn.doc),
                end: turn.ends,
            },
        );
        turn
    }

    fn render(
        &self,
        output: &EngineOutput,
    ) -> Result<MarkupDoc, getgoing_core::delivery::DeliveryError> {
        let extra = Bindings::new().set("color", self.header.mode.color());
        let docs = render_output(
            &self.shared.bank,
            output,
            &extra,
            self.header.mode,
            self.header.seed,
        )?;
        Ok(join(&docs, self.header.mode))
    }

    fn apology(&self) -> MarkupDoc {
        self.shared
            .bank
            .render(
                APOLOGY,
                &Bindings::new(),
                self.header.mode,
                self.header.seed,
            )
            .unwrap_or_else(|_| {
                let mut doc = MarkupDoc::new();
                doc.text(FALLBACK_APOLOGY);
                doc
            })
    }

    /// Append an event to the transcript.
    pub fn record(&mut self, direction: Direction, payload: &impl Serialize) {
        self.events.push(LogEvent {
            ts: now_ms(),
            direction,
            payload: serde_json::to_value(payload).expect("log payloads serialize"),
        });
    }

    pub fn log(&self) -> SessionLog {
        SessionLog {
            header: self.header.clone(),
            events: self.events.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub expected: Vec<String>,
    pub actual: Vec<String>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.expected == self.actual
    }

    /// Index of the first turn whose text differs.
    pub fn first_mismatch(&self) -> Option<usize> {
        let n = self.expected.len().max(self.actual.len());
        (0..n).find(|&i| self.expected.get(i) != self.actual.get(i))
    }
}

/// Feed a log's user utterances through a fresh session with the same
/// mode, clock and seed, and compare system turn text.
pub fn replay(shared: Arc<Shared>, log: &SessionLog) -> ReplayReport {
    let h = &log.header;
    let params = SessionParams {
        session_id: format!("{}-replay", h.session_id),
        caller_id_hash: h.caller_id_hash.clone(),
        mode: h.mode,
        clock: h.clock,
        seed: h.seed,
    };
    let (mut session, welcome) = Session::open(shared, params);
    let mut actual = vec![welcome.plain_text()];
    for text in log.user_utterances() {
        actual.push(session.handle_utterance(&text).plain_text());
    }
    ReplayReport {
        expected: log.system_turns().into_iter().map(|t| t.text).collect(),
        actual,
    }
}
