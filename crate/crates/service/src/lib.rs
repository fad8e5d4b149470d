//! Session service for the GetGoing dialog system.
//!
//! A [`Session`] runs one trip dialog: user text goes through the tagger and
//! the dialog engine, and each system turn comes back as rendered speech
//! markup. [`stream::run_session`] drives a session over the [`WireMessage`]
//! protocol, streaming each turn in chunks that a barge-in can cut short.
//! [`net`] puts that on a WebSocket and on newline-delimited TCP, and
//! [`log`] writes and replays per-session logs.

pub mod chat;
pub mod cli;
pub mod log;
pub mod net;
pub mod session;
pub mod stream;
pub mod wire;

pub use log::{caller_hash, SessionLog};
pub use session::{chunk_doc, replay, Chunk, ReplayReport, Session, SessionParams, Shared, Turn};
pub use stream::{connect, run_session, Connection, Inbound, Service};
pub use wire::WireMessage;
