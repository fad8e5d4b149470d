//! JSON messages exchanged with a client, one object per frame.

use getgoing_core::delivery::DeliveryMode;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BAD_MESSAGE: &str = "bad_message";
pub const NO_SESSION: &str = "no_session";
pub const SESSION_EXISTS: &str = "session_exists";
pub const DIALOG_ENDED: &str = "dialog_ended";

const MINUTES_PER_DAY: u32 = 24 * 60;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WireMessage {
    // client to server
    Start {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<DeliveryMode>,
        client_id: String,
        /// Minutes since midnight.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        clock: Option<u32>,
    },
    Utterance {
        text: String,
    },
    BargeIn {},

    // server to client
    Session {
        session_id: String,
        mode: DeliveryMode,
    },
    Chunk {
        seq: u32,
        ssml: String,
        text: String,
        break_ms: u32,
    },
    TurnEnd {},
    DialogEnd {},
    Error {
        code: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct WireError(pub String);

impl WireError {
    pub fn to_message(&self) -> WireMessage {
        WireMessage::error(BAD_MESSAGE, &self.0)
    }
}

impl WireMessage {
    /// Parse one frame sent by a client. Unknown fields are ignored; unknown
    /// or server-only variants are rejected.
    pub fn parse_client(frame: &str) -> Result<WireMessage, WireError> {
        let msg: WireMessage = serde_json::from_str(frame).map_err(|e| WireError(e.to_string()))?;
        if !msg.is_client() {
            return Err(WireError(format!("{} is not a client message", msg.kind())));
        }
        if let WireMessage::Start { clock: Some(c), .. } = msg {
            if c >= MINUTES_PER_DAY {
                return Err(WireError(format!("clock {c} is not a minute of the day")));
            }
        }
        Ok(msg)
    }

    pub fn error(code: &str, message: impl Into<String>) -> WireMessage {
        WireMessage::Error {
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn is_client(&self) -> bool {
        matches!(
            self,
            WireMessage::Start { .. } | WireMessage::Utterance { .. } | WireMessage::BargeIn {}
        )
    }

    /// The `type` tag.
    pub fn kind(&self) -> &'static str {
        match self {
            WireMessage::Start { .. } => "start",
            WireMessage::Utterance { .. } => "utterance",
            WireMessage::BargeIn {} => "barge_in",
            WireMessage::Session { .. } => "session",
            WireMessage::Chunk { .. } => "chunk",
            WireMessage::TurnEnd {} => "turn_end",
            WireMessage::DialogEnd {} => "dialog_end",
            WireMessage::Error { .. } => "error",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("wire messages always serialize")
    }
}
