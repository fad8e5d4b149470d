//! Per-session JSON Lines logs: a header line, then one line per event.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use getgoing_core::delivery::DeliveryMode;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const LOG_FORMAT: &str = "getgoing-log/1";

#[derive(Debug, Error)]
pub enum LogError {
    #[error("log line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("log is empty")]
    Empty,
    #[error("log format {0:?} is not {LOG_FORMAT}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Hex SHA-256 of a client identifier. Logs only ever hold this.
pub fn caller_hash(client_id: &str) -> String {
    hex::encode(Sha256::digest(client_id.as_bytes()))
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub session_id: String,
    pub caller_id_hash: String,
    pub mode: DeliveryMode,
    /// Minutes since midnight.
    pub clock: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// A user utterance, as text.
    User,
    /// One full system turn, as rendered before streaming.
    System,
    /// Any other client frame.
    Client,
    /// A frame sent to the client.
    Server,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub ts: u64,
    pub direction: Direction,
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserEvent {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemEvent {
    pub turn: u32,
    pub text: String,
    pub ssml: String,
    pub end: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub header: LogHeader,
    pub events: Vec<LogEvent>,
}

impl SessionLog {
    pub fn file_name(&self) -> String {
        format!("{}.jsonl", self.header.session_id)
    }

    pub fn write<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        serde_json::to_writer(&mut out, &self.header)?;
        out.write_all(b"\n")?;
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    /// Write `<dir>/<session_id>.jsonl`, replacing any earlier checkpoint.
    pub fn save(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join(self.file_name());
        self.write(File::create(&path)?)?;
        Ok(path)
    }

    pub fn read<R: BufRead>(input: R) -> Result<SessionLog, LogError> {
        let mut lines = input.lines().enumerate();
        let (_, first) = lines.next().ok_or(LogError::Empty)?;
        let header: LogHeader = serde_json::from_str(&first?).map_err(|e| LogError::Line {
            line: 1,
            reason: e.to_string(),
        })?;
        if header.format != LOG_FORMAT {
            return Err(LogError::Format(header.format));
        }
        let mut events = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            events.push(serde_json::from_str(&line).map_err(|e| LogError::Line {
                line: i + 1,
                reason: e.to_string(),
            })?);
        }
        Ok(SessionLog { header, events })
    }

    pub fn load(path: &Path) -> Result<SessionLog, LogError> {
        SessionLog::read(BufReader::new(File::open(path)?))
    }

    fn payloads<T: for<'de> Deserialize<'de>>(
        &self,
        direction: Direction,
    ) -> impl Iterator<Item = T> + '_ {
        self.events
            .iter()
            .filter(move |e| e.direction == direction)
            .filter_map(|e| serde_json::from_value(e.payload.clone()).ok())
    }

    pub fn user_utterances(&self) -> Vec<String> {
        self.payloads::<UserEvent>(Direction::User)
            .map(|u| u.text)
            .collect()
    }

    pub fn system_turns(&self) -> Vec<SystemEvent> {
        self.payloads(Direction::System).collect()
    }
}

/// Create the log directory if needed and make sure it takes writes.
pub fn check_log_dir(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".write-probe");
    File::create(&probe)?.write_all(b"ok")?;
    fs::remove_file(probe)
}
