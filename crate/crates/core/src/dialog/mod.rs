//! A task-independent dialog engine.
//!
//! A [`TaskTree`] of agents is executed by in-order traversal: the engine
//! stops at the first incomplete leaf, speaks or calls out, and waits. User
//! turns may fill any concept active at the current node, so information
//! given early or out of turn completes later nodes before they are
//! reached. Step nodes deliver a list of instructions one at a time,
//! moving on only when the user says so.

mod engine;
mod tree;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nlu::{SlotFill, SlotKey, TimeSpec};

pub use engine::{
    control_slots, strongest_control, BindResult, DialogEngine, StepCursor, CONTROL_PRECEDENCE,
};
pub use tree::{AgentKind, AgentNode, TaskTree};

pub const PAUSE_ACK: &str = "pause_ack";
pub const STEP_REPROMPT: &str = "step_reprompt";
pub const NO_ALTERNATIVE: &str = "no_alternative";
pub const CLARIFY_SUFFIX: &str = ".clarify";
pub const HELP_SUFFIX: &str = ".help";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DialogError {
    #[error("no node with id {0:?}")]
    UnknownNode(String),
    #[error("node id {0:?} is used twice")]
    DuplicateId(String),
    #[error("node {id}: {reason}")]
    Invalid { id: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedPlace {
    /// What the user said.
    pub surface: String,
    pub id: String,
    pub name: String,
    /// Cross streets, for intersections.
    pub streets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum ConceptValue {
    Raw(String),
    Place(ResolvedPlace),
    Time(TimeSpec),
}

impl ConceptValue {
    /// How the value reads inside a prompt.
    pub fn display(&self) -> String {
        match self {
            ConceptValue::Raw(s) => s.clone(),
            ConceptValue::Place(p) => p.name.clone(),
            ConceptValue::Time(TimeSpec::Now) => "right now".to_string(),
            ConceptValue::Time(t) => t.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptEntry {
    pub value: ConceptValue,
    pub filled_at_turn: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptStore {
    entries: BTreeMap<SlotKey, ConceptEntry>,
}

impl ConceptStore {
    pub fn get(&self, key: SlotKey) -> Option<&ConceptEntry> {
        self.entries.get(&key)
    }

    pub fn value(&self, key: SlotKey) -> Option<&ConceptValue> {
        self.entries.get(&key).map(|e| &e.value)
    }

    pub fn contains(&self, key: SlotKey) -> bool {
        self.entries.contains_key(&key)
    }

    /// Replaces any earlier entry for the key.
    pub fn insert(&mut self, key: SlotKey, value: ConceptValue, turn: u32) {
        self.entries.insert(
            key,
            ConceptEntry {
                value,
                filled_at_turn: turn,
            },
        );
    }

    pub fn remove(&mut self, key: SlotKey) -> Option<ConceptEntry> {
        self.entries.remove(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SlotKey, &ConceptEntry)> {
        self.entries.iter().map(|(k, e)| (*k, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One concept value offered by a user turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fill {
    pub key: SlotKey,
    pub value: ConceptValue,
}

impl Fill {
    pub fn raw(key: SlotKey, surface: &str) -> Self {
        Fill {
            key,
            value: ConceptValue::Raw(surface.to_string()),
        }
    }
}

impl From<SlotFill> for Fill {
    fn from(f: SlotFill) -> Self {
        Fill {
            key: f.key,
            value: ConceptValue::Raw(f.surface),
        }
    }
}

/// Extra prompt values supplied by the task layer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payload {
    pub fields: BTreeMap<String, String>,
    pub emphasis: Vec<String>,
    /// Speak this prompt instead of the node's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_key: Option<String>,
}

impl Payload {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, name: &str, value: impl Into<String>) -> Self {
        self.fields.insert(name.to_string(), value.into());
        self
    }

    pub fn emphasize(mut self, term: impl Into<String>) -> Self {
        let term = term.into();
        if !term.is_empty() && !self.emphasis.contains(&term) {
            self.emphasis.push(term);
        }
        self
    }

    pub fn with_prompt(mut self, prompt_key: &str) -> Self {
        self.prompt_key = Some(prompt_key.to_string());
        self
    }
}

/// One instruction for a Step node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepItem {
    pub prompt_key: String,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Speak {
    pub prompt_key: String,
    pub node_id: String,
    /// Filled concepts active at the speaking node.
    pub concepts: BTreeMap<SlotKey, ConceptValue>,
    pub payload: Option<Payload>,
    /// Index into the step list, for step instructions.
    pub step: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Speak(Speak),
    CallExecutor {
        executor_ref: String,
        node_id: String,
    },
    /// The user asked for a different route during the steps.
    SwitchAlternative,
    EndDialog,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineOutput {
    pub actions: Vec<Action>,
}

impl EngineOutput {
    pub fn push(&mut self, action: Action) {
        self.actions.push(action);
    }

    pub fn extend(&mut self, other: EngineOutput) {
        self.actions.extend(other.actions);
    }

    pub fn speaks(&self) -> impl Iterator<Item = &Speak> {
        self.actions.iter().filter_map(|a| match a {
            Action::Speak(s) => Some(s),
            _ => None,
        })
    }

    pub fn prompt_keys(&self) -> Vec<&str> {
        self.speaks().map(|s| s.prompt_key.as_str()).collect()
    }

    pub fn ends(&self) -> bool {
        matches!(self.actions.last(), Some(Action::EndDialog))
    }
}
