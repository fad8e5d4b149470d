#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use getgoing_core::assets;
use getgoing_core::nlu::{expand_templates, train_tagger, ExpandConfig};
use getgoing_service::{Shared, WireMessage};
use tokio::sync::mpsc;

pub const CLIENT_ID: &str = "caller-412-555-0199";

/// Eleven user turns: trip specs, then every step of a five-step ride with
/// one repeat and one pause. With the welcome that is twelve system turns.
pub const HAPPY_PATH: &[&str] = &[
    "I want to go to Liberty and Sixth",
    "I'm leaving from the South Side",
    "at 5 pm",
    "by bus",
    "okay",
    "repeat that",
    "next step",
    "hold on",
    "I'm done",
    "go on",
    "okay",
];

/// The shipped data with a tagger trained on the default expansion.
pub fn shared() -> Arc<Shared> {
    static SHARED: OnceLock<Arc<Shared>> = OnceLock::new();
    SHARED
        .get_or_init(|| {
            let data = expand_templates(
                &assets::templates().unwrap(),
                &assets::lexicon().unwrap(),
                ExpandConfig::default(),
            )
            .unwrap();
            Arc::new(Shared::with_demo_data(train_tagger(&data, 10, 0).unwrap()).unwrap())
        })
        .clone()
}

pub fn start(mode: Option<&str>, clock: Option<u32>) -> WireMessage {
    WireMessage::Start {
        mode: mode.map(|m| m.parse().unwrap()),
        client_id: CLIENT_ID.into(),
        clock,
    }
}

/// Messages up to and including the next turn_end.
pub async fn turn(rx: &mut mpsc::Receiver<WireMessage>) -> Vec<WireMessage> {
    let mut out = Vec::new();
    while let Some(msg) = rx.recv().await {
        let done = msg == WireMessage::TurnEnd {};
        out.push(msg);
        if done {
            break;
        }
    }
    out
}

pub fn texts(msgs: &[WireMessage]) -> Vec<&str> {
    msgs.iter()
        .filter_map(|m| match m {
            WireMessage::Chunk { text, .. } => Some(text.as_str()),
            _ => None,
        })
        .collect()
}
