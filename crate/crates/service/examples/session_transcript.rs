//! A scripted session end to end: tag, plan, render, log, replay.
//!
//! cargo run --release --example session_transcript -- [setd|sd] [model.json]
//!
//! Without a model file a tagger is trained on the built-in grammar first.

use std::fs::File;
use std::io::BufReader;
use std::sync::Arc;

use getgoing_core::assets;
use getgoing_core::delivery::DeliveryMode;
use getgoing_core::nlu::{expand_templates, train_tagger, ExpandConfig, TaggerModel};
use getgoing_service::{replay, Session, SessionParams, Shared};

const SCRIPT: &[&str] = &[
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

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mode: DeliveryMode = args.next().as_deref().unwrap_or("setd").parse()?;
    let model = match args.next() {
        Some(path) => TaggerModel::load(BufReader::new(File::open(path)?))?,
        None => {
            eprintln!("training a tagger on the built-in grammar...");
            let data = expand_templates(
                &assets::templates()?,
                &assets::lexicon()?,
                ExpandConfig::default(),
            )?;
            train_tagger(&data, 10, 0)?
        }
    };
    let shared = Arc::new(Shared::with_demo_data(model)?);

    let params = SessionParams::new("example-caller", mode, 16 * 60 + 45, 11);
    let (mut session, welcome) = Session::open(shared.clone(), params);
    println!(
        "[{} chunks] system: {}",
        welcome.chunks().len(),
        welcome.plain_text()
    );
    for line in SCRIPT {
        if session.ended() {
            break;
        }
        println!("user: {line}");
        let turn = session.handle_utterance(line);
        println!(
            "[{} chunks] system: {}",
            turn.chunks().len(),
            turn.plain_text()
        );
    }

    let log = session.log();
    let dir = std::env::temp_dir();
    let path = log.save(&dir)?;
    println!("\nlog: {}", path.display());
    let report = replay(shared, &log);
    println!(
        "replayed {} turns: {}",
        report.actual.len(),
        if report.identical() {
            "identical"
        } else {
            "DIFFERENT"
        }
    );
    Ok(())
}
