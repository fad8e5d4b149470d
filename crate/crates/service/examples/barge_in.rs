//! Stream the SeTD welcome in real time and cut it off after two chunks,
//! then speak over the reply as well.
//!
//! cargo run --release --example barge_in

use std::sync::Arc;
use std::time::Instant;

use getgoing_core::assets;
use getgoing_core::nlu::{expand_templates, train_tagger, ExpandConfig, Sampling};
use getgoing_service::{connect, Service, Shared, WireMessage};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExpandConfig {
        sampling: Sampling::PerTemplate(150),
        seed: 1,
        noise: 300,
    };
    let data = expand_templates(&assets::templates()?, &assets::lexicon()?, config)?;
    let shared = Shared::with_demo_data(train_tagger(&data, 6, 1)?)?;
    let service = Arc::new(Service::new(Arc::new(shared)).with_clock(600).with_seed(11));

    let mut conn = connect(service);
    let t0 = Instant::now();
    conn.tx
        .send(Ok(WireMessage::Start {
            mode: Some("setd".parse()?),
            client_id: "example".into(),
            clock: None,
        }))
        .await?;

    let mut chunks = 0;
    let mut spoke = false;
    while let Some(msg) = conn.rx.recv().await {
        let ms = t0.elapsed().as_millis();
        match &msg {
            WireMessage::Chunk {
                seq,
                text,
                break_ms,
                ..
            } => {
                println!("{ms:>6} ms  chunk {seq}  {text:?}  then {break_ms} ms");
                chunks += 1;
            }
            other => println!("{ms:>6} ms  {}", other.to_json()),
        }
        if chunks == 2 && !spoke {
            println!("{ms:>6} ms  >> barge_in");
            conn.tx.send(Ok(WireMessage::BargeIn {})).await?;
            println!("{ms:>6} ms  >> \"I want to go to the airport\"");
            conn.tx
                .send(Ok(WireMessage::Utterance {
                    text: "I want to go to the airport".into(),
                }))
                .await?;
            spoke = true;
        }
        if spoke && msg == (WireMessage::TurnEnd {}) && chunks > 2 {
            break;
        }
    }
    Ok(())
}
