//! Tag utterances with the slot tagger and show the slots they fill.
//!
//! cargo run --release --example tag_utterance -- "I'm going to CMU at 7 PM"
//!
//! Trains a small model on the shipped grammar first (a few seconds).

use getgoing_core::assets;
use getgoing_core::nlu::{
    expand_templates, parse_time, tag, train_tagger, understand, ExpandConfig, Sampling, SlotKey,
    Utterance,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut texts: Vec<String> = std::env::args().skip(1).collect();
    if texts.is_empty() {
        texts = [
            "I'm going to CMU at 7 PM",
            "I'm leaving from the airport",
            "No. I'm going to Forbes and Murray",
            "by bus please",
            "repeat that",
        ]
        .map(String::from)
        .to_vec();
    }

    let config = ExpandConfig {
        sampling: Sampling::PerTemplate(150),
        seed: 1,
        noise: 300,
    };
    let data = expand_templates(&assets::templates()?, &assets::lexicon()?, config)?;
    let model = train_tagger(&data, 6, 1)?;

    for text in &texts {
        let u = Utterance::new(text.clone());
        let tags = tag(&model, &u);
        println!("{text}");
        let row: Vec<String> = u
            .tokens
            .iter()
            .zip(&tags)
            .map(|(w, t)| format!("{w}/{t}"))
            .collect();
        println!("  {}", row.join(" "));
        for f in understand(&model, text) {
            let time = match f.key {
                SlotKey::Time => parse_time(&f.surface)
                    .map(|t| format!(" = {t:?}"))
                    .unwrap_or_default(),
                _ => String::new(),
            };
            println!("  {:<8} {:?}{time}", f.key.as_str(), f.surface);
        }
    }
    Ok(())
}
