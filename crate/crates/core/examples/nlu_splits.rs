//! Unseen-slot and unseen-template experiments on the shipped grammar.
//!
//! cargo run --release --example nlu_splits -- [seed] [epochs] [word-dropout]

use std::time::Instant;

use getgoing_core::assets;
use getgoing_core::nlu::{
    evaluate_tagger, make_splits, train_tagger_with, SplitConfig, TrainConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let epochs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let mut config = TrainConfig::new(epochs, seed);
    if let Some(p) = args.next() {
        config.word_dropout = p.parse()?;
    }

    let templates = assets::templates()?;
    let lexicon = assets::lexicon()?;
    let start = Instant::now();
    let splits = make_splits(&templates, &lexicon, SplitConfig::with_seed(seed))?;
    println!(
        "train {}  unseen-slots {}  unseen-templates {}",
        splits.train.len(),
        splits.unseen_slots.len(),
        splits.unseen_templates.len()
    );
    let model = train_tagger_with(&splits.train, config)?;
    for (name, set) in [
        ("train", &splits.train),
        ("unseen slots", &splits.unseen_slots),
        ("unseen templates", &splits.unseen_templates),
    ] {
        let s = evaluate_tagger(&model, set)?;
        println!(
            "{name:>17}: token accuracy {:.4}  slot F1 {:.4}",
            s.token_accuracy, s.slot_f1
        );
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
