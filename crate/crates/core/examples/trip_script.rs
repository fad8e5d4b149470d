//! Drive the trip dialog with hand-made slot fills, no tagger involved,
//! and print what the system would say in SD mode.

use std::sync::Arc;

use getgoing_core::assets;
use getgoing_core::delivery::{join, plain_text, Bindings, DeliveryMode};
use getgoing_core::dialog::{ConceptValue, Fill};
use getgoing_core::nlu::{SlotKey, TimeSpec};
use getgoing_core::trip::{render_output, TripDialog};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use SlotKey::*;
    let bank = assets::prompt_bank()?;
    let map = Arc::new(assets::demo_map()?);
    let mut dialog = TripDialog::new(map, 16 * 60 + 45);
    let extra = Bindings::new().set("color", DeliveryMode::SD.color());

    let script: Vec<(&str, Vec<Fill>)> = vec![
        (
            "I'm going to Liberty and Sixth at 5 pm",
            vec![
                Fill::raw(Aloc, "liberty and sixth"),
                Fill {
                    key: Time,
                    value: ConceptValue::Time(TimeSpec::ClockTime(17 * 60)),
                },
            ],
        ),
        (
            "from the south side",
            vec![Fill::raw(Dloc, "the south side")],
        ),
        ("by bus", vec![Fill::raw(Transit, "bus")]),
        ("okay", vec![Fill::raw(Continue, "okay")]),
        ("say that again", vec![Fill::raw(Repeat, "say that again")]),
        ("hold on", vec![Fill::raw(Pause, "hold on")]),
        ("go on", vec![Fill::raw(Continue, "go on")]),
        ("next", vec![Fill::raw(Continue, "next")]),
        ("next", vec![Fill::raw(Continue, "next")]),
        ("next", vec![Fill::raw(Continue, "next")]),
        ("okay", vec![Fill::raw(Continue, "okay")]),
    ];

    let say = |out: &_| -> Result<String, Box<dyn std::error::Error>> {
        let docs = render_output(&bank, out, &extra, DeliveryMode::SD, 0)?;
        Ok(plain_text(&join(&docs, DeliveryMode::SD)))
    };
    println!("system: {}", say(&dialog.start())?);
    for (user, fills) in script {
        if dialog.ended() {
            break;
        }
        let out = dialog.handle_turn(fills);
        println!("user:   {user}");
        println!("        {:?}", out.prompt_keys());
        println!("system: {}", say(&out)?);
    }
    Ok(())
}
