//! The same prompts rendered in both delivery modes, as SSML and as text.

use getgoing_core::assets;
use getgoing_core::delivery::{plain_text, to_ssml, Bindings, DeliveryMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bank = assets::prompt_bank()?;
    let step = Bindings::new()
        .set(
            "instruction",
            "Take the 61C bus from Forbes Avenue and Murray Avenue toward Downtown, departing at 10:19 am.",
        )
        .emphasize("61C")
        .emphasize("Forbes Avenue")
        .emphasize("Murray Avenue")
        .emphasize("10:19 am");
    let welcome = Bindings::new().set("color", "orange");

    for (key, b) in [("welcome", &welcome), ("step", &step)] {
        for mode in [DeliveryMode::SD, DeliveryMode::SeTD] {
            let doc = bank.render(key, b, mode, 3)?;
            println!("{key} / {mode}");
            println!("  text: {}", plain_text(&doc));
            println!("  ssml: {}", to_ssml(&doc));
        }
    }
    Ok(())
}
