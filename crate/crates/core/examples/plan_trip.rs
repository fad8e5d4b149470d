//! Plan a trip on the built-in Pittsburgh map and read it out step by step.
//!
//! cargo run --example plan_trip -- "squirrel hill" "the airport" "8:30 am"

use getgoing_core::assets;
use getgoing_core::directions::{plan_driving, plan_transit, resolve_location, steps_to_language};
use getgoing_core::nlu::{format_clock, parse_time};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let from = args.next().unwrap_or_else(|| "CMU".into());
    let to = args.next().unwrap_or_else(|| "downtown".into());
    let when = args.next().unwrap_or_else(|| "5 pm".into());

    let map = assets::demo_map()?;
    let from = resolve_location(&map, &from)?;
    let to = resolve_location(&map, &to)?;
    println!(
        "{} ({:?}) to {} ({:?})",
        from.place.canonical_name, from.kind, to.place.canonical_name, to.kind
    );
    let depart = parse_time(&when)?.resolve(17 * 60);

    for (i, it) in plan_transit(&map, from.place, to.place, depart, 3)
        .iter()
        .enumerate()
    {
        println!(
            "\nbus option {}: {} to {}, {} min, lines {:?}",
            i + 1,
            format_clock(it.depart()),
            format_clock(it.arrive()),
            it.total_minutes,
            it.line_sequence()
        );
        for step in steps_to_language(it) {
            println!("  - {}", step.text);
        }
    }

    let drive = plan_driving(&map, from.place, to.place, depart)?;
    println!("\ndriving: {} min", drive.total_minutes);
    for step in steps_to_language(&drive) {
        println!("  - {}", step.text);
    }
    Ok(())
}
