//! Independent checks on the two delivery modes, plus fixture bindings for
//! every prompt in the bank.

use std::sync::Arc;

use getgoing_core::assets;
use getgoing_core::delivery::{
    chosen_prefix, confirmation_wrap, plain_text, Bindings, DeliveryMode, MarkupDoc, PromptBank,
    Segment, CONFIRMATION_QUESTION, LONG_BREAK_MS, SHORT_BREAK_MS,
};
use getgoing_core::dialog::{ConceptValue, Fill};
use getgoing_core::nlu::{SlotKey, TimeSpec};
use getgoing_core::trip::{bindings_for, TripDialog};

pub const STEP_KEYS: [&str; 4] = ["first_step", "step", "final_step", "only_step"];

fn base() -> Bindings {
    Bindings::new()
        .set("dloc", "Forbes Avenue and Murray Avenue")
        .set("aloc", "Pittsburgh International Airport")
        .set("time", "7:00 pm")
        .set("color", "orange")
        .set("surface", "xyzzy")
        .set("candidates", "Market Square, Oakland, or Shadyside")
        .set("buses", "2 buses")
        .set("minutes", "78 minutes")
        .set("depart", "10:11 am")
        .set("arrive", "11:29 am")
        .set(
            "instruction",
            "Walk from Squirrel Hill to Forbes Avenue and Murray Avenue, about 6 minutes.",
        )
        .emphasize("Forbes Avenue")
        .emphasize("Murray Avenue")
        .emphasize("7:00 pm")
        .emphasize("10:11 am")
        .emphasize("11:29 am")
}

/// Step bindings taken from real trips on the demo map: bus, walk and
/// drive instructions.
fn step_bindings() -> Vec<Bindings> {
    let map = Arc::new(assets::demo_map().unwrap());
    let trips = [
        ("squirrel hill", "the airport", SlotKey::Transit),
        ("forbes and murray", "east liberty", SlotKey::Transit),
        ("the strip", "station square", SlotKey::Transit),
        ("downtown", "the airport", SlotKey::Driving),
    ];
    let mut out = Vec::new();
    for (from, to, mode) in trips {
        let mut d = TripDialog::new(map.clone(), 600);
        d.start();
        let mut turn = d.handle_turn(vec![
            Fill::raw(SlotKey::Dloc, from),
            Fill::raw(SlotKey::Aloc, to),
            Fill {
                key: SlotKey::Time,
                value: ConceptValue::Time(TimeSpec::ClockTime(600)),
            },
            Fill::raw(mode, "x"),
        ]);
        loop {
            for s in turn.speaks() {
                out.push(bindings_for(s));
            }
            if d.ended() {
                break;
            }
            turn = d.handle_turn(vec![Fill::raw(SlotKey::Continue, "next")]);
        }
    }
    out.retain(|b| b.values.contains_key("instruction"));
    out
}

/// (prompt key, bindings) for every prompt in the bank.
pub fn fixtures(bank: &PromptBank) -> Vec<(String, Bindings)> {
    let steps = step_bindings();
    let mut out = Vec::new();
    for key in bank.keys() {
        if STEP_KEYS.contains(&key) {
            out.extend(steps.iter().map(|b| (key.to_string(), b.clone())));
        } else {
            for name in bank.placeholders(key).unwrap() {
                assert!(
                    base().values.contains_key(&name),
                    "no fixture value for {{{name}}} in {key}"
                );
            }
            out.push((key.to_string(), base()));
        }
    }
    out
}

fn word_count(text: &str, term: &str) -> usize {
    let edge = |c: Option<char>| c.is_none_or(|c| !c.is_alphanumeric());
    text.match_indices(term)
        .filter(|(i, _)| {
            edge(text[..*i].chars().next_back()) && edge(text[i + term.len()..].chars().next())
        })
        .count()
}

fn render(bank: &PromptBank, key: &str, b: &Bindings, mode: DeliveryMode, seed: u64) -> MarkupDoc {
    let doc = bank.render(key, b, mode, seed).unwrap();
    if STEP_KEYS.contains(&key) {
        confirmation_wrap(&doc, mode)
    } else {
        doc
    }
}

/// Both renders of one prompt obey the mode contract.
pub fn check(bank: &PromptBank, key: &str, b: &Bindings, seed: u64) -> Result<(), String> {
    let entry = bank.get(key).ok_or("missing key")?;
    let sd = render(bank, key, b, DeliveryMode::SD, seed);
    let setd = render(bank, key, b, DeliveryMode::SeTD, seed);
    let sd_text = plain_text(&sd);
    let setd_text = plain_text(&setd);

    if !sd.segments().iter().all(|s| matches!(s, Segment::Text(_))) {
        return Err(format!("SD has markup: {:?}", sd.segments()));
    }
    if entry.prefixes.iter().any(|p| sd_text.contains(p.as_str())) {
        return Err("SD has a prefix".into());
    }

    let segs = setd.segments();
    for (i, s) in segs.iter().enumerate() {
        match s {
            Segment::Break(ms) if *ms != LONG_BREAK_MS && *ms != SHORT_BREAK_MS => {
                return Err(format!("odd break {ms}"));
            }
            Segment::Break(_) if matches!(segs.get(i + 1), Some(Segment::Break(_))) => {
                return Err("adjacent breaks".into());
            }
            Segment::Emph(e) if i > 0 && segs[i - 1] != Segment::Break(LONG_BREAK_MS) => {
                return Err(format!("no long break before {e:?}"));
            }
            _ => {}
        }
    }
    let mut rest = setd_text.as_str();
    if entry.is_key_info() {
        let prefix = chosen_prefix(bank, key, seed).ok_or("no prefix")?;
        rest = rest
            .strip_prefix(prefix)
            .ok_or_else(|| format!("SeTD does not open with {prefix:?}: {setd_text}"))?
            .trim_start();
        if !segs.contains(&Segment::Break(LONG_BREAK_MS)) {
            return Err("key information without a long break".into());
        }
    }
    for term in &b.emphasis {
        let want = word_count(&sd_text, term);
        let got = segs
            .iter()
            .filter(|s| **s == Segment::Emph(term.clone()))
            .count();
        if want != got {
            return Err(format!("{term:?} said {want} times, emphasized {got}"));
        }
    }
    if STEP_KEYS.contains(&key) {
        rest = rest
            .strip_suffix(CONFIRMATION_QUESTION)
            .ok_or("step without the confirmation question")?
            .trim_end();
    }
    if rest != sd_text {
        return Err(format!(
            "content differs:\n  SeTD {rest:?}\n  SD   {sd_text:?}"
        ));
    }
    Ok(())
}
