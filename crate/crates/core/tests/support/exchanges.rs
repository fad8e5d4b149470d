//! The three mixed-initiative exchanges, asserted action by action. Each
//! function panics on the first mismatch.

use std::collections::BTreeMap;
use std::sync::Arc;

use getgoing_core::assets;
use getgoing_core::dialog::{Action, ConceptValue, Fill, ResolvedPlace, Speak};
use getgoing_core::nlu::{SlotKey, TimeSpec};
use getgoing_core::trip::TripDialog;

use SlotKey::*;

pub fn dialog(clock: u32) -> TripDialog {
    TripDialog::new(Arc::new(assets::demo_map().unwrap()), clock)
}

pub fn raw(key: SlotKey, s: &str) -> Fill {
    Fill::raw(key, s)
}

pub fn at(minutes: u16) -> Fill {
    Fill {
        key: Time,
        value: ConceptValue::Time(TimeSpec::ClockTime(minutes)),
    }
}

pub fn place(surface: &str, id: &str, name: &str, streets: &[&str]) -> ConceptValue {
    ConceptValue::Place(ResolvedPlace {
        surface: surface.into(),
        id: id.into(),
        name: name.into(),
        streets: streets.iter().map(|s| s.to_string()).collect(),
    })
}

pub fn cmu() -> ConceptValue {
    place("cmu", "cmu", "Carnegie Mellon University", &[])
}

pub fn airport() -> ConceptValue {
    place(
        "the airport",
        "airport",
        "Pittsburgh International Airport",
        &[],
    )
}

pub fn speak(prompt: &str, node: &str, concepts: &[(SlotKey, ConceptValue)]) -> Action {
    Action::Speak(Speak {
        prompt_key: prompt.into(),
        node_id: node.into(),
        concepts: concepts.iter().cloned().collect::<BTreeMap<_, _>>(),
        payload: None,
        step: None,
    })
}

pub fn call(executor: &str) -> Action {
    Action::CallExecutor {
        executor_ref: executor.into(),
        node_id: executor.into(),
    }
}

pub fn opening() -> Vec<Action> {
    vec![
        speak("welcome", "welcome", &[]),
        speak("request_arrival", "request_arrival", &[]),
    ]
}

/// "I'm going to CMU at 7 PM" at the arrival prompt.
pub fn over_informative() {
    let mut d = dialog(600);
    assert_eq!(d.start().actions, opening());

    // "I'm going to CMU at 7 PM"
    let out = d.handle_turn(vec![raw(Aloc, "cmu"), at(19 * 60)]);
    let seven = ConceptValue::Time(TimeSpec::ClockTime(19 * 60));
    let now = [(Aloc, cmu()), (Time, seven)];
    assert_eq!(
        out.actions,
        [
            call("resolve_arrival"),
            speak("resolved_arrival", "inform_resolved_arrival", &now),
            speak("request_departure", "request_departure", &now),
        ]
    );
    assert!(d.engine().is_complete("request_arrival").unwrap());
    assert!(d.engine().is_complete("request_time").unwrap());

    // The time question is skipped later.
    let out = d.handle_turn(vec![raw(Dloc, "the airport")]);
    let now = [
        (Dloc, airport()),
        (Aloc, cmu()),
        (Time, ConceptValue::Time(TimeSpec::ClockTime(19 * 60))),
    ];
    assert_eq!(
        out.actions,
        [
            call("resolve_departure"),
            speak("resolved_departure", "inform_resolved_departure", &now),
            speak("request_mode", "request_mode", &now),
        ]
    );
}

/// "I'm leaving from the airport" at the arrival prompt.
pub fn out_of_turn() {
    let mut d = dialog(600);
    d.start();

    // "I'm leaving from the airport"
    let out = d.handle_turn(vec![raw(Dloc, "the airport")]);
    let said = ConceptValue::Raw("the airport".into());
    assert_eq!(
        out.actions,
        [speak(
            "request_arrival",
            "request_arrival",
            &[(Dloc, said.clone())]
        )]
    );
    assert!(d.engine().is_complete("request_departure").unwrap());

    // No departure question follows.
    let out = d.handle_turn(vec![raw(Aloc, "cmu")]);
    assert_eq!(
        out.actions,
        [
            call("resolve_arrival"),
            speak(
                "resolved_arrival",
                "inform_resolved_arrival",
                &[(Dloc, said), (Aloc, cmu())]
            ),
            call("resolve_departure"),
            speak(
                "resolved_departure",
                "inform_resolved_departure",
                &[(Dloc, airport()), (Aloc, cmu())]
            ),
            speak(
                "request_time",
                "request_time",
                &[(Dloc, airport()), (Aloc, cmu())]
            ),
        ]
    );
}

/// "No. I'm going to Forbes and Murray" right after a read-back.
pub fn correction() {
    let mut d = dialog(600);
    d.start();
    // "Okay, going to CMU. Where are you leaving from?"
    let out = d.handle_turn(vec![raw(Aloc, "cmu")]);
    assert_eq!(out.prompt_keys(), ["resolved_arrival", "request_departure"]);

    // "No. I'm going to Forbes and Murray"
    let out = d.handle_turn(vec![raw(No, "no"), raw(Aloc, "forbes and murray")]);
    let corrected = place(
        "forbes and murray",
        "forbes_murray",
        "Forbes Avenue and Murray Avenue",
        &["Forbes Avenue", "Murray Avenue"],
    );
    assert_eq!(
        out.actions,
        [
            call("resolve_arrival"),
            speak(
                "resolved_arrival",
                "inform_resolved_arrival",
                &[(Aloc, corrected.clone())]
            ),
            speak(
                "request_departure",
                "request_departure",
                &[(Aloc, corrected)]
            ),
        ]
    );
    assert_eq!(d.engine().concepts().get(Aloc).unwrap().filled_at_turn, 2);

    // The trip that gets planned ends at the corrected place.
    d.handle_turn(vec![raw(Dloc, "downtown"), at(600), raw(Transit, "bus")]);
    let it = d.routes().unwrap().current();
    assert_eq!(it.steps.last().unwrap().to.id, "forbes_murray");
}
