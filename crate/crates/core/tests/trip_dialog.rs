//! Scripted conversations against the demo map, asserted action by action.

mod support;

use getgoing_core::dialog::{Action, ConceptValue, EngineOutput, Fill, Payload};
use getgoing_core::directions::StepKind;
use getgoing_core::nlu::{SlotKey, TimeSpec};
use support::exchanges::{self, at, dialog, opening, raw, speak};

use SlotKey::*;

#[test]
fn over_informative_answer_fills_arrival_and_time() {
    exchanges::over_informative();
}

#[test]
fn departure_given_at_the_arrival_prompt() {
    exchanges::out_of_turn();
}

#[test]
fn no_and_a_new_destination_rebinds_and_resolves_again() {
    exchanges::correction();
}

#[test]
fn bare_no_reopens_the_last_read_back() {
    let mut d = dialog(600);
    d.start();
    d.handle_turn(vec![raw(Aloc, "cmu")]);
    let out = d.handle_turn(vec![raw(No, "no")]);
    assert_eq!(
        out.actions,
        [speak("request_arrival", "request_arrival", &[])]
    );
}

#[test]
fn one_turn_trip_goes_straight_to_the_summary() {
    let mut d = dialog(600);
    d.start();
    // "from the airport to CMU at 10 am by bus"
    let out = d.handle_turn(vec![
        raw(Dloc, "the airport"),
        raw(Aloc, "cmu"),
        at(600),
        raw(Transit, "by bus"),
    ]);
    let keys = out.prompt_keys();
    assert!(!keys.iter().any(|k| k.starts_with("request_")), "{keys:?}");
    assert_eq!(
        keys[..3],
        ["resolved_arrival", "resolved_departure", "trip_summary"]
    );
    assert!(keys[3].ends_with("step"));
    let routes = d.routes().unwrap();
    assert_eq!(routes.selected, 0);
    let totals: Vec<u32> = routes
        .alternatives
        .iter()
        .map(|it| it.total_minutes)
        .collect();
    assert!(totals.windows(2).all(|w| w[0] <= w[1]));
    let cursor = d.engine().step_cursor().unwrap();
    assert_eq!(cursor.steps.len(), routes.current().steps.len());
}

#[test]
fn happy_path_visits_every_stage_in_order() {
    let mut d = dialog(600);
    let mut keys: Vec<String> = Vec::new();
    let mut log = |out: EngineOutput| keys.extend(out.prompt_keys().into_iter().map(String::from));
    log(d.start());
    log(d.handle_turn(vec![raw(Aloc, "cmu")]));
    log(d.handle_turn(vec![raw(Dloc, "the airport")]));
    log(d.handle_turn(vec![at(600)]));
    log(d.handle_turn(vec![raw(Transit, "bus")]));
    let n = d.routes().unwrap().current().steps.len();
    for _ in 0..n {
        log(d.handle_turn(vec![raw(Continue, "next")]));
    }
    assert!(d.ended());
    let steps: Vec<&str> = keys
        .iter()
        .map(String::as_str)
        .filter(|k| k.ends_with("step"))
        .collect();
    assert_eq!(steps.len(), n);
    let expected_head = [
        "welcome",
        "request_arrival",
        "resolved_arrival",
        "request_departure",
        "resolved_departure",
        "request_time",
        "request_mode",
        "trip_summary",
    ];
    assert_eq!(&keys[..expected_head.len()], expected_head);
    assert_eq!(keys.last().unwrap(), "goodbye");
}

#[test]
fn change_cycles_through_alternatives() {
    let mut d = dialog(600);
    d.start();
    d.handle_turn(vec![
        raw(Dloc, "cmu"),
        raw(Aloc, "the airport"),
        at(600),
        raw(Transit, "bus"),
    ]);
    let n = d.routes().unwrap().alternatives.len();
    assert!(n >= 2, "demo map offers alternatives for this trip");
    for i in 1..=n {
        let out = d.handle_turn(vec![raw(Change, "another route")]);
        assert_eq!(out.actions[0], Action::SwitchAlternative);
        assert_eq!(out.prompt_keys()[0], "route_changed");
        assert_eq!(d.routes().unwrap().selected, i % n);
        assert_eq!(d.engine().step_cursor().unwrap().index, 0);
        assert_eq!(
            d.engine().step_cursor().unwrap().steps.len(),
            d.routes().unwrap().current().steps.len()
        );
    }
}

#[test]
fn driving_has_one_route_and_no_buses() {
    let mut d = dialog(600);
    d.start();
    let out = d.handle_turn(vec![
        raw(Dloc, "downtown"),
        raw(Aloc, "the airport"),
        at(600),
        raw(Driving, "drive"),
    ]);
    assert!(out.prompt_keys().contains(&"trip_summary_driving"));
    let it = d.routes().unwrap().current();
    assert!(it.steps.iter().all(|s| s.kind == StepKind::Drive));
    let out = d.handle_turn(vec![raw(Change, "another way")]);
    assert_eq!(out.prompt_keys(), ["only_one_route"]);
    assert_eq!(d.routes().unwrap().selected, 0);
}

#[test]
fn later_mode_wins() {
    let mut d = dialog(600);
    d.start();
    d.handle_turn(vec![
        raw(Dloc, "downtown"),
        raw(Aloc, "the airport"),
        at(600),
        raw(Transit, "bus"),
        raw(Driving, "drive"),
    ]);
    assert!(d.engine().concepts().contains(Driving));
    assert!(!d.engine().concepts().contains(Transit));
}

#[test]
fn unknown_place_is_asked_again() {
    let mut d = dialog(600);
    d.start();
    let out = d.handle_turn(vec![raw(Aloc, "xyzzy")]);
    assert_eq!(
        out.prompt_keys(),
        ["resolve_failed_arrival", "request_arrival"]
    );
    let Action::Speak(sorry) = &out.actions[1] else {
        panic!()
    };
    let payload = sorry.payload.as_ref().unwrap();
    assert_eq!(payload.fields["surface"], "xyzzy");
    assert!(!d.engine().concepts().contains(Aloc));
}

#[test]
fn same_place_twice_is_refused() {
    let mut d = dialog(600);
    d.start();
    d.handle_turn(vec![raw(Aloc, "cmu")]);
    let out = d.handle_turn(vec![raw(Dloc, "carnegie mellon")]);
    assert_eq!(out.prompt_keys(), ["same_place", "request_departure"]);
    assert!(!d.engine().concepts().contains(Dloc));
}

#[test]
fn no_route_reopens_the_time() {
    let mut d = dialog(600);
    d.start();
    let out = d.handle_turn(vec![
        raw(Dloc, "the airport"),
        raw(Aloc, "cmu"),
        at(23 * 60 + 55),
        raw(Transit, "bus"),
    ]);
    assert_eq!(
        out.prompt_keys(),
        [
            "resolved_arrival",
            "resolved_departure",
            "no_route",
            "request_time"
        ]
    );
    assert!(!d.engine().concepts().contains(Time));
    let out = d.handle_turn(vec![at(600)]);
    assert!(out.prompt_keys().contains(&"trip_summary"));
}

#[test]
fn now_uses_the_session_clock() {
    let mut d = dialog(600);
    d.start();
    let now = Fill {
        key: Time,
        value: ConceptValue::Time(TimeSpec::Now),
    };
    d.handle_turn(vec![
        raw(Dloc, "cmu"),
        raw(Aloc, "the airport"),
        now,
        raw(Transit, "bus"),
    ]);
    assert!(d.routes().unwrap().current().depart() >= 600);
}

#[test]
fn repeat_and_restart() {
    let mut d = dialog(600);
    let first = d.start();
    assert_eq!(d.handle_turn(vec![raw(Repeat, "say that again")]), first);
    d.handle_turn(vec![raw(Aloc, "cmu")]);
    let out = d.handle_turn(vec![raw(Restart, "start over")]);
    assert_eq!(out.actions, opening());
    assert!(d.engine().concepts().is_empty());
}

#[test]
fn step_payloads_carry_emphasis() {
    let mut d = dialog(600);
    d.start();
    let out = d.handle_turn(vec![
        raw(Dloc, "cmu"),
        raw(Aloc, "the airport"),
        at(600),
        raw(Transit, "bus"),
    ]);
    let step = out.speaks().find(|s| s.step == Some(0)).unwrap();
    let Payload {
        fields, emphasis, ..
    } = step.payload.clone().unwrap();
    for term in &emphasis {
        assert!(fields["instruction"].contains(term.as_str()), "{term}");
    }
}
