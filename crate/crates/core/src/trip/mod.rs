//! The GetGoing task: its agent tree, the executors behind it, and the
//! mapping from engine actions to prompt bindings.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::delivery::{
    confirmation_wrap, Bindings, DeliveryError, DeliveryMode, MarkupDoc, PromptBank,
};
use crate::dialog::{
    Action, AgentNode, ConceptValue, DialogEngine, EngineOutput, Fill, Payload, ResolvedPlace,
    Speak, StepItem, TaskTree,
};
use crate::directions::{
    plan_driving, plan_transit, resolve_location, steps_to_language, DirectionsError, Itinerary,
    MapDataset, Place,
};
use crate::nlu::{format_clock, parse_time, SlotFill, SlotKey, TimeSpec};

pub const MAX_ALTERNATIVES: usize = 3;

pub const RESOLVE_DEPARTURE: &str = "resolve_departure";
pub const RESOLVE_ARRIVAL: &str = "resolve_arrival";
pub const DIRECTIONS: &str = "directions";
const SUMMARY_NODE: &str = "trip_summary";
const STEP_NODE: &str = "steps_direction";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TravelMode {
    Transit,
    Driving,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripQuery {
    pub dloc: Place,
    pub aloc: Place,
    pub time: TimeSpec,
    pub mode: TravelMode,
}

/// Planned alternatives, shortest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteSet {
    pub alternatives: Vec<Itinerary>,
    pub selected: usize,
}

impl RouteSet {
    /// `None` for an empty list. The sort is stable, so equal durations
    /// keep the planner's order.
    pub fn new(mut alternatives: Vec<Itinerary>) -> Option<Self> {
        if alternatives.is_empty() {
            return None;
        }
        alternatives.sort_by_key(|it| it.total_minutes);
        Some(RouteSet {
            alternatives,
            selected: 0,
        })
    }

    pub fn current(&self) -> &Itinerary {
        &self.alternatives[self.selected]
    }
}

/// Root[Welcome, GetQuerySpecs[...], Directions, TripSummary, Steps, Goodbye].
pub fn build_tree() -> TaskTree {
    use SlotKey::*;
    let specs = AgentNode::dialog(
        "get_query_specs",
        [Dloc, Aloc, Time, Transit, Driving],
        vec![
            AgentNode::request("request_arrival", &[Aloc], "request_arrival"),
            AgentNode::execute(RESOLVE_ARRIVAL, RESOLVE_ARRIVAL, &[Aloc]),
            AgentNode::confirm("inform_resolved_arrival", Aloc, "resolved_arrival"),
            AgentNode::request("request_departure", &[Dloc], "request_departure"),
            AgentNode::execute(RESOLVE_DEPARTURE, RESOLVE_DEPARTURE, &[Dloc]),
            AgentNode::confirm("inform_resolved_departure", Dloc, "resolved_departure"),
            AgentNode::request("request_time", &[Time], "request_time"),
            AgentNode::request("request_mode", &[Transit, Driving], "request_mode"),
        ],
    );
    let root = AgentNode::dialog(
        "getgoing",
        [Yes, No, Pause, Repeat, Continue, Restart, Change],
        vec![
            AgentNode::inform("welcome", "welcome"),
            specs,
            AgentNode::execute(
                DIRECTIONS,
                DIRECTIONS,
                &[Dloc, Aloc, Time, Transit, Driving],
            ),
            AgentNode::inform(SUMMARY_NODE, "trip_summary"),
            AgentNode::step(STEP_NODE, "step"),
            AgentNode::inform("goodbye", "goodbye"),
        ],
    );
    TaskTree::new(root).expect("the trip tree is well formed")
}

/// Tagger output to engine fills. Times are parsed here; a time that does
/// not parse is dropped.
pub fn to_fills(fills: Vec<SlotFill>) -> Vec<Fill> {
    fills
        .into_iter()
        .filter_map(|f| match f.key {
            SlotKey::Time => parse_time(&f.surface).ok().map(|t| Fill {
                key: SlotKey::Time,
                value: ConceptValue::Time(t),
            }),
            _ => Some(Fill::from(f)),
        })
        .collect()
}

fn buses(n: usize) -> String {
    match n {
        0 => "no buses".to_string(),
        1 => "1 bus".to_string(),
        n => format!("{n} buses"),
    }
}

fn minutes(n: u32) -> String {
    if n == 1 {
        "1 minute".to_string()
    } else {
        format!("{n} minutes")
    }
}

/// "a, b, or c"
fn spoken_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} or {b}"),
        [rest @ .., last] => format!("{}, or {last}", rest.join(", ")),
    }
}

fn resolved(place: &Place, surface: &str) -> ConceptValue {
    ConceptValue::Place(ResolvedPlace {
        surface: surface.to_string(),
        id: place.id.clone(),
        name: place.canonical_name.clone(),
        streets: place.streets.clone(),
    })
}

fn summary_payload(query: &TripQuery, it: &Itinerary) -> Payload {
    let mut p = Payload::new()
        .set("dloc", query.dloc.canonical_name.clone())
        .set("aloc", query.aloc.canonical_name.clone())
        .set("buses", buses(it.bus_count))
        .set("minutes", minutes(it.total_minutes))
        .set("depart", format_clock(it.depart()))
        .set("arrive", format_clock(it.arrive()))
        .emphasize(format_clock(it.depart()))
        .emphasize(format_clock(it.arrive()));
    for street in query.dloc.streets.iter().chain(&query.aloc.streets) {
        p = p.emphasize(street.clone());
    }
    if query.mode == TravelMode::Driving {
        p = p.with_prompt("trip_summary_driving");
    }
    p
}

fn step_items(it: &Itinerary) -> Vec<StepItem> {
    let instructions = steps_to_language(it);
    let n = instructions.len();
    instructions
        .into_iter()
        .enumerate()
        .map(|(i, ins)| {
            let prompt_key = match (i, n) {
                (_, 1) => "only_step",
                (0, _) => "first_step",
                (i, n) if i + 1 == n => "final_step",
                _ => "step",
            };
            let mut payload = Payload::new().set("instruction", ins.text);
            for term in ins
                .slots
                .bus_number
                .into_iter()
                .chain(ins.slots.streets)
                .chain(ins.slots.depart_time)
            {
                payload = payload.emphasize(term);
            }
            StepItem {
                prompt_key: prompt_key.to_string(),
                payload,
            }
        })
        .collect()
}

/// One trip-planning conversation.
#[derive(Debug, Clone)]
pub struct TripDialog {
    engine: DialogEngine,
    map: Arc<MapDataset>,
    /// Minutes since midnight that "now" stands for.
    clock: u32,
    query: Option<TripQuery>,
    routes: Option<RouteSet>,
}

impl TripDialog {
    pub fn new(map: Arc<MapDataset>, clock: u32) -> Self {
        TripDialog {
            engine: DialogEngine::new(Arc::new(build_tree())),
            map,
            clock,
            query: None,
            routes: None,
        }
    }

    pub fn engine(&self) -> &DialogEngine {
        &self.engine
    }

    pub fn clock(&self) -> u32 {
        self.clock
    }

    pub fn query(&self) -> Option<&TripQuery> {
        self.query.as_ref()
    }

    pub fn routes(&self) -> Option<&RouteSet> {
        self.routes.as_ref()
    }

    pub fn ended(&self) -> bool {
        self.engine.ended()
    }

    /// The opening prompts.
    pub fn start(&mut self) -> EngineOutput {
        let out = self.engine.advance();
        self.finish(out)
    }

    pub fn handle_slots(&mut self, fills: Vec<SlotFill>) -> EngineOutput {
        self.handle_turn(to_fills(fills))
    }

    pub fn handle_turn(&mut self, fills: Vec<Fill>) -> EngineOutput {
        let out = self.engine.handle_turn(fills);
        self.finish(out)
    }

    /// Run executors and route switches until the engine waits on the user.
    fn finish(&mut self, mut out: EngineOutput) -> EngineOutput {
        let mut from = 0;
        while from < out.actions.len() {
            let more = match &out.actions[from] {
                Action::CallExecutor {
                    executor_ref,
                    node_id,
                } => {
                    let (executor_ref, node_id) = (executor_ref.clone(), node_id.clone());
                    Some(self.execute(&executor_ref, &node_id))
                }
                Action::SwitchAlternative => Some(self.handle_change()),
                _ => None,
            };
            from += 1;
            if let Some(more) = more {
                out.actions.splice(from..from, more.actions);
            }
        }
        self.engine.remember(&out);
        out
    }

    fn execute(&mut self, executor_ref: &str, node_id: &str) -> EngineOutput {
        match executor_ref {
            RESOLVE_DEPARTURE => self.exec_resolve(SlotKey::Dloc, SlotKey::Aloc, node_id),
            RESOLVE_ARRIVAL => self.exec_resolve(SlotKey::Aloc, SlotKey::Dloc, node_id),
            DIRECTIONS => self.exec_directions(node_id),
            other => panic!("the trip tree names no executor {other:?}"),
        }
    }

    fn say(&self, prompt_key: &str, node_id: &str, payload: Payload) -> Action {
        Action::Speak(Speak {
            prompt_key: prompt_key.to_string(),
            node_id: node_id.to_string(),
            concepts: self
                .engine
                .concepts()
                .iter()
                .map(|(k, e)| (k, e.value.clone()))
                .collect(),
            payload: Some(payload),
            step: None,
        })
    }

    fn place_of(&self, key: SlotKey) -> Option<&Place> {
        match self.engine.concepts().value(key)? {
            ConceptValue::Place(p) => self.map.place(&p.id),
            _ => None,
        }
    }

    /// Replace the spoken location with a place from the map, or reopen
    /// the question with an apology.
    fn exec_resolve(&mut self, key: SlotKey, other: SlotKey, node_id: &str) -> EngineOutput {
        let surface = match self.engine.concepts().value(key) {
            Some(ConceptValue::Raw(s)) => s.clone(),
            Some(ConceptValue::Place(_)) => {
                self.engine.complete_execute(node_id).expect("node exists");
                return self.engine.advance();
            }
            _ => String::new(),
        };
        let which = if key == SlotKey::Dloc {
            "departure"
        } else {
            "arrival"
        };
        let mut out = EngineOutput::default();
        match resolve_location(&self.map, &surface) {
            Ok(res) => {
                let place = res.place.clone();
                if self.place_of(other).is_some_and(|p| p.id == place.id) {
                    self.engine.reopen(key);
                    let payload = Payload::new().set("dloc", place.canonical_name.clone());
                    out.push(self.say("same_place", node_id, payload));
                } else {
                    self.engine.resolve_concept(key, resolved(&place, &surface));
                    self.engine.complete_execute(node_id).expect("node exists");
                }
            }
            Err(err) => {
                let candidates = match err {
                    DirectionsError::NoMatch { candidates, .. } => candidates,
                    _ => Vec::new(),
                };
                let candidates = if candidates.is_empty() {
                    self.map
                        .places()
                        .iter()
                        .take(3)
                        .map(|p| p.canonical_name.clone())
                        .collect()
                } else {
                    candidates
                };
                self.engine.reopen(key);
                let payload = Payload::new()
                    .set("surface", surface)
                    .set("candidates", spoken_list(&candidates));
                out.push(self.say(&format!("resolve_failed_{which}"), node_id, payload));
            }
        }
        out.extend(self.engine.advance());
        out
    }

    fn current_query(&self) -> Option<TripQuery> {
        let time = match self.engine.concepts().value(SlotKey::Time)? {
            ConceptValue::Time(t) => *t,
            _ => return None,
        };
        let mode = if self.engine.concepts().contains(SlotKey::Driving) {
            TravelMode::Driving
        } else {
            TravelMode::Transit
        };
        Some(TripQuery {
            dloc: self.place_of(SlotKey::Dloc)?.clone(),
            aloc: self.place_of(SlotKey::Aloc)?.clone(),
            time,
            mode,
        })
    }

    /// Plan the trip, load the steps, or reopen the time with an apology.
    fn exec_directions(&mut self, node_id: &str) -> EngineOutput {
        let Some(query) = self.current_query() else {
            // Something upstream was reopened; let traversal find it.
            for key in [SlotKey::Dloc, SlotKey::Aloc] {
                if self.place_of(key).is_none() {
                    self.engine.reopen(key);
                }
            }
            return self.engine.advance();
        };
        let depart = query.time.resolve(self.clock);
        let planned = match query.mode {
            TravelMode::Transit => plan_transit(
                &self.map,
                &query.dloc,
                &query.aloc,
                depart,
                MAX_ALTERNATIVES,
            ),
            TravelMode::Driving => plan_driving(&self.map, &query.dloc, &query.aloc, depart)
                .map(|it| vec![it])
                .unwrap_or_default(),
        };
        let Some(routes) = RouteSet::new(planned) else {
            let payload = Payload::new()
                .set("dloc", query.dloc.canonical_name.clone())
                .set("aloc", query.aloc.canonical_name.clone())
                .set("time", ConceptValue::Time(query.time).display());
            self.engine.reopen(SlotKey::Time);
            let mut out = EngineOutput::default();
            out.push(self.say("no_route", node_id, payload));
            out.extend(self.engine.advance());
            return out;
        };
        self.install(&query, &routes);
        self.query = Some(query);
        self.routes = Some(routes);
        self.engine.complete_execute(node_id).expect("node exists");
        self.engine.advance()
    }

    fn install(&mut self, query: &TripQuery, routes: &RouteSet) {
        let it = routes.current();
        self.engine
            .set_payload(SUMMARY_NODE, summary_payload(query, it))
            .expect("node exists");
        self.engine
            .load_steps(STEP_NODE, step_items(it))
            .expect("node exists");
    }

    /// Move to the next alternative route and start its steps over.
    fn handle_change(&mut self) -> EngineOutput {
        let mut out = EngineOutput::default();
        let (Some(query), Some(mut routes)) = (self.query.clone(), self.routes.clone()) else {
            return out;
        };
        if routes.alternatives.len() < 2 {
            out.push(self.say("only_one_route", STEP_NODE, Payload::new()));
            return out;
        }
        routes.selected = (routes.selected + 1) % routes.alternatives.len();
        self.install(&query, &routes);
        let summary = summary_payload(&query, routes.current());
        self.routes = Some(routes);
        out.push(self.say("route_changed", STEP_NODE, summary));
        out.extend(self.engine.advance());
        out
    }
}

/// Prompt values for a Speak action: its concepts, then its payload.
pub fn bindings_for(speak: &Speak) -> Bindings {
    let mut b = Bindings::new();
    for (key, value) in &speak.concepts {
        b = b.set(&key.as_str().to_ascii_lowercase(), value.display());
        match value {
            ConceptValue::Place(p) => {
                for s in &p.streets {
                    b = b.emphasize(s.clone());
                }
            }
            ConceptValue::Time(TimeSpec::ClockTime(_)) => b = b.emphasize(value.display()),
            _ => {}
        }
    }
    if let Some(p) = &speak.payload {
        for (name, value) in &p.fields {
            b = b.set(name, value.clone());
        }
        for term in &p.emphasis {
            b = b.emphasize(term.clone());
        }
    }
    b
}

/// Render one Speak action. Step instructions get the SeTD confirmation
/// question.
pub fn render_speak(
    bank: &PromptBank,
    speak: &Speak,
    extra: &Bindings,
    mode: DeliveryMode,
    seed: u64,
) -> Result<MarkupDoc, DeliveryError> {
    let mut b = bindings_for(speak);
    for (name, value) in &extra.values {
        b.values
            .entry(name.clone())
            .or_insert_with(|| value.clone());
    }
    let doc = bank.render(&speak.prompt_key, &b, mode, seed)?;
    Ok(if speak.step.is_some() {
        confirmation_wrap(&doc, mode)
    } else {
        doc
    })
}

/// Every Speak in a turn, rendered.
pub fn render_output(
    bank: &PromptBank,
    out: &EngineOutput,
    extra: &Bindings,
    mode: DeliveryMode,
    seed: u64,
) -> Result<Vec<MarkupDoc>, DeliveryError> {
    out.speaks()
        .map(|s| render_speak(bank, s, extra, mode, seed))
        .collect()
}
