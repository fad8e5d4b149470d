//! Offline map data and route planning: location resolution, timetable
//! transit search, road shortest paths, and step sentences.

mod dataset;
mod driving;
mod language;
mod resolve;
mod transit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dataset::{
    intersection_name, MapDataset, Place, PlaceKind, RoadEdge, TransitLine, ValidationIssue,
    WalkEdge,
};
pub use driving::plan_driving;
pub use language::{instruction, steps_to_language, Instruction, InstructionSlots};
pub use resolve::{
    normalize, resolve_location, MatchKind, Resolution, STREET_BUDGET, WHOLE_BUDGET,
};
pub use transit::{plan_transit, MAX_BUS_LEGS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    Walk,
    Bus,
    Drive,
}

/// A step endpoint, copied out of the dataset so itineraries stand alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEnd {
    pub id: String,
    pub name: String,
    pub streets: Vec<String>,
}

impl From<&Place> for StepEnd {
    fn from(p: &Place) -> Self {
        StepEnd {
            id: p.id.clone(),
            name: p.canonical_name.clone(),
            streets: p.streets.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteStep {
    pub kind: StepKind,
    pub from: StepEnd,
    pub to: StepEnd,
    pub line_number: Option<String>,
    /// Street driven along; Drive steps only.
    pub street: Option<String>,
    pub depart: u32,
    pub arrive: u32,
}

impl RouteStep {
    pub fn new(
        kind: StepKind,
        from: &Place,
        to: &Place,
        line_number: Option<String>,
        street: Option<String>,
        depart: u32,
        arrive: u32,
    ) -> Self {
        RouteStep {
            kind,
            from: from.into(),
            to: to.into(),
            line_number,
            street,
            depart,
            arrive,
        }
    }

    pub fn instruction_slots(&self) -> InstructionSlots {
        instruction(self).slots
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Itinerary {
    pub steps: Vec<RouteStep>,
    pub total_minutes: u32,
    pub bus_count: usize,
}

impl Itinerary {
    /// Panics on an empty step list; planners never produce one.
    pub fn new(steps: Vec<RouteStep>) -> Self {
        let first = steps.first().expect("itinerary has steps").depart;
        let last = steps.last().expect("itinerary has steps").arrive;
        let bus_count = steps.iter().filter(|s| s.kind == StepKind::Bus).count();
        Itinerary {
            steps,
            total_minutes: last - first,
            bus_count,
        }
    }

    pub fn depart(&self) -> u32 {
        self.steps[0].depart
    }

    pub fn arrive(&self) -> u32 {
        self.steps[self.steps.len() - 1].arrive
    }

    /// Line numbers in riding order.
    pub fn line_sequence(&self) -> Vec<&str> {
        self.steps
            .iter()
            .filter_map(|s| s.line_number.as_deref())
            .collect()
    }

    /// Contiguity, monotone times, and consistent totals.
    pub fn check(&self) -> Result<(), String> {
        if self.steps.is_empty() {
            return Err("no steps".into());
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.arrive < s.depart {
                return Err(format!("step {i} arrives before it departs"));
            }
            if (s.kind == StepKind::Bus) != s.line_number.is_some() {
                return Err(format!("step {i} line number does not match its kind"));
            }
        }
        for (i, w) in self.steps.windows(2).enumerate() {
            if w[0].to.id != w[1].from.id {
                return Err(format!("steps {i} and {} are not contiguous", i + 1));
            }
            if w[1].depart < w[0].arrive {
                return Err(format!("step {} departs before step {i} arrives", i + 1));
            }
        }
        if self.bus_count
            != self
                .steps
                .iter()
                .filter(|s| s.kind == StepKind::Bus)
                .count()
        {
            return Err("bus_count mismatch".into());
        }
        if self.total_minutes != self.arrive() - self.depart() {
            return Err("total_minutes mismatch".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DirectionsError {
    #[error("map dataset is empty")]
    EmptyDataset,
    #[error("invalid map dataset: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ValidationIssue>),
    #[error("no location is called {text:?}; closest are {}", candidates.join(", "))]
    NoMatch {
        text: String,
        candidates: Vec<String>,
    },
    #[error("empty location text")]
    EmptyLocation,
    #[error("no route from {from} to {to}")]
    Unreachable { from: String, to: String },
    #[error("start and destination are both {0}")]
    SamePlace(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
