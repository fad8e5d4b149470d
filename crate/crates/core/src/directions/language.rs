use serde::{Deserialize, Serialize};

use super::{Itinerary, RouteStep, StepKind};
use crate::nlu::format_clock;

/// The parts of an instruction that deserve emphasis when spoken.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionSlots {
    pub bus_number: Option<String>,
    pub streets: Vec<String>,
    pub depart_time: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    pub text: String,
    pub slots: InstructionSlots,
}

fn minutes(n: u32) -> String {
    if n == 1 {
        "1 minute".to_string()
    } else {
        format!("{n} minutes")
    }
}

/// One English sentence per step, in order.
pub fn steps_to_language(itinerary: &Itinerary) -> Vec<Instruction> {
    itinerary.steps.iter().map(instruction).collect()
}

pub fn instruction(step: &RouteStep) -> Instruction {
    let (from, to) = (&step.from.name, &step.to.name);
    let duration = minutes(step.arrive - step.depart);
    let mut streets: Vec<String> = Vec::new();
    let mut add = |s: &String| {
        if !streets.contains(s) {
            streets.push(s.clone());
        }
    };
    if let Some(s) = &step.street {
        add(s);
    }
    step.from
        .streets
        .iter()
        .chain(&step.to.streets)
        .for_each(&mut add);

    let (text, bus_number, depart_time) = match step.kind {
        StepKind::Bus => {
            let line = step.line_number.clone().unwrap_or_default();
            let time = format_clock(step.depart);
            (
                format!("Take the {line} bus from {from} toward {to}, departing at {time}."),
                Some(line),
                Some(time),
            )
        }
        StepKind::Walk => (
            format!("Walk from {from} to {to}, about {duration}."),
            None,
            None,
        ),
        StepKind::Drive => {
            let street = step.street.as_deref().unwrap_or("the road");
            (
                format!("Drive on {street} from {from} to {to}, about {duration}."),
                None,
                None,
            )
        }
    };
    Instruction {
        text,
        slots: InstructionSlots {
            bus_number,
            streets,
            depart_time,
        },
    }
}
