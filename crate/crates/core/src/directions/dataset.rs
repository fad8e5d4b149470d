use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DirectionsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Landmark,
    Intersection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub id: String,
    pub canonical_name: String,
    pub aliases: Vec<String>,
    pub kind: PlaceKind,
    /// The two cross streets of an intersection, alphabetical; empty for landmarks.
    pub streets: Vec<String>,
    pub lat: f64,
    pub lon: f64,
}

impl Place {
    pub fn is_intersection(&self) -> bool {
        self.kind == PlaceKind::Intersection
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitLine {
    /// Unique per direction, e.g. `61C-in`.
    pub id: String,
    /// What riders see, e.g. `61C`.
    pub line_number: String,
    pub stops: Vec<String>,
    /// Minutes since midnight at the first stop.
    pub departures: Vec<u32>,
    pub inter_stop_minutes: Vec<u32>,
}

impl TransitLine {
    /// Minutes after the first-stop departure at which a run reaches each stop.
    pub fn offsets(&self) -> Vec<u32> {
        let mut acc = 0;
        let mut out = vec![0];
        for m in &self.inter_stop_minutes {
            acc += m;
            out.push(acc);
        }
        out
    }
}

/// A bidirectional walking connection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkEdge {
    pub from: String,
    pub to: String,
    pub minutes: u32,
}

/// A bidirectional road segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoadEdge {
    pub from: String,
    pub to: String,
    pub travel_minutes: u32,
    pub name: String,
}

/// One problem found while validating a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub entity: String,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}: {}", self.entity, self.field, self.message)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    places: Vec<RawPlace>,
    #[serde(default)]
    lines: Vec<RawLine>,
    #[serde(default)]
    walks: Vec<WalkEdge>,
    #[serde(default)]
    roads: Vec<RoadEdge>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlace {
    id: String,
    kind: PlaceKind,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    streets: Vec<String>,
    #[serde(default)]
    aliases: Vec<String>,
    lat: f64,
    lon: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    id: String,
    number: String,
    stops: Vec<String>,
    departures: Vec<u32>,
    inter_stop_minutes: Vec<u32>,
}

/// Places, transit lines, walk links and roads, validated and indexed.
#[derive(Debug, Clone)]
pub struct MapDataset {
    places: Vec<Place>,
    lines: Vec<TransitLine>,
    walks: Vec<WalkEdge>,
    roads: Vec<RoadEdge>,
    index: BTreeMap<String, usize>,
}

impl MapDataset {
    pub fn from_json(text: &str) -> Result<Self, DirectionsError> {
        if text.trim().is_empty() {
            return Err(DirectionsError::EmptyDataset);
        }
        let raw: RawDataset = serde_json::from_str(text)?;
        Self::from_raw(raw)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DirectionsError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Build from parts, running the same checks as [`MapDataset::from_json`].
    pub fn new(
        places: Vec<Place>,
        lines: Vec<TransitLine>,
        walks: Vec<WalkEdge>,
        roads: Vec<RoadEdge>,
    ) -> Result<Self, DirectionsError> {
        let mut issues = Vec::new();
        let mut index = BTreeMap::new();
        let mut names = BTreeSet::new();
        for (i, p) in places.iter().enumerate() {
            let mut issue = |field: &str, message: String| {
                issues.push(ValidationIssue {
                    entity: format!("place {}", p.id),
                    field: field.to_string(),
                    message,
                })
            };
            if p.id.is_empty() {
                issue("id", "empty id".into());
            }
            if index.insert(p.id.clone(), i).is_some() {
                issue("id", "duplicate id".into());
            }
            if p.canonical_name.trim().is_empty() {
                issue("name", "empty name".into());
            } else if !names.insert(p.canonical_name.to_lowercase()) {
                issue(
                    "name",
                    format!("canonical name {:?} is not unique", p.canonical_name),
                );
            }
            match p.kind {
                PlaceKind::Intersection => {
                    if p.streets.len() != 2 {
                        issue(
                            "streets",
                            format!("intersection needs 2 streets, got {}", p.streets.len()),
                        );
                    } else if intersection_name(&p.streets[0], &p.streets[1]) != p.canonical_name
                        || p.streets[0] > p.streets[1]
                    {
                        issue(
                            "streets",
                            "streets must be alphabetical and match the canonical name".into(),
                        );
                    }
                }
                PlaceKind::Landmark if !p.streets.is_empty() => {
                    issue("streets", "landmarks have no cross streets".into())
                }
                PlaceKind::Landmark => {}
            }
            if !(-90.0..=90.0).contains(&p.lat) || !(-180.0..=180.0).contains(&p.lon) {
                issue("coordinates", "latitude or longitude out of range".into());
            }
        }

        let mut line_ids = BTreeSet::new();
        for l in &lines {
            let mut issue = |field: &str, message: String| {
                issues.push(ValidationIssue {
                    entity: format!("line {}", l.id),
                    field: field.to_string(),
                    message,
                })
            };
            if !line_ids.insert(l.id.clone()) {
                issue("id", "duplicate id".into());
            }
            if l.line_number.trim().is_empty() {
                issue("number", "empty line number".into());
            }
            if l.stops.len() < 2 {
                issue("stops", "a line needs at least 2 stops".into());
            }
            let mut seen = BTreeSet::new();
            for s in &l.stops {
                if !index.contains_key(s) {
                    issue("stops", format!("unknown stop id {s:?}"));
                }
                if !seen.insert(s) {
                    issue("stops", format!("stop {s:?} appears twice"));
                }
            }
            if l.inter_stop_minutes.len() + 1 != l.stops.len() {
                issue(
                    "inter_stop_minutes",
                    format!(
                        "{} legs for {} stops",
                        l.inter_stop_minutes.len(),
                        l.stops.len()
                    ),
                );
            }
            if l.inter_stop_minutes.contains(&0) {
                issue("inter_stop_minutes", "leg times must be positive".into());
            }
            if l.departures.is_empty() {
                issue("departures", "no departures".into());
            }
            if l.departures.windows(2).any(|w| w[0] >= w[1]) {
                issue(
                    "departures",
                    "departures must be strictly increasing".into(),
                );
            }
        }

        let check_edge =
            |kind: &str, from: &str, to: &str, minutes: u32, issues: &mut Vec<ValidationIssue>| {
                let entity = format!("{kind} {from}-{to}");
                for (field, end) in [("from", from), ("to", to)] {
                    if !index.contains_key(end) {
                        issues.push(ValidationIssue {
                            entity: entity.clone(),
                            field: field.into(),
                            message: format!("unknown place id {end:?}"),
                        });
                    }
                }
                if from == to {
                    issues.push(ValidationIssue {
                        entity: entity.clone(),
                        field: "to".into(),
                        message: "edge loops back to its start".into(),
                    });
                }
                if minutes == 0 {
                    issues.push(ValidationIssue {
                        entity,
                        field: "minutes".into(),
                        message: "travel time must be positive".into(),
                    });
                }
            };
        for w in &walks {
            check_edge("walk", &w.from, &w.to, w.minutes, &mut issues);
        }
        for r in &roads {
            check_edge("road", &r.from, &r.to, r.travel_minutes, &mut issues);
            if r.name.trim().is_empty() {
                issues.push(ValidationIssue {
                    entity: format!("road {}-{}", r.from, r.to),
                    field: "name".into(),
                    message: "empty street name".into(),
                });
            }
        }

        if !issues.is_empty() {
            return Err(DirectionsError::Invalid(issues));
        }
        Ok(MapDataset {
            places,
            lines,
            walks,
            roads,
            index,
        })
    }

    fn from_raw(raw: RawDataset) -> Result<Self, DirectionsError> {
        let mut issues = Vec::new();
        let mut places = Vec::new();
        for p in raw.places {
            let mut streets = p.streets;
            let canonical_name = match p.kind {
                PlaceKind::Intersection if streets.len() == 2 => {
                    streets.sort();
                    if p.name.is_some() {
                        issues.push(ValidationIssue {
                            entity: format!("place {}", p.id),
                            field: "name".into(),
                            message: "intersection names are derived from their streets".into(),
                        });
                    }
                    intersection_name(&streets[0], &streets[1])
                }
                _ => p.name.unwrap_or_default(),
            };
            places.push(Place {
                id: p.id,
                canonical_name,
                aliases: p.aliases,
                kind: p.kind,
                streets,
                lat: p.lat,
                lon: p.lon,
            });
        }
        let lines = raw
            .lines
            .into_iter()
            .map(|l| TransitLine {
                id: l.id,
                line_number: l.number,
                stops: l.stops,
                departures: l.departures,
                inter_stop_minutes: l.inter_stop_minutes,
            })
            .collect();
        match MapDataset::new(places, lines, raw.walks, raw.roads) {
            Err(DirectionsError::Invalid(mut more)) => {
                issues.append(&mut more);
                Err(DirectionsError::Invalid(issues))
            }
            Ok(_) if !issues.is_empty() => Err(DirectionsError::Invalid(issues)),
            other => other,
        }
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn lines(&self) -> &[TransitLine] {
        &self.lines
    }

    pub fn walks(&self) -> &[WalkEdge] {
        &self.walks
    }

    pub fn roads(&self) -> &[RoadEdge] {
        &self.roads
    }

    pub fn place(&self, id: &str) -> Option<&Place> {
        self.index.get(id).map(|&i| &self.places[i])
    }

    pub(crate) fn place_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Canonical names of every intersection, for speech-recognition hints.
    pub fn intersection_names(&self) -> Vec<String> {
        self.places
            .iter()
            .filter(|p| p.is_intersection())
            .map(|p| p.canonical_name.clone())
            .collect()
    }
}

/// `"<A> and <B>"` with the streets in alphabetical order.
pub fn intersection_name(a: &str, b: &str) -> String {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    format!("{a} and {b}")
}
