use strsim::levenshtein;

use super::{DirectionsError, MapDataset, Place};

/// Edit-distance budget for each street of an intersection.
pub const STREET_BUDGET: usize = 2;
/// Upper bound on the whole-string edit budget.
pub const WHOLE_BUDGET: usize = 4;

const JOINERS: [&str; 3] = ["and", "at", "in"];

const STREET_TYPES: [(&str, &str); 12] = [
    ("st", "street"),
    ("ave", "avenue"),
    ("av", "avenue"),
    ("blvd", "boulevard"),
    ("rd", "road"),
    ("dr", "drive"),
    ("pkwy", "parkway"),
    ("ln", "lane"),
    ("pl", "place"),
    ("sq", "square"),
    ("hwy", "highway"),
    ("ter", "terrace"),
];

/// How a free-text location was matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchKind {
    Exact,
    Intersection,
    Fuzzy,
}

#[derive(Debug, Clone, Copy)]
pub struct Resolution<'a> {
    pub place: &'a Place,
    pub kind: MatchKind,
    /// Edit distance between the normalized text and the matched name.
    pub distance: usize,
}

/// Lowercase, drop punctuation and a leading "the", expand street abbreviations.
pub fn normalize(text: &str) -> String {
    let text = text.to_lowercase().replace('&', " and ");
    let cleaned: String = text
        .chars()
        .filter(|c| *c != '\'' && *c != '\u{2019}')
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    let mut words: Vec<&str> = cleaned.split_whitespace().collect();
    if words.len() > 1 && words[0] == "the" {
        words.remove(0);
    }
    words
        .iter()
        .map(|w| {
            STREET_TYPES
                .iter()
                .find(|(abbr, _)| abbr == w)
                .map_or(*w, |(_, full)| full)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The street name without its trailing type word: "forbes avenue" -> "forbes".
fn base_street(norm: &str) -> &str {
    match norm.rsplit_once(' ') {
        Some((base, last)) if STREET_TYPES.iter().any(|(_, full)| *full == last) => base,
        _ => norm,
    }
}

fn street_distance(text: &str, street: &str) -> usize {
    levenshtein(text, street).min(levenshtein(text, base_street(street)))
}

fn names(place: &Place) -> impl Iterator<Item = String> + '_ {
    std::iter::once(&place.canonical_name)
        .chain(&place.aliases)
        .map(|n| normalize(n))
}

/// Map free text to a dataset place.
///
/// Tries an exact name or alias match, then an intersection reading
/// "<A> and|at|in|& <B>" with a per-street budget, then a whole-string
/// fuzzy match. A fuzzy tie between different places is a no-match.
pub fn resolve_location<'a>(
    dataset: &'a MapDataset,
    text: &str,
) -> Result<Resolution<'a>, DirectionsError> {
    let norm = normalize(text);
    if norm.is_empty() {
        return Err(DirectionsError::EmptyLocation);
    }
    let places = dataset.places();

    if let Some(place) = places.iter().find(|p| names(p).any(|n| n == norm)) {
        return Ok(Resolution {
            place,
            kind: MatchKind::Exact,
            distance: 0,
        });
    }

    let words: Vec<&str> = norm.split(' ').collect();
    let mut best: Option<(usize, &Place)> = None;
    for split in 1..words.len().saturating_sub(1) {
        if !JOINERS.contains(&words[split]) {
            continue;
        }
        let left = words[..split].join(" ");
        let right = words[split + 1..].join(" ");
        for place in places.iter().filter(|p| p.is_intersection()) {
            let a = normalize(&place.streets[0]);
            let b = normalize(&place.streets[1]);
            for (x, y) in [(&a, &b), (&b, &a)] {
                let (dl, dr) = (street_distance(&left, x), street_distance(&right, y));
                if dl > STREET_BUDGET || dr > STREET_BUDGET {
                    continue;
                }
                let cost = dl + dr;
                let better = match best {
                    None => true,
                    Some((c, p)) => {
                        cost < c || (cost == c && place.canonical_name < p.canonical_name)
                    }
                };
                if better {
                    best = Some((cost, place));
                }
            }
        }
    }
    if let Some((distance, place)) = best {
        return Ok(Resolution {
            place,
            kind: MatchKind::Intersection,
            distance,
        });
    }

    let ranked = rank(places, &norm);
    let budget = WHOLE_BUDGET.min(norm.chars().count() / 3);
    if let Some(&(d, place)) = ranked.first() {
        let tied = ranked.get(1).is_some_and(|&(d2, _)| d2 == d);
        if d <= budget && !tied {
            return Ok(Resolution {
                place,
                kind: MatchKind::Fuzzy,
                distance: d,
            });
        }
    }
    Err(DirectionsError::NoMatch {
        text: text.to_string(),
        candidates: ranked
            .iter()
            .take(3)
            .map(|(_, p)| p.canonical_name.clone())
            .collect(),
    })
}

/// Places by their closest name, nearest first, ties by canonical name.
fn rank<'a>(places: &'a [Place], norm: &str) -> Vec<(usize, &'a Place)> {
    let mut ranked: Vec<(usize, &Place)> = places
        .iter()
        .map(|p| {
            (
                names(p)
                    .map(|n| levenshtein(norm, &n))
                    .min()
                    .unwrap_or(usize::MAX),
                p,
            )
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.canonical_name.cmp(&b.1.canonical_name))
    });
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map() -> MapDataset {
        MapDataset::from_json(
            r#"{"places": [
            {"id": "air", "kind": "landmark", "name": "Pittsburgh International Airport",
             "aliases": ["airport"], "lat": 40.49, "lon": -80.23},
            {"id": "bn", "kind": "intersection", "streets": ["Beechwood Boulevard", "Northumberland Street"],
             "lat": 40.44, "lon": -79.92},
            {"id": "fm", "kind": "intersection", "streets": ["Forbes Avenue", "Murray Avenue"],
             "lat": 40.43, "lon": -79.92},
            {"id": "fmw", "kind": "intersection", "streets": ["Forbes Avenue", "Morewood Avenue"],
             "lat": 40.44, "lon": -79.94},
            {"id": "pitt", "kind": "landmark", "name": "Pitt", "lat": 40.44, "lon": -79.95},
            {"id": "pnc", "kind": "landmark", "name": "PNC Park", "lat": 40.44, "lon": -80.0}
        ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn normalizes() {
        assert_eq!(
            normalize("The Forbes Ave. & Murray St"),
            "forbes avenue and murray street"
        );
        assert_eq!(normalize("St Paul's"), "street pauls");
        assert_eq!(normalize("the"), "the");
    }

    #[test]
    fn alias_and_intersection_forms() {
        let m = map();
        let r = resolve_location(&m, "airport").unwrap();
        assert_eq!(r.place.canonical_name, "Pittsburgh International Airport");
        assert_eq!(r.kind, MatchKind::Exact);

        let r = resolve_location(&m, "beechwood in northumberland").unwrap();
        assert_eq!(
            r.place.canonical_name,
            "Beechwood Boulevard and Northumberland Street"
        );
        assert_eq!((r.kind, r.distance), (MatchKind::Intersection, 0));

        for text in [
            "Murray and Forbes",
            "forbes ave at murray ave",
            "Forbs & Muray",
        ] {
            assert_eq!(resolve_location(&m, text).unwrap().place.id, "fm", "{text}");
        }
    }

    #[test]
    fn canonical_names_resolve_to_themselves() {
        let m = map();
        for p in m.places() {
            let r = resolve_location(&m, &p.canonical_name).unwrap();
            assert_eq!((r.place.id.as_str(), r.distance), (p.id.as_str(), 0));
        }
    }

    #[test]
    fn fuzzy_within_budget() {
        let m = map();
        let r = resolve_location(&m, "the airprot").unwrap();
        assert_eq!(
            (r.place.id.as_str(), r.kind, r.distance),
            ("air", MatchKind::Fuzzy, 2)
        );
    }

    #[test]
    fn no_match_carries_candidates() {
        let m = map();
        match resolve_location(&m, "cmu") {
            Err(DirectionsError::NoMatch { candidates, .. }) => {
                assert_eq!(candidates.len(), 3);
                assert_eq!(candidates[0], "Pitt");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            resolve_location(&m, " ?! "),
            Err(DirectionsError::EmptyLocation)
        ));
    }
}
