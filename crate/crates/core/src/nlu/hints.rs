use std::collections::BTreeSet;

use super::{tokenize, SlotLexicon};

/// Phrase list for biasing a speech recognizer: every non-location,
/// non-time lexicon value plus each intersection name, lowercased,
/// deduplicated and sorted.
pub fn export_asr_hints(lexicon: &SlotLexicon, intersections: &[String]) -> Vec<String> {
    let generic = lexicon
        .values
        .iter()
        .filter(|(key, _)| !key.is_trip_info())
        .flat_map(|(_, values)| values.iter());
    generic
        .chain(intersections.iter())
        .map(|phrase| tokenize(phrase).join(" "))
        .filter(|phrase| !phrase.is_empty())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
