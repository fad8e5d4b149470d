//! Data files compiled into the library.

use crate::delivery::{DeliveryError, PromptBank};
use crate::directions::{DirectionsError, MapDataset};
use crate::nlu::{parse_templates, NluError, SlotLexicon, Template};

pub const TEMPLATES: &str = include_str!("../data/templates.txt");
pub const LEXICON: &str = include_str!("../data/lexicon.json");
pub const DEMO_MAP: &str = include_str!("../data/demo_map.json");
pub const PROMPTS: &str = include_str!("../data/prompts.json");

pub fn templates() -> Result<Vec<Template>, NluError> {
    parse_templates(TEMPLATES)
}

pub fn lexicon() -> Result<SlotLexicon, NluError> {
    SlotLexicon::from_json(LEXICON)
}

/// The shipped Pittsburgh demo map.
pub fn demo_map() -> Result<MapDataset, DirectionsError> {
    MapDataset::from_json(DEMO_MAP)
}

/// The shipped prompt bank.
pub fn prompt_bank() -> Result<PromptBank, DeliveryError> {
    PromptBank::from_json(PROMPTS)
}
