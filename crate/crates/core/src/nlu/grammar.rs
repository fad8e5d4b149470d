//! Templates and the slot lexicon used to synthesize training data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{NluError, SlotKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemplateCategory {
    /// Gives departure, arrival or time information.
    InfoGiving,
    /// A bare response such as a yes/no or a control request.
    Simple,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Piece {
    Literal(String),
    Slot(SlotKey),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub id: String,
    pub pattern: String,
    pub category: TemplateCategory,
    pub(crate) pieces: Vec<Piece>,
}

impl Template {
    /// Parse `pattern`, inferring the category: a template is info-giving
    /// when it mentions DLOC, ALOC or TIME, simple otherwise.
    pub fn new(id: impl Into<String>, pattern: impl Into<String>) -> Result<Self, NluError> {
        let id = id.into();
        let pattern = pattern.into();
        let pieces = parse_pattern(&id, &pattern)?;
        let category = if pieces
            .iter()
            .any(|p| matches!(p, Piece::Slot(k) if k.is_trip_info()))
        {
            TemplateCategory::InfoGiving
        } else {
            TemplateCategory::Simple
        };
        Self::from_parts(id, pattern, category, pieces)
    }

    pub fn with_category(
        id: impl Into<String>,
        pattern: impl Into<String>,
        category: TemplateCategory,
    ) -> Result<Self, NluError> {
        let id = id.into();
        let pattern = pattern.into();
        let pieces = parse_pattern(&id, &pattern)?;
        Self::from_parts(id, pattern, category, pieces)
    }

    fn from_parts(
        id: String,
        pattern: String,
        category: TemplateCategory,
        pieces: Vec<Piece>,
    ) -> Result<Self, NluError> {
        let template = Template {
            id,
            pattern,
            category,
            pieces,
        };
        if category == TemplateCategory::Simple && template.placeholders().count() > 1 {
            return Err(NluError::TemplateSyntax {
                id: template.id,
                reason: "a simple template holds at most one placeholder".into(),
            });
        }
        Ok(template)
    }

    /// Placeholder keys in order of appearance.
    pub fn placeholders(&self) -> impl Iterator<Item = SlotKey> + '_ {
        self.pieces.iter().filter_map(|p| match p {
            Piece::Slot(k) => Some(*k),
            Piece::Literal(_) => None,
        })
    }
}

fn parse_pattern(id: &str, pattern: &str) -> Result<Vec<Piece>, NluError> {
    let syntax = |reason: &str| NluError::TemplateSyntax {
        id: id.to_string(),
        reason: reason.to_string(),
    };
    let mut pieces = Vec::new();
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        if open > 0 {
            pieces.push(Piece::Literal(rest[..open].to_string()));
        }
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or_else(|| syntax("unclosed '{'"))?;
        let name = &after[..close];
        if name.contains('{') {
            return Err(syntax("nested '{'"));
        }
        let key = name
            .parse::<SlotKey>()
            .map_err(|_| NluError::UnknownPlaceholder {
                template: id.to_string(),
                name: name.to_string(),
            })?;
        pieces.push(Piece::Slot(key));
        rest = &after[close + 1..];
    }
    if rest.contains('}') {
        return Err(syntax("stray '}'"));
    }
    if !rest.is_empty() {
        pieces.push(Piece::Literal(rest.to_string()));
    }
    Ok(pieces)
}

/// Parse a templates file: one template per line, `#` starts a comment line.
/// Ids are assigned in file order as `t001`, `t002`, ...
pub fn parse_templates(text: &str) -> Result<Vec<Template>, NluError> {
    text.lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .enumerate()
        .map(|(i, line)| Template::new(format!("t{:03}", i + 1), line))
        .collect()
}

/// Surface values for each slot key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlotLexicon {
    pub values: BTreeMap<SlotKey, Vec<String>>,
}

impl SlotLexicon {
    pub fn from_json(text: &str) -> Result<Self, NluError> {
        let lexicon: SlotLexicon = serde_json::from_str(text)?;
        lexicon.validate()?;
        Ok(lexicon)
    }

    pub fn validate(&self) -> Result<(), NluError> {
        match self.values.iter().find(|(_, v)| v.is_empty()) {
            Some((key, _)) => Err(NluError::EmptyLexiconEntry(*key)),
            None => Ok(()),
        }
    }

    pub fn get(&self, key: SlotKey) -> &[String] {
        self.values.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every placeholder in `templates` must have at least one value.
    pub fn check_covers(&self, templates: &[Template]) -> Result<(), NluError> {
        for template in templates {
            for key in template.placeholders() {
                if self.get(key).is_empty() {
                    return Err(NluError::MissingLexiconKey {
                        template: template.id.clone(),
                        key,
                    });
                }
            }
        }
        Ok(())
    }
}

impl FromIterator<(SlotKey, Vec<String>)> for SlotLexicon {
    fn from_iter<I: IntoIterator<Item = (SlotKey, Vec<String>)>>(iter: I) -> Self {
        SlotLexicon {
            values: iter.into_iter().collect(),
        }
    }
}
