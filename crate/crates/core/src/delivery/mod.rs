//! Prompt rendering in two delivery modes, speech markup, and SSML.
//!
//! Senior-tailored delivery (SeTD) adds an attention prefix before key
//! information, pauses at sentence and clause boundaries, loud emphasis on
//! bus numbers, street names and departure times, and a confirmation
//! question after each step. Standard delivery (SD) speaks the same words
//! without any of that.

mod markup;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use markup::{plain_text, to_ssml, MarkupDoc, Segment, LONG_BREAK_MS, SHORT_BREAK_MS};

pub const CONFIRMATION_QUESTION: &str = "Let me know when you are ready to continue.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeliveryMode {
    #[serde(rename = "setd")]
    SeTD,
    #[serde(rename = "sd")]
    SD,
}

impl DeliveryMode {
    /// The name announced to the user.
    pub fn color(self) -> &'static str {
        match self {
            DeliveryMode::SeTD => "orange",
            DeliveryMode::SD => "blue",
        }
    }
}

impl fmt::Display for DeliveryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeliveryMode::SeTD => "setd",
            DeliveryMode::SD => "sd",
        })
    }
}

impl FromStr for DeliveryMode {
    type Err = DeliveryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "setd" | "orange" => Ok(DeliveryMode::SeTD),
            "sd" | "blue" => Ok(DeliveryMode::SD),
            _ => Err(DeliveryError::BadMode(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum DeliveryError {
    #[error("no prompt named {0:?}")]
    UnknownPrompt(String),
    #[error("prompt {prompt:?} needs a value for {{{name}}}")]
    MissingBinding { prompt: String, name: String },
    #[error("prompt bank: {0}")]
    BadBank(String),
    #[error("unknown delivery mode {0:?}")]
    BadMode(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Placeholder values for one prompt, plus the terms to speak loudly.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bindings {
    pub values: BTreeMap<String, String>,
    /// Bus numbers, street names and departure times.
    pub emphasis: Vec<String>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, name: &str, value: impl Into<String>) -> Self {
        self.values.insert(name.to_string(), value.into());
        self
    }

    pub fn emphasize(mut self, term: impl Into<String>) -> Self {
        let term = term.into();
        if !term.is_empty() && !self.emphasis.contains(&term) {
            self.emphasis.push(term);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptEntry {
    /// Attention prefixes; present exactly on key-information prompts.
    #[serde(default)]
    pub prefixes: Vec<String>,
    pub variants: Vec<String>,
}

impl PromptEntry {
    pub fn is_key_info(&self) -> bool {
        !self.prefixes.is_empty()
    }
}

/// Hand-written utterances for every prompt key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBank {
    entries: BTreeMap<String, PromptEntry>,
}

impl PromptBank {
    pub fn from_json(text: &str) -> Result<Self, DeliveryError> {
        let entries: BTreeMap<String, PromptEntry> = serde_json::from_str(text)?;
        for (key, entry) in &entries {
            if entry.variants.is_empty() {
                return Err(DeliveryError::BadBank(format!("{key}: no variants")));
            }
            for v in entry.variants.iter().chain(&entry.prefixes) {
                placeholders(v).map_err(|e| DeliveryError::BadBank(format!("{key}: {e}")))?;
            }
        }
        Ok(PromptBank { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, key: &str) -> Option<&PromptEntry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Every placeholder used by any variant of `key`.
    pub fn placeholders(&self, key: &str) -> Result<BTreeSet<String>, DeliveryError> {
        let entry = self
            .entries
            .get(key)
            .ok_or_else(|| DeliveryError::UnknownPrompt(key.to_string()))?;
        let mut out = BTreeSet::new();
        for v in &entry.variants {
            out.extend(placeholders(v).expect("validated at load"));
        }
        Ok(out)
    }

    /// Choose a variant (and prefix) from `seed` and lay it out for `mode`.
    pub fn render(
        &self,
        prompt_key: &str,
        bindings: &Bindings,
        mode: DeliveryMode,
        seed: u64,
    ) -> Result<MarkupDoc, DeliveryError> {
        let entry = self
            .entries
            .get(prompt_key)
            .ok_or_else(|| DeliveryError::UnknownPrompt(prompt_key.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(prompt_key));
        let variant = &entry.variants[rng.gen_range(0..entry.variants.len())];
        let prefix = (!entry.prefixes.is_empty())
            .then(|| &entry.prefixes[rng.gen_range(0..entry.prefixes.len())]);
        let body = fill(prompt_key, variant, bindings)?;

        let mut doc = MarkupDoc::new();
        match mode {
            DeliveryMode::SD => {
                doc.text(body);
            }
            DeliveryMode::SeTD => {
                if let Some(p) = prefix {
                    doc.text(fill(prompt_key, p, bindings)?)
                        .text(" ")
                        .pause(LONG_BREAK_MS);
                }
                lay_out(&mut doc, &body, &bindings.emphasis);
            }
        }
        Ok(doc)
    }
}

/// The prefix a SeTD render of `prompt_key` with `seed` starts with, if any.
pub fn chosen_prefix<'a>(bank: &'a PromptBank, prompt_key: &str, seed: u64) -> Option<&'a str> {
    let entry = bank.get(prompt_key)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(prompt_key));
    let _ = rng.gen_range(0..entry.variants.len());
    (!entry.prefixes.is_empty())
        .then(|| entry.prefixes[rng.gen_range(0..entry.prefixes.len())].as_str())
}

/// Append the step-completion question in SeTD; SD is left unchanged.
pub fn confirmation_wrap(step_doc: &MarkupDoc, mode: DeliveryMode) -> MarkupDoc {
    let mut doc = step_doc.clone();
    if mode == DeliveryMode::SeTD {
        if !doc.is_empty() {
            doc.text(" ").pause(LONG_BREAK_MS);
        }
        doc.text(CONFIRMATION_QUESTION);
    }
    doc
}

/// One turn's prompts as a single document: separated by a long pause in
/// SeTD and by a space in SD.
pub fn join(docs: &[MarkupDoc], mode: DeliveryMode) -> MarkupDoc {
    let mut out = MarkupDoc::new();
    for doc in docs.iter().filter(|d| !d.is_empty()) {
        if !out.is_empty() {
            out.text(" ");
            if mode == DeliveryMode::SeTD {
                out.pause(LONG_BREAK_MS);
            }
        }
        out.append(doc);
    }
    out
}

/// Stable string hash so a prompt's variant does not depend on the build.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn placeholders(template: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| format!("unclosed placeholder in {template:?}"))?;
        let name = &after[..close];
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad placeholder {{{name}}} in {template:?}"));
        }
        out.push(name.to_string());
        rest = &after[close + 1..];
    }
    if rest.contains('}') {
        return Err(format!("stray '}}' in {template:?}"));
    }
    Ok(out)
}

fn fill(prompt: &str, template: &str, bindings: &Bindings) -> Result<String, DeliveryError> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}').expect("validated at load");
        let name = &after[..close];
        let value = bindings
            .values
            .get(name)
            .ok_or_else(|| DeliveryError::MissingBinding {
                prompt: prompt.to_string(),
                name: name.to_string(),
            })?;
        out.push_str(value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Non-overlapping whole-word occurrences of the terms, longest term first.
fn find_terms(text: &str, terms: &[String]) -> Vec<(usize, usize)> {
    let mut sorted: Vec<&String> = terms.iter().filter(|t| !t.is_empty()).collect();
    sorted.sort_by_key(|t| std::cmp::Reverse(t.len()));
    let boundary = |c: Option<char>| c.is_none_or(|c| !c.is_alphanumeric());
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for term in sorted {
        for (start, _) in text.match_indices(term.as_str()) {
            let end = start + term.len();
            if !boundary(text[..start].chars().next_back()) || !boundary(text[end..].chars().next())
            {
                continue;
            }
            if spans.iter().any(|&(s, e)| start < e && s < end) {
                continue;
            }
            spans.push((start, end));
        }
    }
    spans.sort_unstable();
    spans
}

/// SeTD layout: loud terms with a long pause before them, long pauses at
/// sentence ends, short pauses after clause commas. Pauses go only where
/// the text already has whitespace, so the words are unchanged.
fn lay_out(doc: &mut MarkupDoc, body: &str, emphasis: &[String]) {
    let mut at = 0;
    for (start, end) in find_terms(body, emphasis) {
        pause_text(doc, &body[at..start]);
        if start == 0 || body[..start].ends_with(char::is_whitespace) {
            doc.pause(LONG_BREAK_MS);
        }
        doc.emph(&body[start..end]);
        at = end;
    }
    pause_text(doc, &body[at..]);
}

fn pause_text(doc: &mut MarkupDoc, text: &str) {
    let mut last = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (i, &(_, c)) in chars.iter().enumerate() {
        let next_is_space = chars.get(i + 1).is_some_and(|&(_, n)| n.is_whitespace());
        let pause = match c {
            '.' | '?' | '!' if next_is_space => LONG_BREAK_MS,
            ',' | ';' if next_is_space => SHORT_BREAK_MS,
            _ => continue,
        };
        let cut = chars[i + 1].0 + 1;
        doc.text(&text[last..cut]);
        doc.pause(pause);
        last = cut;
    }
    doc.text(&text[last..]);
}
