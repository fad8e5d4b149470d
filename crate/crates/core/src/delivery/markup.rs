use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const LONG_BREAK_MS: u32 = 800;
pub const SHORT_BREAK_MS: u32 = 300;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Segment {
    Text(String),
    /// Pause in milliseconds; always [`LONG_BREAK_MS`] or [`SHORT_BREAK_MS`].
    Break(u32),
    /// Spoken at loud volume.
    Emph(String),
}

/// Speech markup: text interleaved with pauses and loud spans.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkupDoc {
    segments: Vec<Segment>,
}

impl MarkupDoc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn text(&mut self, s: impl Into<String>) -> &mut Self {
        let s = s.into();
        if s.is_empty() {
            return self;
        }
        match self.segments.last_mut() {
            Some(Segment::Text(prev)) => prev.push_str(&s),
            _ => self.segments.push(Segment::Text(s)),
        }
        self
    }

    pub fn emph(&mut self, s: impl Into<String>) -> &mut Self {
        self.segments.push(Segment::Emph(s.into()));
        self
    }

    /// Adjacent pauses merge into the longer one.
    pub fn pause(&mut self, ms: u32) -> &mut Self {
        debug_assert!(ms == LONG_BREAK_MS || ms == SHORT_BREAK_MS);
        match self.segments.last_mut() {
            Some(Segment::Break(prev)) => *prev = (*prev).max(ms),
            _ => self.segments.push(Segment::Break(ms)),
        }
        self
    }

    pub fn append(&mut self, other: &MarkupDoc) -> &mut Self {
        for seg in &other.segments {
            match seg {
                Segment::Text(s) => self.text(s.clone()),
                Segment::Break(ms) => self.pause(*ms),
                Segment::Emph(s) => self.emph(s.clone()),
            };
        }
        self
    }

    pub fn break_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Break(_)))
            .count()
    }

    pub fn emphasized(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Emph(e) => Some(e.as_str()),
            _ => None,
        })
    }

    /// Split at pauses: each chunk carries the pause that follows it.
    pub fn chunks(&self) -> Vec<(MarkupDoc, u32)> {
        let mut out = Vec::new();
        let mut cur = MarkupDoc::new();
        for seg in &self.segments {
            match seg {
                Segment::Break(ms) => out.push((std::mem::take(&mut cur), *ms)),
                Segment::Text(s) => {
                    cur.text(s.clone());
                }
                Segment::Emph(s) => {
                    cur.emph(s.clone());
                }
            }
        }
        if !cur.is_empty() || out.is_empty() {
            out.push((cur, 0));
        }
        out
    }
}

fn escape(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
}

pub fn to_ssml(doc: &MarkupDoc) -> String {
    let mut out = String::from("<speak>");
    for seg in &doc.segments {
        match seg {
            Segment::Text(s) => escape(s, &mut out),
            Segment::Break(ms) => {
                let _ = write!(out, "<break time=\"{ms}ms\"/>");
            }
            Segment::Emph(s) => {
                out.push_str("<prosody volume=\"loud\">");
                escape(s, &mut out);
                out.push_str("</prosody>");
            }
        }
    }
    out.push_str("</speak>");
    out
}

/// Words only: pauses become spaces and whitespace runs collapse.
pub fn plain_text(doc: &MarkupDoc) -> String {
    let mut raw = String::new();
    for seg in &doc.segments {
        match seg {
            Segment::Text(s) | Segment::Emph(s) => raw.push_str(s),
            Segment::Break(_) => raw.push(' '),
        }
    }
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}
