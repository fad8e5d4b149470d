use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NluError;

/// The twelve slot keys the tagger can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotKey {
    Dloc,
    Aloc,
    Time,
    Yes,
    No,
    Pause,
    Repeat,
    Continue,
    Restart,
    Transit,
    Driving,
    Change,
}

impl SlotKey {
    pub const ALL: [SlotKey; 12] = [
        SlotKey::Dloc,
        SlotKey::Aloc,
        SlotKey::Time,
        SlotKey::Yes,
        SlotKey::No,
        SlotKey::Pause,
        SlotKey::Repeat,
        SlotKey::Continue,
        SlotKey::Restart,
        SlotKey::Transit,
        SlotKey::Driving,
        SlotKey::Change,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SlotKey::Dloc => "DLOC",
            SlotKey::Aloc => "ALOC",
            SlotKey::Time => "TIME",
            SlotKey::Yes => "YES",
            SlotKey::No => "NO",
            SlotKey::Pause => "PAUSE",
            SlotKey::Repeat => "REPEAT",
            SlotKey::Continue => "CONTINUE",
            SlotKey::Restart => "RESTART",
            SlotKey::Transit => "TRANSIT",
            SlotKey::Driving => "DRIVING",
            SlotKey::Change => "CHANGE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Keys that steer the conversation rather than carry trip content.
    pub fn is_control(self) -> bool {
        matches!(
            self,
            SlotKey::Yes
                | SlotKey::No
                | SlotKey::Pause
                | SlotKey::Repeat
                | SlotKey::Continue
                | SlotKey::Restart
                | SlotKey::Change
        )
    }

    /// Departure, arrival and time: the keys that make a template info-giving.
    pub fn is_trip_info(self) -> bool {
        matches!(self, SlotKey::Dloc | SlotKey::Aloc | SlotKey::Time)
    }
}

impl fmt::Display for SlotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlotKey {
    type Err = NluError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SlotKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| NluError::UnknownSlotKey(s.to_string()))
    }
}

impl Serialize for SlotKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SlotKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A BIO label for one token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BioTag {
    Other,
    Begin(SlotKey),
    Inside(SlotKey),
}

/// `O` plus a `B-` and an `I-` tag per slot key.
pub const TAG_COUNT: usize = 1 + 2 * SlotKey::ALL.len();

impl BioTag {
    /// Dense index: `O` is 0, `B-k` are 1..=12, `I-k` are 13..=24.
    pub fn index(self) -> usize {
        match self {
            BioTag::Other => 0,
            BioTag::Begin(k) => 1 + k.index(),
            BioTag::Inside(k) => 1 + SlotKey::ALL.len() + k.index(),
        }
    }

    pub fn from_index(i: usize) -> Option<BioTag> {
        let n = SlotKey::ALL.len();
        match i {
            0 => Some(BioTag::Other),
            i if i <= n => Some(BioTag::Begin(SlotKey::ALL[i - 1])),
            i if i <= 2 * n => Some(BioTag::Inside(SlotKey::ALL[i - 1 - n])),
            _ => None,
        }
    }

    pub fn all() -> impl Iterator<Item = BioTag> {
        (0..TAG_COUNT).filter_map(BioTag::from_index)
    }

    pub fn key(self) -> Option<SlotKey> {
        match self {
            BioTag::Other => None,
            BioTag::Begin(k) | BioTag::Inside(k) => Some(k),
        }
    }

    /// Whether `self` may directly follow `prev` (`None` = sequence start).
    pub fn may_follow(self, prev: Option<BioTag>) -> bool {
        match self {
            BioTag::Inside(k) => {
                matches!(prev, Some(BioTag::Begin(p)) | Some(BioTag::Inside(p)) if p == k)
            }
            _ => true,
        }
    }
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioTag::Other => f.write_str("O"),
            BioTag::Begin(k) => write!(f, "B-{k}"),
            BioTag::Inside(k) => write!(f, "I-{k}"),
        }
    }
}

impl FromStr for BioTag {
    type Err = NluError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(BioTag::Other);
        }
        let bad = || NluError::BadTag(s.to_string());
        let (prefix, key) = s.split_once('-').ok_or_else(bad)?;
        let key: SlotKey = key.parse().map_err(|_| bad())?;
        match prefix {
            "B" => Ok(BioTag::Begin(key)),
            "I" => Ok(BioTag::Inside(key)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for BioTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BioTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A sequence is valid iff every `I-k` follows a `B-k` or `I-k`.
pub fn is_valid_sequence(tags: &[BioTag]) -> bool {
    first_invalid(tags).is_none()
}

pub(crate) fn first_invalid(tags: &[BioTag]) -> Option<usize> {
    let mut prev = None;
    for (i, &tag) in tags.iter().enumerate() {
        if !tag.may_follow(prev) {
            return Some(i);
        }
        prev = Some(tag);
    }
    None
}

/// A slot value recovered from a tagged utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotFill {
    pub key: SlotKey,
    pub surface: String,
    /// Token range `[start, end)`.
    pub span: (usize, usize),
}

impl SlotFill {
    pub fn new(key: SlotKey, surface: impl Into<String>, span: (usize, usize)) -> Self {
        SlotFill {
            key,
            surface: surface.into(),
            span,
        }
    }
}

/// Collapse maximal `B`/`I` runs into slot fills, in utterance order.
pub fn collapse_bio(tokens: &[String], tags: &[BioTag]) -> Result<Vec<SlotFill>, NluError> {
    if tokens.len() != tags.len() {
        return Err(NluError::LengthMismatch {
            tokens: tokens.len(),
            tags: tags.len(),
        });
    }
    if let Some(position) = first_invalid(tags) {
        return Err(NluError::InvalidSequence { position });
    }

    let mut fills = Vec::new();
    let mut open: Option<(SlotKey, usize)> = None;
    let close = |open: Option<(SlotKey, usize)>, end: usize, fills: &mut Vec<SlotFill>| {
        if let Some((key, start)) = open {
            fills.push(SlotFill::new(
                key,
                tokens[start..end].join(" "),
                (start, end),
            ));
        }
    };
    for (i, tag) in tags.iter().enumerate() {
        match *tag {
            BioTag::Other => {
                close(open.take(), i, &mut fills);
            }
            BioTag::Begin(k) => {
                close(open.take(), i, &mut fills);
                open = Some((k, i));
            }
            BioTag::Inside(_) => {}
        }
    }
    close(open, tags.len(), &mut fills);
    Ok(fills)
}
