use std::fmt;

use serde::{Deserialize, Serialize};

use super::NluError;

/// When the user wants to leave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimeSpec {
    Now,
    /// Minutes since midnight, `0..=1439`.
    ClockTime(u16),
}

const IMMEDIATE: &[&str] = &[
    "now",
    "right now",
    "immediately",
    "right away",
    "straight away",
    "this minute",
    "right this minute",
    "as soon as possible",
    "as soon as i can",
    "as early as possible",
    "asap",
];

impl TimeSpec {
    pub fn clock(minutes: u16) -> Option<TimeSpec> {
        (minutes < 24 * 60).then_some(TimeSpec::ClockTime(minutes))
    }

    /// Minutes since midnight, with `Now` resolved against `now`.
    pub fn resolve(self, now: u32) -> u32 {
        match self {
            TimeSpec::Now => now,
            TimeSpec::ClockTime(m) => u32::from(m),
        }
    }
}

impl fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSpec::Now => f.write_str("now"),
            TimeSpec::ClockTime(m) => f.write_str(&format_clock(u32::from(*m))),
        }
    }
}

/// `h:mm am` / `h:mm pm`; values past midnight wrap.
pub fn format_clock(minutes: u32) -> String {
    let m = minutes % (24 * 60);
    let (h, mm) = (m / 60, m % 60);
    let suffix = if h < 12 { "am" } else { "pm" };
    let h12 = match h % 12 {
        0 => 12,
        h => h,
    };
    format!("{h12}:{mm:02} {suffix}")
}

/// Normalize a TIME surface: `5 pm`, `12:15 pm`, `17:30`, `noon`, or an
/// immediacy phrase such as `right now`.
pub fn parse_time(surface: &str) -> Result<TimeSpec, NluError> {
    let norm = surface
        .to_lowercase()
        .replace("a.m.", "am")
        .replace("p.m.", "pm")
        .replace("a.m", "am")
        .replace("p.m", "pm");
    let norm = norm.split_whitespace().collect::<Vec<_>>().join(" ");
    let bad = || NluError::BadTime(surface.to_string());

    if IMMEDIATE.contains(&norm.as_str()) {
        return Ok(TimeSpec::Now);
    }
    match norm.as_str() {
        "noon" | "midday" => return Ok(TimeSpec::ClockTime(12 * 60)),
        "midnight" => return Ok(TimeSpec::ClockTime(0)),
        _ => {}
    }

    let (clock, meridiem) = if let Some(c) = norm.strip_suffix("am") {
        (c.trim(), Some(false))
    } else if let Some(c) = norm.strip_suffix("pm") {
        (c.trim(), Some(true))
    } else {
        (norm.as_str(), None)
    };
    let (h, m) = match clock.split_once(':') {
        Some((h, m)) if m.len() == 2 => (h, m),
        Some(_) => return Err(bad()),
        None => (clock, "00"),
    };
    let digits = |s: &str| !s.is_empty() && s.len() <= 2 && s.chars().all(|c| c.is_ascii_digit());
    if !digits(h) || !digits(m) {
        return Err(bad());
    }
    let (h, m): (u16, u16) = (h.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?);
    if m > 59 {
        return Err(bad());
    }
    let hour = match meridiem {
        Some(pm) => {
            if !(1..=12).contains(&h) {
                return Err(bad());
            }
            (h % 12) + if pm { 12 } else { 0 }
        }
        // A bare hour without am/pm or minutes is too ambiguous to use.
        None if !clock.contains(':') => return Err(bad()),
        None if h > 23 => return Err(bad()),
        None => h,
    };
    Ok(TimeSpec::ClockTime(hour * 60 + m))
}
