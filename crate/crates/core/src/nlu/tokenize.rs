use serde::{Deserialize, Serialize};

/// Raw text plus its deterministic token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub raw: String,
    pub tokens: Vec<String>,
}

impl Utterance {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Utterance { raw, tokens }
    }
}

/// Lowercase, split on whitespace, trim surrounding punctuation.
///
/// Interior punctuation survives (`7:15`, `i'm`, `26th`), and a bare `&`
/// is kept as its own token. Tokens that are pure punctuation are dropped.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split_whitespace()
        .filter_map(|word| {
            if word == "&" {
                return Some("&".to_string());
            }
            let lower = word.to_lowercase();
            let trimmed = lower.trim_matches(|c: char| !c.is_alphanumeric());
            (!trimmed.is_empty()).then(|| trimmed.to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowercases_and_strips() {
        assert_eq!(
            tokenize("No. I'm going to Forbes and Murray!"),
            vec!["no", "i'm", "going", "to", "forbes", "and", "murray"]
        );
    }

    #[test]
    fn keeps_clock_colon_and_ampersand() {
        assert_eq!(
            tokenize("forbes & murray at 7:15."),
            vec!["forbes", "&", "murray", "at", "7:15"]
        );
    }

    #[test]
    fn drops_pure_punctuation() {
        assert_eq!(tokenize(" ... hello -- ? "), vec!["hello"]);
        assert!(tokenize("").is_empty());
    }

    proptest! {
        #[test]
        fn retokenizing_is_stable(raw in "\\PC{0,60}") {
            let once = tokenize(&raw);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }
    }
}
