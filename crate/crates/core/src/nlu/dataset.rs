//! Synthetic dataset generation and the JSON Lines dataset format.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grammar::{Piece, SlotLexicon, Template, TemplateCategory};
use super::slot::first_invalid;
use super::{tokenize, BioTag, NluError, SlotKey};

/// Tokens with one BIO tag each; the tag sequence is always valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedExample {
    pub tokens: Vec<String>,
    pub tags: Vec<BioTag>,
}

impl TaggedExample {
    pub fn new(tokens: Vec<String>, tags: Vec<BioTag>) -> Result<Self, NluError> {
        if tokens.len() != tags.len() {
            return Err(NluError::LengthMismatch {
                tokens: tokens.len(),
                tags: tags.len(),
            });
        }
        if let Some(position) = first_invalid(&tags) {
            return Err(NluError::InvalidSequence { position });
        }
        Ok(TaggedExample { tokens, tags })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl<'de> Deserialize<'de> for TaggedExample {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            tokens: Vec<String>,
            tags: Vec<BioTag>,
        }
        let raw = Raw::deserialize(deserializer)?;
        TaggedExample::new(raw.tokens, raw.tags).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Every combination of slot values, in lexicon order.
    Exhaustive,
    /// Up to `n` distinct value combinations per template. Templates with
    /// fewer combinations than `n` contribute all of them.
    PerTemplate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandConfig {
    pub sampling: Sampling,
    pub seed: u64,
    /// All-Other utterances appended after the template examples.
    pub noise: usize,
}

impl Default for ExpandConfig {
    fn default() -> Self {
        ExpandConfig {
            sampling: Sampling::PerTemplate(DEFAULT_SAMPLES_PER_TEMPLATE),
            seed: 0,
            noise: DEFAULT_NOISE_EXAMPLES,
        }
    }
}

/// Without these the tagger has never seen an utterance with no slot in
/// it and labels any unknown word as a slot.
pub const DEFAULT_NOISE_EXAMPLES: usize = 1000;

/// Gives ~19.6k examples on the shipped grammar.
pub const DEFAULT_SAMPLES_PER_TEMPLATE: usize = 520;

/// Fill every template with lexicon values and tag the result.
pub fn expand_templates(
    templates: &[Template],
    lexicon: &SlotLexicon,
    config: ExpandConfig,
) -> Result<Vec<TaggedExample>, NluError> {
    lexicon.check_covers(templates)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    for template in templates {
        let keys: Vec<SlotKey> = template.placeholders().collect();
        let sizes: Vec<usize> = keys.iter().map(|&k| lexicon.get(k).len()).collect();
        let total = sizes
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .unwrap_or(usize::MAX);

        let combos: Vec<Vec<usize>> = match config.sampling {
            Sampling::PerTemplate(n) if n < total => {
                let mut seen = HashSet::new();
                let mut picked = Vec::with_capacity(n);
                while picked.len() < n {
                    let combo: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
                    if seen.insert(combo.clone()) {
                        picked.push(combo);
                    }
                }
                picked
            }
            _ => all_combinations(&sizes),
        };

        for combo in combos {
            let values: Vec<&str> = keys
                .iter()
                .zip(&combo)
                .map(|(&k, &i)| lexicon.get(k)[i].as_str())
                .collect();
            out.push(fill_template(template, &values)?);
        }
    }
    if config.noise > 0 {
        out.extend(noise_examples(
            templates,
            lexicon,
            config.noise,
            config.seed,
        ));
    }
    tracing::info!(
        templates = templates.len(),
        examples = out.len(),
        "expanded templates"
    );
    Ok(out)
}

const CONSONANTS: &[u8] = b"bcdfghjklmnprstvwz";
const VOWELS: &[u8] = b"aeiou";

/// `n` utterances of one to six made-up words, every tag Other. Words that
/// occur in a template or a lexicon value are never produced.
pub fn noise_examples(
    templates: &[Template],
    lexicon: &SlotLexicon,
    n: usize,
    seed: u64,
) -> Vec<TaggedExample> {
    let mut known: HashSet<String> = lexicon
        .values
        .values()
        .flatten()
        .flat_map(|v| tokenize(v))
        .collect();
    for t in templates {
        for piece in &t.pieces {
            if let Piece::Literal(text) = piece {
                known.extend(tokenize(text));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x006e_6f69_7365);
    let word = |rng: &mut ChaCha8Rng| loop {
        let mut w = String::new();
        for _ in 0..rng.gen_range(1..=3) {
            w.push(*CONSONANTS.choose(rng).unwrap() as char);
            w.push(*VOWELS.choose(rng).unwrap() as char);
        }
        if rng.gen_bool(0.5) {
            w.push(*CONSONANTS.choose(rng).unwrap() as char);
        }
        if !known.contains(&w) {
            return w;
        }
    };
    (0..n)
        .map(|_| {
            let tokens: Vec<String> = (0..rng.gen_range(1..=6)).map(|_| word(&mut rng)).collect();
            let tags = vec![BioTag::Other; tokens.len()];
            TaggedExample { tokens, tags }
        })
        .collect()
}

fn all_combinations(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut combos = vec![Vec::new()];
    for &size in sizes {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                (0..size).map(move |i| {
                    let mut c = prefix.clone();
                    c.push(i);
                    c
                })
            })
            .collect();
    }
    combos
}

/// Insert `values` (one per placeholder, in order) and tag the tokens.
pub fn fill_template(template: &Template, values: &[&str]) -> Result<TaggedExample, NluError> {
    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    let mut values = values.iter();
    for piece in &template.pieces {
        match piece {
            Piece::Literal(text) => {
                for tok in tokenize(text) {
                    tokens.push(tok);
                    tags.push(BioTag::Other);
                }
            }
            Piece::Slot(key) => {
                let value = values.next().ok_or_else(|| NluError::TemplateSyntax {
                    id: template.id.clone(),
                    reason: "fewer values than placeholders".into(),
                })?;
                let value_tokens = tokenize(value);
                if value_tokens.is_empty() {
                    return Err(NluError::EmptyValue {
                        key: *key,
                        value: value.to_string(),
                    });
                }
                for (i, tok) in value_tokens.into_iter().enumerate() {
                    tokens.push(tok);
                    tags.push(if i == 0 {
                        BioTag::Begin(*key)
                    } else {
                        BioTag::Inside(*key)
                    });
                }
            }
        }
    }
    TaggedExample::new(tokens, tags)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub seed: u64,
    pub samples_per_template: usize,
    /// Share of each key's distinct values held out for testing.
    pub value_test_fraction: f64,
    /// Share of each template category held out for testing.
    pub template_test_fraction: f64,
    /// All-Other utterances added to the training side only.
    pub noise: usize,
}

impl SplitConfig {
    pub fn with_seed(seed: u64) -> Self {
        SplitConfig {
            seed,
            ..SplitConfig::default()
        }
    }
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            seed: 0,
            samples_per_template: DEFAULT_SAMPLES_PER_TEMPLATE,
            value_test_fraction: 0.25,
            template_test_fraction: 0.2,
            noise: DEFAULT_NOISE_EXAMPLES,
        }
    }
}

/// Train and held-out datasets for the two generalization experiments.
#[derive(Debug, Clone)]
pub struct Splits {
    /// Train templates filled with train values.
    pub train: Vec<TaggedExample>,
    /// Train templates filled with held-out values.
    pub unseen_slots: Vec<TaggedExample>,
    /// Held-out templates filled with held-out values.
    pub unseen_templates: Vec<TaggedExample>,
    pub train_lexicon: SlotLexicon,
    pub test_lexicon: SlotLexicon,
    pub train_template_ids: Vec<String>,
    pub test_template_ids: Vec<String>,
}

/// Partition values and templates into train and test sides.
///
/// Values are partitioned by their normalized (tokenized) string across all
/// keys, so a string shared by two keys lands on the same side for both.
pub fn make_splits(
    templates: &[Template],
    lexicon: &SlotLexicon,
    config: SplitConfig,
) -> Result<Splits, NluError> {
    lexicon.check_covers(templates)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut side: BTreeMap<String, bool> = BTreeMap::new(); // true = test
    let mut train_lexicon = SlotLexicon::default();
    let mut test_lexicon = SlotLexicon::default();
    for (&key, values) in &lexicon.values {
        let mut distinct: Vec<(String, &String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for v in values {
            let norm = tokenize(v).join(" ");
            if seen.insert(norm.clone()) {
                distinct.push((norm, v));
            }
        }
        if distinct.len() < 2 {
            return Err(NluError::CannotSplitKey(key));
        }
        // Stratify by token count so each length class keeps a train value.
        let mut strata: BTreeMap<usize, Vec<&(String, &String)>> = BTreeMap::new();
        for entry in &distinct {
            strata
                .entry(entry.0.split(' ').count())
                .or_default()
                .push(entry);
        }
        let mut assigned_here = Vec::new();
        for group in strata.values_mut() {
            group.shuffle(&mut rng);
            let cap = group.len() - 1;
            let want_test =
                ((group.len() as f64 * config.value_test_fraction).round() as usize).min(cap);
            let mut n_test = group
                .iter()
                .filter(|(n, _)| side.get(n) == Some(&true))
                .count();
            for (norm, _) in group.iter() {
                if !side.contains_key(norm) {
                    let is_test = n_test < want_test;
                    n_test += usize::from(is_test);
                    side.insert(norm.clone(), is_test);
                    assigned_here.push(norm.clone());
                }
            }
        }
        let n_train = distinct.iter().filter(|(n, _)| !side[n]).count();
        if !distinct.iter().any(|(n, _)| side[n]) && n_train >= 2 {
            // every stratum was a singleton: hold out one value anyway
            if let Some(norm) = assigned_here.choose(&mut rng) {
                side.insert(norm.clone(), true);
            }
        }
        let (test, train): (Vec<_>, Vec<_>) = distinct.iter().partition(|(n, _)| side[n]);
        if test.is_empty() || train.is_empty() {
            return Err(NluError::CannotSplitKey(key));
        }
        // keep lexicon order within each side
        let keep = |part: &[&(String, &String)]| -> Vec<String> {
            let chosen: BTreeSet<&str> = part.iter().map(|(_, v)| v.as_str()).collect();
            values
                .iter()
                .filter(|v| chosen.contains(v.as_str()))
                .cloned()
                .collect()
        };
        train_lexicon.values.insert(key, keep(&train));
        test_lexicon.values.insert(key, keep(&test));
    }

    let mut train_templates = Vec::new();
    let mut test_templates = Vec::new();
    for category in [TemplateCategory::InfoGiving, TemplateCategory::Simple] {
        let mut group: Vec<&Template> = templates
            .iter()
            .filter(|t| t.category == category)
            .collect();
        if group.len() < 2 {
            train_templates.extend(group);
            continue;
        }
        group.shuffle(&mut rng);
        let n_test = ((group.len() as f64 * config.template_test_fraction).round() as usize)
            .clamp(1, group.len() - 1);
        let (test, train) = group.split_at(n_test);
        test_templates.extend(test.iter().copied());
        train_templates.extend(train.iter().copied());
    }
    if test_templates.is_empty() || train_templates.is_empty() {
        return Err(NluError::TooFewTemplates(templates.len()));
    }
    // restore file order
    let order = |ts: &mut Vec<&Template>| {
        ts.sort_by_key(|t| templates.iter().position(|x| x.id == t.id));
    };
    order(&mut train_templates);
    order(&mut test_templates);
    let train_templates: Vec<Template> = train_templates.into_iter().cloned().collect();
    let test_templates: Vec<Template> = test_templates.into_iter().cloned().collect();

    let sampling = Sampling::PerTemplate(config.samples_per_template);
    let expand = |ts: &[Template], lex: &SlotLexicon, salt: u64, noise: usize| {
        expand_templates(
            ts,
            lex,
            ExpandConfig {
                sampling,
                seed: config.seed.wrapping_add(salt),
                noise,
            },
        )
    };
    let splits = Splits {
        train: expand(&train_templates, &train_lexicon, 1, config.noise)?,
        unseen_slots: expand(&train_templates, &test_lexicon, 2, 0)?,
        unseen_templates: expand(&test_templates, &test_lexicon, 3, 0)?,
        train_template_ids: train_templates.iter().map(|t| t.id.clone()).collect(),
        test_template_ids: test_templates.iter().map(|t| t.id.clone()).collect(),
        train_lexicon,
        test_lexicon,
    };
    tracing::info!(
        train = splits.train.len(),
        unseen_slots = splits.unseen_slots.len(),
        unseen_templates = splits.unseen_templates.len(),
        "built splits"
    );
    Ok(splits)
}

pub fn write_dataset<W: Write>(mut out: W, examples: &[TaggedExample]) -> Result<(), NluError> {
    for example in examples {
        serde_json::to_writer(&mut out, example)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_dataset<R: BufRead>(input: R) -> Result<Vec<TaggedExample>, NluError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let example = serde_json::from_str(&line).map_err(|e| NluError::DatasetLine {
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(example);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlu::collapse_bio;

    fn lex(pairs: &[(SlotKey, &[&str])]) -> SlotLexicon {
        pairs
            .iter()
            .map(|(k, vs)| (*k, vs.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    fn exhaustive() -> ExpandConfig {
        ExpandConfig {
            sampling: Sampling::Exhaustive,
            seed: 0,
            noise: 0,
        }
    }

    #[test]
    fn labeled_block_example() {
        use BioTag::*;
        use SlotKey::*;
        let t = Template::new("t", "I want to go to {ALOC} at {TIME} by {TRANSIT}").unwrap();
        let ex =
            fill_template(&t, &["Pittsburgh International Airport", "7 am", "transit"]).unwrap();
        let words: Vec<&str> = ex.tokens.iter().map(String::as_str).collect();
        assert_eq!(
            words,
            [
                "i",
                "want",
                "to",
                "go",
                "to",
                "pittsburgh",
                "international",
                "airport",
                "at",
                "7",
                "am",
                "by",
                "transit"
            ]
        );
        assert_eq!(
            ex.tags,
            [
                Other,
                Other,
                Other,
                Other,
                Other,
                Begin(Aloc),
                Inside(Aloc),
                Inside(Aloc),
                Other,
                Begin(Time),
                Inside(Time),
                Other,
                Begin(Transit)
            ]
        );
    }

    #[test]
    fn no_placeholder_template_gives_one_example() {
        let t = Template::new("t", "hello").unwrap();
        for sampling in [Sampling::Exhaustive, Sampling::PerTemplate(50)] {
            let out = expand_templates(
                std::slice::from_ref(&t),
                &SlotLexicon::default(),
                ExpandConfig {
                    sampling,
                    seed: 1,
                    noise: 0,
                },
            )
            .unwrap();
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].tags, vec![BioTag::Other]);
        }
    }

    #[test]
    fn exhaustive_yes_enumeration() {
        // Hand enumeration: one example per value, in lexicon order.
        let t = Template::new("t", "{YES}").unwrap();
        let lexicon = lex(&[(SlotKey::Yes, &["yes", "sure", "of course"])]);
        let out = expand_templates(&[t], &lexicon, exhaustive()).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].tags, vec![BioTag::Begin(SlotKey::Yes)]);
        assert_eq!(out[1].tokens, vec!["sure"]);
        assert_eq!(out[2].tokens, vec!["of", "course"]);
        assert_eq!(
            out[2].tags,
            vec![BioTag::Begin(SlotKey::Yes), BioTag::Inside(SlotKey::Yes)]
        );
    }

    #[test]
    fn missing_lexicon_key_names_template_and_key() {
        let t = Template::new("t042", "i'm at {DLOC}").unwrap();
        let err = expand_templates(&[t], &SlotLexicon::default(), exhaustive()).unwrap_err();
        match err {
            NluError::MissingLexiconKey { template, key } => {
                assert_eq!(template, "t042");
                assert_eq!(key, SlotKey::Dloc);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sampling_is_deterministic_and_distinct() {
        let t = Template::new("t", "from {DLOC} to {ALOC}").unwrap();
        let places: Vec<String> = (0..10).map(|i| format!("place {i}")).collect();
        let lexicon: SlotLexicon = [(SlotKey::Dloc, places.clone()), (SlotKey::Aloc, places)]
            .into_iter()
            .collect();
        let cfg = ExpandConfig {
            sampling: Sampling::PerTemplate(30),
            seed: 9,
            noise: 0,
        };
        let a = expand_templates(std::slice::from_ref(&t), &lexicon, cfg).unwrap();
        let b = expand_templates(&[t], &lexicon, cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 30);
        let distinct: HashSet<_> = a.iter().map(|e| e.tokens.clone()).collect();
        assert_eq!(distinct.len(), 30);
    }

    #[test]
    fn gold_tags_collapse_to_inserted_values() {
        let t = Template::new(
            "t",
            "i'm leaving from {DLOC} and going to {ALOC} at {TIME}.",
        )
        .unwrap();
        let ex = fill_template(&t, &["Penn and 26th", "Bayard and Craig", "12:15 pm"]).unwrap();
        let fills = collapse_bio(&ex.tokens, &ex.tags).unwrap();
        let got: Vec<(SlotKey, &str)> = fills.iter().map(|f| (f.key, f.surface.as_str())).collect();
        assert_eq!(
            got,
            [
                (SlotKey::Dloc, "penn and 26th"),
                (SlotKey::Aloc, "bayard and craig"),
                (SlotKey::Time, "12:15 pm")
            ]
        );
    }

    #[test]
    fn split_holds_out_values_from_train() {
        let templates = vec![
            Template::new("a", "i'm leaving from {DLOC}").unwrap(),
            Template::new("b", "i'm at {DLOC}").unwrap(),
        ];
        let lexicon = lex(&[(SlotKey::Dloc, &["cmu", "airport", "penn and 26th"])]);
        let splits = make_splits(
            &templates,
            &lexicon,
            SplitConfig {
                value_test_fraction: 0.34,
                ..SplitConfig::with_seed(3)
            },
        )
        .unwrap();
        assert_eq!(splits.train_lexicon.get(SlotKey::Dloc).len(), 2);
        assert_eq!(splits.test_lexicon.get(SlotKey::Dloc).len(), 1);
        let held_out = &splits.test_lexicon.get(SlotKey::Dloc)[0];
        for ex in &splits.train {
            let fills = collapse_bio(&ex.tokens, &ex.tags).unwrap();
            assert!(fills.iter().all(|f| &f.surface != held_out));
        }
        assert_eq!(splits.test_template_ids.len(), 1);
        assert!(!splits.unseen_templates.is_empty());
    }

    #[test]
    fn split_errors() {
        let one = vec![Template::new("a", "i'm at {DLOC}").unwrap()];
        let lexicon = lex(&[(SlotKey::Dloc, &["cmu", "airport"])]);
        assert!(matches!(
            make_splits(&one, &lexicon, SplitConfig::default()),
            Err(NluError::TooFewTemplates(1))
        ));
        let two = vec![
            Template::new("a", "i'm at {DLOC}").unwrap(),
            Template::new("b", "from {DLOC}").unwrap(),
        ];
        let thin = lex(&[(SlotKey::Dloc, &["cmu"])]);
        assert!(matches!(
            make_splits(&two, &thin, SplitConfig::default()),
            Err(NluError::CannotSplitKey(SlotKey::Dloc))
        ));
    }

    #[test]
    fn jsonl_round_trip_uses_tag_strings() {
        let t = Template::new("t", "to {ALOC}").unwrap();
        let ex = fill_template(&t, &["forbes and murray"]).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, std::slice::from_ref(&ex)).unwrap();
        let line = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            line.trim(),
            r#"{"tokens":["to","forbes","and","murray"],"tags":["O","B-ALOC","I-ALOC","I-ALOC"]}"#
        );
        assert_eq!(read_dataset(&buf[..]).unwrap(), vec![ex]);
        assert!(read_dataset(&br#"{"tokens":["a"],"tags":["I-NO"]}"#[..]).is_err());
    }

    #[test]
    fn noise_is_all_other_and_avoids_known_words() {
        let t = Template::new("t", "take me to {ALOC} please").unwrap();
        let lexicon = lex(&[(SlotKey::Aloc, &["ba", "cmu"])]);
        let noise = noise_examples(std::slice::from_ref(&t), &lexicon, 500, 3);
        assert_eq!(noise.len(), 500);
        for ex in &noise {
            assert!((1..=6).contains(&ex.len()));
            assert!(ex.tags.iter().all(|&t| t == BioTag::Other));
            for tok in &ex.tokens {
                assert!(!["ba", "cmu", "take", "me", "to", "please"].contains(&tok.as_str()));
            }
        }
        assert_eq!(noise, noise_examples(&[t], &lexicon, 500, 3));
    }
}
