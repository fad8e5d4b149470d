//! Grammar, tagger and slot extraction on the shipped data.

use std::sync::OnceLock;

use getgoing_core::assets;
use getgoing_core::nlu::{
    collapse_bio, expand_templates, is_valid_sequence, tag, train_tagger, understand, ExpandConfig,
    Sampling, SlotKey, TaggerModel, TemplateCategory, Utterance,
};
use proptest::prelude::*;

fn model() -> &'static TaggerModel {
    static MODEL: OnceLock<TaggerModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let config = ExpandConfig {
            sampling: Sampling::PerTemplate(150),
            seed: 1,
            noise: 300,
        };
        let data = expand_templates(
            &assets::templates().unwrap(),
            &assets::lexicon().unwrap(),
            config,
        )
        .unwrap();
        train_tagger(&data, 6, 1).unwrap()
    })
}

fn vocabulary() -> Vec<String> {
    let lexicon = assets::lexicon().unwrap();
    let mut words: Vec<String> = lexicon
        .values
        .values()
        .flatten()
        .flat_map(|v| getgoing_core::nlu::tokenize(v))
        .collect();
    words.extend(
        [
            "the",
            "to",
            "from",
            "at",
            "i'm",
            "going",
            "zzyzx",
            "7:15",
            "&",
            "qwertyuiop",
        ]
        .map(String::from),
    );
    words.sort();
    words.dedup();
    words
}

#[test]
fn shipped_grammar_has_43_info_and_12_simple_templates() {
    let templates = assets::templates().unwrap();
    let info = templates
        .iter()
        .filter(|t| t.category == TemplateCategory::InfoGiving)
        .count();
    assert_eq!((templates.len(), info), (55, 43));
}

#[test]
fn default_expansion_is_about_twenty_thousand() {
    let data = expand_templates(
        &assets::templates().unwrap(),
        &assets::lexicon().unwrap(),
        ExpandConfig::default(),
    )
    .unwrap();
    assert!((15_000..=25_000).contains(&data.len()), "{}", data.len());
    assert!(data.iter().all(|ex| is_valid_sequence(&ex.tags)));
}

#[test]
fn labeled_examples_tag_exactly() {
    let fills = understand(model(), "I'm going to CMU at 7 PM");
    let got: Vec<(SlotKey, &str)> = fills.iter().map(|f| (f.key, f.surface.as_str())).collect();
    assert_eq!(got, [(SlotKey::Aloc, "cmu"), (SlotKey::Time, "7 pm")]);

    let fills = understand(model(), "No. I'm going to Forbes and Murray");
    let got: Vec<(SlotKey, &str)> = fills.iter().map(|f| (f.key, f.surface.as_str())).collect();
    assert_eq!(
        got,
        [(SlotKey::No, "no"), (SlotKey::Aloc, "forbes and murray")]
    );

    let fills = understand(model(), "I'm leaving from the airport");
    assert_eq!(fills.len(), 1);
    assert_eq!(fills[0].key, SlotKey::Dloc);
}

#[test]
fn made_up_words_carry_no_slot() {
    for text in ["blorp fnord wibble", "asdf qwer", "hmm"] {
        assert_eq!(understand(model(), text), [], "{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn random_token_strings_tag_validly(picks in prop::collection::vec(any::<prop::sample::Index>(), 0..=40)) {
        let vocab = vocabulary();
        let text = picks.iter().map(|i| i.get(&vocab).as_str()).collect::<Vec<_>>().join(" ");
        let utterance = Utterance::new(text);
        let tags = tag(model(), &utterance);
        prop_assert_eq!(tags.len(), utterance.tokens.len());
        prop_assert!(is_valid_sequence(&tags));
        let fills = collapse_bio(&utterance.tokens, &tags).unwrap();
        for f in fills {
            prop_assert!(f.span.0 < f.span.1 && f.span.1 <= utterance.tokens.len());
            prop_assert_eq!(f.surface, utterance.tokens[f.span.0..f.span.1].join(" "));
        }
    }
}
