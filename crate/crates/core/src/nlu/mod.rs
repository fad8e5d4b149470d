//! Slot tagging: template-driven data synthesis, a BIO sequence tagger,
//! and conversion of tagged utterances into slot fills.

mod dataset;
mod eval;
mod grammar;
mod hints;
mod slot;
mod tagger;
mod time;
mod tokenize;
mod wordclass;

use thiserror::Error;

pub use dataset::{
    expand_templates, fill_template, make_splits, noise_examples, read_dataset, write_dataset,
    ExpandConfig, Sampling, SplitConfig, Splits, TaggedExample, DEFAULT_NOISE_EXAMPLES,
    DEFAULT_SAMPLES_PER_TEMPLATE,
};
pub use eval::{evaluate_tagger, TaggerScores};
pub use grammar::{parse_templates, SlotLexicon, Template, TemplateCategory};
pub use hints::export_asr_hints;
pub use slot::{collapse_bio, is_valid_sequence, BioTag, SlotFill, SlotKey, TAG_COUNT};
pub use tagger::{
    tag, train_tagger, train_tagger_with, TaggerModel, TrainConfig, TrainingMeta, TransitionMask,
    DEFAULT_WORD_DROPOUT, MODEL_FORMAT, MODEL_VERSION,
};
pub use time::{format_clock, parse_time, TimeSpec};
pub use tokenize::{tokenize, Utterance};

/// Tokenize, tag and collapse in one step.
pub fn understand(model: &TaggerModel, text: &str) -> Vec<SlotFill> {
    let utterance = Utterance::new(text);
    let tags = tag(model, &utterance);
    collapse_bio(&utterance.tokens, &tags).expect("tagger output is always a valid sequence")
}

#[derive(Debug, Error)]
pub enum NluError {
    #[error("unknown slot key {0:?}")]
    UnknownSlotKey(String),
    #[error("bad BIO tag {0:?}")]
    BadTag(String),
    #[error("template {template}: placeholder {{{name}}} is not a slot key")]
    UnknownPlaceholder { template: String, name: String },
    #[error("template {id}: {reason}")]
    TemplateSyntax { id: String, reason: String },
    #[error("template {template} uses {key} but the lexicon has no values for it")]
    MissingLexiconKey { template: String, key: SlotKey },
    #[error("lexicon entry for {0} is empty")]
    EmptyLexiconEntry(SlotKey),
    #[error("lexicon value {value:?} for {key} has no tokens")]
    EmptyValue { key: SlotKey, value: String },
    #[error("{tokens} tokens but {tags} tags")]
    LengthMismatch { tokens: usize, tags: usize },
    #[error("invalid BIO sequence: inside tag without a matching begin at position {position}")]
    InvalidSequence { position: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot split values of {0}: need at least two distinct values on each side")]
    CannotSplitKey(SlotKey),
    #[error("cannot hold out templates from a set of {0}")]
    TooFewTemplates(usize),
    #[error("unrecognized time {0:?}")]
    BadTime(String),
    #[error("model format {found} does not match {expected}")]
    ModelVersion { found: String, expected: String },
    #[error("dataset line {line}: {reason}")]
    DatasetLine { line: usize, reason: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
