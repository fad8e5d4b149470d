//! Linear sequence tagger: averaged structured perceptron over sparse
//! lexical and shape features, decoded with Viterbi under a transition
//! mask that rules out every invalid BIO sequence.

use super::wordclass::word_class;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use arrayvec::ArrayVec;

use super::{BioTag, NluError, SlotKey, TaggedExample, Utterance, TAG_COUNT};

const START: usize = TAG_COUNT;
pub const MODEL_FORMAT: &str = "getgoing-tagger";
pub const MODEL_VERSION: u32 = 1;

type Row = [f64; TAG_COUNT];

/// Allowed tag bigrams. Row `TAG_COUNT` is the sequence start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMask {
    allowed: [[bool; TAG_COUNT]; TAG_COUNT + 1],
}

impl TransitionMask {
    pub fn bio() -> Self {
        let mut allowed = [[false; TAG_COUNT]; TAG_COUNT + 1];
        for (prev, row) in allowed.iter_mut().enumerate() {
            let prev_tag = BioTag::from_index(prev);
            for (next, cell) in row.iter_mut().enumerate() {
                let next_tag = BioTag::from_index(next).expect("tag index in range");
                *cell = next_tag.may_follow(prev_tag);
            }
        }
        TransitionMask { allowed }
    }

    pub fn allows(&self, prev: Option<BioTag>, next: BioTag) -> bool {
        let row = prev.map_or(START, BioTag::index);
        self.allowed[row][next.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub seed: u64,
    pub examples: usize,
    pub word_dropout: f64,
}

#[derive(Debug, Clone)]
pub struct TaggerModel {
    anchors: BTreeSet<String>,
    feature_rows: HashMap<String, usize>,
    weights: Vec<Row>,
    transitions: [Row; TAG_COUNT + 1],
    mask: TransitionMask,
    pub meta: TrainingMeta,
}

fn shape(token: &str) -> String {
    let mut out = String::new();
    let mut last = None;
    for c in token.chars() {
        let class = if c.is_ascii_digit() {
            'd'
        } else if c.is_alphabetic() {
            'a'
        } else {
            c
        };
        if last != Some(class) {
            out.push(class);
            last = Some(class);
        }
    }
    out
}

fn affix(token: &str, n: usize, prefix: bool) -> Option<String> {
    let chars: Vec<char> = token.chars().collect();
    if chars.len() < n {
        return None;
    }
    Some(if prefix {
        chars[..n].iter().collect()
    } else {
        chars[chars.len() - n..].iter().collect()
    })
}

/// Stands in for a token hidden by word dropout.
const UNK: &str = "<unk>";

/// A token is an anchor when it is seen at least this often in training...
const ANCHOR_MIN_COUNT: usize = 20;
/// ...and is tagged `O` at least this share of the time.
const ANCHOR_MIN_OTHER: f64 = 0.95;

/// Tokens that are nearly always template text: the skeleton that tells
/// slot positions apart beyond the local window.
fn find_anchors(dataset: &[TaggedExample]) -> BTreeSet<String> {
    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    for ex in dataset {
        for (tok, tag) in ex.tokens.iter().zip(&ex.tags) {
            let entry = counts.entry(tok.as_str()).or_default();
            entry.0 += 1;
            entry.1 += usize::from(*tag == BioTag::Other);
        }
    }
    counts
        .into_iter()
        .filter(|&(_, (n, other))| {
            n >= ANCHOR_MIN_COUNT && other as f64 >= ANCHOR_MIN_OTHER * n as f64
        })
        .map(|(tok, _)| tok.to_string())
        .collect()
}

/// Feature strings for position `i`.
pub(crate) fn position_features(
    tokens: &[String],
    anchors: &BTreeSet<String>,
    i: usize,
    out: &mut Vec<String>,
) {
    masked_features(tokens, anchors, None, i, out)
}

/// Like [`position_features`], with `hidden[j]` tokens treated as unseen:
/// no identity or affix features of their own, `<unk>` in neighbors' context.
fn masked_features(
    tokens: &[String],
    anchors: &BTreeSet<String>,
    hidden: Option<&[bool]>,
    i: usize,
    out: &mut Vec<String>,
) {
    let is_hidden = |j: usize| hidden.is_some_and(|h| h[j]);
    let anchor = |j: &usize| !is_hidden(*j) && anchors.contains(&tokens[*j]);
    let tok = tokens[i].as_str();
    let at = |j: isize| -> &str {
        if j < 0 {
            "<s>"
        } else if (j as usize) < tokens.len() && is_hidden(j as usize) {
            UNK
        } else {
            tokens.get(j as usize).map_or("</s>", String::as_str)
        }
    };
    let i_s = i as isize;
    out.push("bias".to_string());
    out.push(format!("shape={}", shape(tok)));
    if !is_hidden(i) {
        out.push(format!("w={tok}"));
        for n in 1..=3 {
            if let Some(p) = affix(tok, n, true) {
                out.push(format!("p{n}={p}"));
            }
            if let Some(s) = affix(tok, n, false) {
                out.push(format!("s{n}={s}"));
            }
        }
    }
    out.push(format!("w-1={}", at(i_s - 1)));
    out.push(format!("w+1={}", at(i_s + 1)));
    out.push(format!("b-1={}|{}", at(i_s - 1), at(i_s)));
    out.push(format!("b+1={}|{}", at(i_s), at(i_s + 1)));
    out.push(format!("w-2={}", at(i_s - 2)));
    out.push(format!("w+2={}", at(i_s + 2)));
    let class = |j: isize| -> &str {
        match at(j) {
            w @ ("<s>" | "</s>" | UNK) => w,
            w => word_class(w).unwrap_or("x"),
        }
    };
    if !is_hidden(i) {
        out.push(format!("c={}", class(i_s)));
    }
    out.push(format!("c-1={}", class(i_s - 1)));
    out.push(format!("c+1={}", class(i_s + 1)));
    out.push(format!("c-2={}|{}", class(i_s - 2), class(i_s - 1)));
    out.push(format!("c+2={}|{}", class(i_s + 1), class(i_s + 2)));
    out.push(format!("c-1+1={}|{}", class(i_s - 1), class(i_s + 1)));
    if i == 0 {
        out.push("first".to_string());
    }
    if i + 1 == tokens.len() {
        out.push("last".to_string());
    }
    if tokens.len() == 1 {
        out.push("single".to_string());
    }
    let mut left = (0..i).rev().filter(anchor).map(|j| tokens[j].as_str());
    let l1 = left.next().unwrap_or("<s>");
    let l2 = left.next().unwrap_or("<s>");
    let r1 = (i + 1..tokens.len())
        .find(anchor)
        .map_or("</s>", |j| tokens[j].as_str());
    out.push(format!("aL={l1}"));
    out.push(format!("aL2={l2}|{l1}"));
    out.push(format!("aR={r1}"));
    out.push(format!("aLR={l1}|{r1}"));
}

/// Best tag path under `emissions + transitions`, restricted to `mask`.
/// Ties go to the lowest tag index, which puts `O` first.
fn viterbi(
    emissions: &[Row],
    transitions: &[Row; TAG_COUNT + 1],
    mask: &TransitionMask,
) -> Vec<usize> {
    let n = emissions.len();
    if n == 0 {
        return Vec::new();
    }
    let mut delta = vec![[f64::NEG_INFINITY; TAG_COUNT]; n];
    let mut back = vec![[0usize; TAG_COUNT]; n];
    for t in 0..TAG_COUNT {
        if mask.allowed[START][t] {
            delta[0][t] = transitions[START][t] + emissions[0][t];
        }
    }
    for i in 1..n {
        for t in 0..TAG_COUNT {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for p in 0..TAG_COUNT {
                if !mask.allowed[p][t] || delta[i - 1][p] == f64::NEG_INFINITY {
                    continue;
                }
                let s = delta[i - 1][p] + transitions[p][t];
                if s > best {
                    best = s;
                    arg = p;
                }
            }
            if best > f64::NEG_INFINITY {
                delta[i][t] = best + emissions[i][t];
                back[i][t] = arg;
            }
        }
    }
    let mut last = 0;
    for t in 1..TAG_COUNT {
        if delta[n - 1][t] > delta[n - 1][last] {
            last = t;
        }
    }
    let mut path = vec![0; n];
    path[n - 1] = last;
    for i in (1..n).rev() {
        path[i - 1] = back[i][path[i]];
    }
    path
}

/// Training-time weight columns: one per tag, one per slot key and one
/// each for "begin" and "inside". A tag scores the sum of its columns, so
/// evidence about a key is shared between its `B-` and `I-` tags.
const COLS: usize = TAG_COUNT + SlotKey::ALL.len() + 2;
const BEGIN_COL: usize = COLS - 2;
const INSIDE_COL: usize = COLS - 1;

type WideRow = [f64; COLS];

fn tag_columns(tag: usize) -> ArrayVec<usize, 3> {
    let mut cols = ArrayVec::new();
    cols.push(tag);
    match BioTag::from_index(tag) {
        Some(BioTag::Begin(k)) => {
            cols.push(TAG_COUNT + k.index());
            cols.push(BEGIN_COL);
        }
        Some(BioTag::Inside(k)) => {
            cols.push(TAG_COUNT + k.index());
            cols.push(INSIDE_COL);
        }
        _ => {}
    }
    cols
}

fn fold(wide: &WideRow) -> Row {
    let mut row = [0.0; TAG_COUNT];
    for (t, r) in row.iter_mut().enumerate() {
        *r = tag_columns(t).iter().map(|&c| wide[c]).sum();
    }
    row
}

struct Trainer {
    rows: HashMap<String, usize>,
    weights: Vec<WideRow>,
    totals: Vec<WideRow>,
    transitions: [Row; TAG_COUNT + 1],
    transition_totals: [Row; TAG_COUNT + 1],
    counter: f64,
}

impl Trainer {
    fn intern(&mut self, feature: String) -> usize {
        let next = self.weights.len();
        let id = *self.rows.entry(feature).or_insert(next);
        if id == next {
            self.weights.push([0.0; COLS]);
            self.totals.push([0.0; COLS]);
        }
        id
    }

    fn emissions(&self, feats: &[Vec<usize>]) -> Vec<Row> {
        feats
            .iter()
            .map(|ids| {
                let mut wide = [0.0; COLS];
                for &id in ids {
                    for (r, w) in wide.iter_mut().zip(&self.weights[id]) {
                        *r += w;
                    }
                }
                fold(&wide)
            })
            .collect()
    }

    fn bump(&mut self, id: usize, tag: usize, delta: f64) {
        for c in tag_columns(tag) {
            self.weights[id][c] += delta;
            self.totals[id][c] += self.counter * delta;
        }
    }

    fn bump_transition(&mut self, prev: usize, tag: usize, delta: f64) {
        self.transitions[prev][tag] += delta;
        self.transition_totals[prev][tag] += self.counter * delta;
    }

    /// Averaged weights, folded back to one column per tag.
    fn averaged(&self) -> (Vec<Row>, [Row; TAG_COUNT + 1]) {
        let c = self.counter;
        let weights = self
            .weights
            .iter()
            .zip(&self.totals)
            .map(|(w, u)| {
                let mut avg = [0.0; COLS];
                for k in 0..COLS {
                    avg[k] = w[k] - u[k] / c;
                }
                fold(&avg)
            })
            .collect();
        let mut transitions = [[0.0; TAG_COUNT]; TAG_COUNT + 1];
        for (p, row) in transitions.iter_mut().enumerate() {
            for (t, cell) in row.iter_mut().enumerate() {
                *cell = self.transitions[p][t] - self.transition_totals[p][t] / c;
            }
        }
        (weights, transitions)
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    /// Chance that a token is hidden from its own features on a given pass.
    pub word_dropout: f64,
}

impl TrainConfig {
    pub fn new(epochs: usize, seed: u64) -> Self {
        TrainConfig {
            epochs,
            seed,
            word_dropout: DEFAULT_WORD_DROPOUT,
        }
    }
}

pub const DEFAULT_WORD_DROPOUT: f64 = 0.2;

/// Train on `dataset` for `epochs` passes in a seeded order, with the
/// default word dropout.
pub fn train_tagger(
    dataset: &[TaggedExample],
    epochs: usize,
    seed: u64,
) -> Result<TaggerModel, NluError> {
    train_tagger_with(dataset, TrainConfig::new(epochs, seed))
}

pub fn train_tagger_with(
    dataset: &[TaggedExample],
    config: TrainConfig,
) -> Result<TaggerModel, NluError> {
    let TrainConfig {
        epochs,
        seed,
        word_dropout,
    } = config;
    if dataset.is_empty() {
        return Err(NluError::EmptyDataset);
    }
    if epochs == 0 {
        return Err(NluError::InvalidConfig("epochs must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&word_dropout) {
        return Err(NluError::InvalidConfig(
            "word dropout must be in [0, 1)".into(),
        ));
    }
    let mask = TransitionMask::bio();
    let mut trainer = Trainer {
        rows: HashMap::new(),
        weights: Vec::new(),
        totals: Vec::new(),
        transitions: [[0.0; TAG_COUNT]; TAG_COUNT + 1],
        transition_totals: [[0.0; TAG_COUNT]; TAG_COUNT + 1],
        counter: 1.0,
    };

    let anchors = find_anchors(dataset);
    let mut buf = Vec::new();
    let mut encode =
        |trainer: &mut Trainer, tokens: &[String], hidden: Option<&[bool]>| -> Vec<Vec<usize>> {
            (0..tokens.len())
                .map(|i| {
                    buf.clear();
                    masked_features(tokens, &anchors, hidden, i, &mut buf);
                    buf.drain(..).map(|f| trainer.intern(f)).collect()
                })
                .collect()
        };
    let clean: Vec<Vec<Vec<usize>>> = dataset
        .iter()
        .map(|ex| encode(&mut trainer, &ex.tokens, None))
        .collect();
    let golds: Vec<Vec<usize>> = dataset
        .iter()
        .map(|ex| ex.tags.iter().map(|t| t.index()).collect())
        .collect();

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hidden = Vec::new();
    for epoch in 0..epochs {
        order.shuffle(&mut rng);
        let mut mistakes = 0usize;
        for &idx in &order {
            let tokens = &dataset[idx].tokens;
            hidden.clear();
            hidden.extend(tokens.iter().map(|_| rng.gen_bool(word_dropout)));
            let noisy;
            let feats = if hidden.iter().any(|&h| h) {
                noisy = encode(&mut trainer, tokens, Some(&hidden));
                &noisy
            } else {
                &clean[idx]
            };
            let gold = &golds[idx];
            let guess = viterbi(&trainer.emissions(feats), &trainer.transitions, &mask);
            if &guess != gold {
                mistakes += 1;
                for i in 0..gold.len() {
                    let (g, p) = (gold[i], guess[i]);
                    if g != p {
                        for &id in &feats[i] {
                            trainer.bump(id, g, 1.0);
                            trainer.bump(id, p, -1.0);
                        }
                    }
                    let gp = if i == 0 { START } else { gold[i - 1] };
                    let pp = if i == 0 { START } else { guess[i - 1] };
                    if (gp, g) != (pp, p) {
                        trainer.bump_transition(gp, g, 1.0);
                        trainer.bump_transition(pp, p, -1.0);
                    }
                }
            }
            trainer.counter += 1.0;
        }
        tracing::debug!(epoch, mistakes, "tagger epoch");
    }

    let (weights, transitions) = trainer.averaged();
    Ok(TaggerModel {
        anchors,
        feature_rows: trainer.rows,
        weights,
        transitions,
        mask,
        meta: TrainingMeta {
            epochs,
            seed,
            examples: dataset.len(),
            word_dropout,
        },
    })
}

impl TaggerModel {
    pub fn mask(&self) -> &TransitionMask {
        &self.mask
    }

    pub fn feature_count(&self) -> usize {
        self.feature_rows.len()
    }

    /// Tag pre-tokenized input. The output is always a valid BIO sequence.
    pub fn tag_tokens(&self, tokens: &[String]) -> Vec<BioTag> {
        let mut buf = Vec::new();
        let emissions: Vec<Row> = (0..tokens.len())
            .map(|i| {
                buf.clear();
                position_features(tokens, &self.anchors, i, &mut buf);
                let mut row = [0.0; TAG_COUNT];
                for f in &buf {
                    if let Some(&id) = self.feature_rows.get(f) {
                        for (r, w) in row.iter_mut().zip(&self.weights[id]) {
                            *r += w;
                        }
                    }
                }
                row
            })
            .collect();
        viterbi(&emissions, &self.transitions, &self.mask)
            .into_iter()
            .map(|i| BioTag::from_index(i).expect("tag index in range"))
            .collect()
    }

    pub fn save<W: Write>(&self, out: W) -> Result<(), NluError> {
        let tag_name = |i: usize| BioTag::from_index(i).expect("tag index").to_string();
        let sparse = |row: &Row| -> BTreeMap<String, f64> {
            row.iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(t, w)| (tag_name(t), *w))
                .collect()
        };
        let features = self
            .feature_rows
            .iter()
            .map(|(f, &id)| (f.clone(), sparse(&self.weights[id])))
            .filter(|(_, row)| !row.is_empty())
            .collect();
        let transitions = self
            .transitions
            .iter()
            .enumerate()
            .map(|(p, row)| {
                let name = if p == START {
                    "START".to_string()
                } else {
                    tag_name(p)
                };
                (name, sparse(row))
            })
            .collect();
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            meta: self.meta,
            anchors: self.anchors.clone(),
            tags: (0..TAG_COUNT).map(tag_name).collect(),
            features,
            transitions,
        };
        serde_json::to_writer(out, &file)?;
        Ok(())
    }

    pub fn load<R: Read>(input: R) -> Result<Self, NluError> {
        let file: ModelFile = serde_json::from_reader(input)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(NluError::ModelVersion {
                found: format!("{} v{}", file.format, file.version),
                expected: format!("{MODEL_FORMAT} v{MODEL_VERSION}"),
            });
        }
        let expected_tags: Vec<String> = BioTag::all().map(|t| t.to_string()).collect();
        if file.tags != expected_tags {
            return Err(NluError::ModelVersion {
                found: "different tag inventory".into(),
                expected: "the twelve-key BIO inventory".into(),
            });
        }
        let dense = |row: &BTreeMap<String, f64>| -> Result<Row, NluError> {
            let mut out = [0.0; TAG_COUNT];
            for (tag, w) in row {
                out[tag.parse::<BioTag>()?.index()] = *w;
            }
            Ok(out)
        };
        let mut feature_rows = HashMap::with_capacity(file.features.len());
        let mut weights = Vec::with_capacity(file.features.len());
        for (feature, row) in &file.features {
            feature_rows.insert(feature.clone(), weights.len());
            weights.push(dense(row)?);
        }
        let mut transitions = [[0.0; TAG_COUNT]; TAG_COUNT + 1];
        for (prev, row) in &file.transitions {
            let p = if prev == "START" {
                START
            } else {
                prev.parse::<BioTag>()?.index()
            };
            transitions[p] = dense(row)?;
        }
        Ok(TaggerModel {
            anchors: file.anchors,
            feature_rows,
            weights,
            transitions,
            mask: TransitionMask::bio(),
            meta: file.meta,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    meta: TrainingMeta,
    anchors: BTreeSet<String>,
    tags: Vec<String>,
    features: BTreeMap<String, BTreeMap<String, f64>>,
    transitions: BTreeMap<String, BTreeMap<String, f64>>,
}

/// Tag an utterance with `model`.
pub fn tag(model: &TaggerModel, utterance: &Utterance) -> Vec<BioTag> {
    model.tag_tokens(&utterance.tokens)
}
