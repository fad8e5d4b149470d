use std::collections::BTreeSet;

use serde::Serialize;

use super::{collapse_bio, NluError, SlotKey, TaggedExample, TaggerModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaggerScores {
    /// Correct tags over all tags.
    pub token_accuracy: f64,
    /// F1 over exact `(key, start, end)` slot spans.
    pub slot_f1: f64,
    pub tokens: usize,
    pub examples: usize,
}

pub fn evaluate_tagger(
    model: &TaggerModel,
    testset: &[TaggedExample],
) -> Result<TaggerScores, NluError> {
    if testset.is_empty() {
        return Err(NluError::EmptyDataset);
    }
    let (mut correct, mut total) = (0usize, 0usize);
    let (mut matched, mut predicted, mut gold) = (0usize, 0usize, 0usize);
    for example in testset {
        let guess = model.tag_tokens(&example.tokens);
        correct += guess
            .iter()
            .zip(&example.tags)
            .filter(|(a, b)| a == b)
            .count();
        total += example.tags.len();

        let spans = |tags| -> Result<BTreeSet<(SlotKey, usize, usize)>, NluError> {
            Ok(collapse_bio(&example.tokens, tags)?
                .into_iter()
                .map(|f| (f.key, f.span.0, f.span.1))
                .collect())
        };
        let g = spans(&example.tags)?;
        let p = spans(&guess)?;
        matched += g.intersection(&p).count();
        gold += g.len();
        predicted += p.len();
    }
    let token_accuracy = if total == 0 {
        1.0
    } else {
        correct as f64 / total as f64
    };
    let slot_f1 = if gold + predicted == 0 {
        1.0
    } else {
        2.0 * matched as f64 / (gold + predicted) as f64
    };
    Ok(TaggerScores {
        token_accuracy,
        slot_f1,
        tokens: total,
        examples: testset.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlu::{fill_template, train_tagger, BioTag, Template};

    #[test]
    fn memorized_single_example_scores_perfectly() {
        let t = Template::new("t", "i'm going to {ALOC} at {TIME}").unwrap();
        let ex = fill_template(&t, &["cmu", "7 pm"]).unwrap();
        let model = train_tagger(std::slice::from_ref(&ex), 10, 0).unwrap();
        let scores = evaluate_tagger(&model, &[ex]).unwrap();
        assert_eq!(scores.token_accuracy, 1.0);
        assert_eq!(scores.slot_f1, 1.0);
    }

    #[test]
    fn f1_counts_exact_spans_only() {
        // Model always predicts O: no predicted spans, so F1 is 0 and the
        // accuracy is the share of O tokens.
        let only_o = TaggedExample::new(vec!["x".into()], vec![BioTag::Other]).unwrap();
        let model = train_tagger(&[only_o], 1, 0).unwrap();
        let t = Template::new("t", "to {ALOC}").unwrap();
        let ex = fill_template(&t, &["qqq"]).unwrap();
        let s = evaluate_tagger(&model, &[ex]).unwrap();
        assert_eq!(s.token_accuracy, 0.5);
        assert_eq!(s.slot_f1, 0.0);
    }

    #[test]
    fn empty_testset_is_an_error() {
        let only_o = TaggedExample::new(vec!["x".into()], vec![BioTag::Other]).unwrap();
        let model = train_tagger(&[only_o], 1, 0).unwrap();
        assert!(matches!(
            evaluate_tagger(&model, &[]),
            Err(NluError::EmptyDataset)
        ));
    }
}
