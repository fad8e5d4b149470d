//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! cargo test -p getgoing-service --test acceptance

mod common;
#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{shared, HAPPY_PATH};
use getgoing_core::assets;
use getgoing_core::delivery::DeliveryMode;
use getgoing_core::directions::plan_transit;
use getgoing_core::nlu::{
    collapse_bio, evaluate_tagger, is_valid_sequence, make_splits, tag, tokenize,
    train_tagger_with, understand, SlotKey, SplitConfig, TrainConfig, Utterance,
};
use getgoing_service::{connect, replay, Service, Session, SessionLog, SessionParams, WireMessage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NLU_SEEDS: std::ops::Range<u64> = 0..5;
const NLU_EPOCHS: usize = 10;
const UNSEEN_SLOT_MIN: f64 = 0.99;
const UNSEEN_TEMPLATE_MIN: f64 = 0.93;
const NLU_RUN_LIMIT: Duration = Duration::from_secs(120);

const FUZZ_UTTERANCES: usize = 10_000;
const FUZZ_MAX_TOKENS: usize = 40;
const FUZZ_SEED: u64 = 0x5eed;

const PLANNER_CASES: u64 = 200;
const PLANNER_LIMIT: Duration = Duration::from_secs(30);

const CONTRACT_SEEDS: u64 = 6;

const REPLAY_TURNS: usize = 12;
const REPLAY_CLOCK: u32 = 16 * 60 + 45;
const REPLAY_SEED: u64 = 11;

const BARGE_CHUNKS: usize = 5;
const BARGE_AFTER: [usize; 3] = [1, 2, 3];

type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Train on each seed's split and score both held-out sets.
fn nlu_runs() -> Vec<(f64, f64, Duration)> {
    let templates = assets::templates().unwrap();
    let lexicon = assets::lexicon().unwrap();
    NLU_SEEDS
        .map(|seed| {
            let t0 = Instant::now();
            let splits = make_splits(&templates, &lexicon, SplitConfig::with_seed(seed)).unwrap();
            let model =
                train_tagger_with(&splits.train, TrainConfig::new(NLU_EPOCHS, seed)).unwrap();
            let slot = evaluate_tagger(&model, &splits.unseen_slots).unwrap();
            let tmpl = evaluate_tagger(&model, &splits.unseen_templates).unwrap();
            (slot.token_accuracy, tmpl.token_accuracy, t0.elapsed())
        })
        .collect()
}

fn unseen_slots(runs: &[(f64, f64, Duration)]) -> Outcome {
    let acc = mean(&runs.iter().map(|r| r.0).collect::<Vec<_>>());
    let slowest = runs.iter().map(|r| r.2).max().unwrap();
    outcome(
        acc >= UNSEEN_SLOT_MIN && slowest <= NLU_RUN_LIMIT,
        format!(
            "mean token accuracy {acc:.4} over {} seeds (min {UNSEEN_SLOT_MIN}), slowest run {:.1} s (max {} s)",
            runs.len(),
            slowest.as_secs_f64(),
            NLU_RUN_LIMIT.as_secs()
        ),
    )
}

fn unseen_templates(runs: &[(f64, f64, Duration)]) -> Outcome {
    let slot = mean(&runs.iter().map(|r| r.0).collect::<Vec<_>>());
    let acc = mean(&runs.iter().map(|r| r.1).collect::<Vec<_>>());
    outcome(
        acc >= UNSEEN_TEMPLATE_MIN && acc < slot,
        format!("mean token accuracy {acc:.4} (min {UNSEEN_TEMPLATE_MIN}, below unseen slots {slot:.4})"),
    )
}

fn bio_fuzz() -> Outcome {
    let model = &shared().model;
    let lexicon = assets::lexicon().unwrap();
    let mut vocab: Vec<String> = lexicon
        .values
        .values()
        .flatten()
        .flat_map(|v| tokenize(v))
        .collect();
    for t in assets::templates().unwrap() {
        vocab.extend(tokenize(&t.pattern));
    }
    vocab.sort();
    vocab.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(FUZZ_SEED);
    let mut invalid = 0;
    for _ in 0..FUZZ_UTTERANCES {
        let n = rng.gen_range(0..=FUZZ_MAX_TOKENS);
        let words: Vec<String> = (0..n)
            .map(|_| match rng.gen_range(0..10) {
                // Junk outside the vocabulary.
                0 => (0..rng.gen_range(1..9))
                    .map(|_| rng.gen_range(b'!'..=b'~') as char)
                    .collect(),
                _ => vocab.choose(&mut rng).unwrap().clone(),
            })
            .collect();
        let u = Utterance::new(words.join(" "));
        let tags = tag(model, &u);
        let ok = tags.len() == u.tokens.len()
            && is_valid_sequence(&tags)
            && collapse_bio(&u.tokens, &tags).is_ok();
        if !ok {
            invalid += 1;
        }
    }
    outcome(
        invalid == 0,
        format!("{invalid} invalid of {FUZZ_UTTERANCES} (0 to {FUZZ_MAX_TOKENS} tokens)"),
    )
}

fn mixed_initiative() -> Outcome {
    let model = &shared().model;
    let slots = |text: &str| -> Vec<(SlotKey, String)> {
        understand(model, text)
            .into_iter()
            .map(|f| (f.key, f.surface))
            .collect()
    };
    let mut failures = Vec::new();
    let nlu = [
        (
            "I'm going to CMU at 7 PM",
            vec![
                (SlotKey::Aloc, "cmu".to_string()),
                (SlotKey::Time, "7 pm".into()),
            ],
        ),
        (
            "I'm leaving from the airport",
            vec![(SlotKey::Dloc, "the airport".into())],
        ),
        (
            "No. I'm going to Forbes and Murray",
            vec![
                (SlotKey::No, "no".into()),
                (SlotKey::Aloc, "forbes and murray".into()),
            ],
        ),
    ];
    for (text, want) in nlu {
        let got = slots(text);
        if got != want {
            failures.push(format!("{text:?} tagged {got:?}"));
        }
    }
    let exchanges: [(&str, fn()); 3] = [
        ("over-informative", support::exchanges::over_informative),
        ("out-of-turn", support::exchanges::out_of_turn),
        ("correction", support::exchanges::correction),
    ];
    for (name, run) in exchanges {
        if catch_unwind(AssertUnwindSafe(run)).is_err() {
            failures.push(format!("{name} exchange"));
        }
    }
    if failures.is_empty() {
        outcome(true, "3 tagged utterances and 3 exchanges match exactly")
    } else {
        outcome(false, failures.join("; "))
    }
}

fn planner_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut disagree = Vec::new();
    for seed in 0..PLANNER_CASES {
        let case = support::networks::random_case(seed);
        let from = case.map.place(&case.from).unwrap();
        let to = case.map.place(&case.to).unwrap();
        let best = plan_transit(&case.map, from, to, case.depart_after, 1)
            .first()
            .map(|i| i.arrive());
        let oracle =
            support::networks::brute_force(&case.map, &case.from, &case.to, case.depart_after);
        if best != oracle {
            disagree.push(seed);
        }
    }
    let elapsed = t0.elapsed();
    outcome(
        disagree.is_empty() && elapsed <= PLANNER_LIMIT,
        format!(
            "{} of {PLANNER_CASES} networks agree with exhaustive search in {:.2} s (max {} s){}",
            PLANNER_CASES as usize - disagree.len(),
            elapsed.as_secs_f64(),
            PLANNER_LIMIT.as_secs(),
            if disagree.is_empty() {
                String::new()
            } else {
                format!(", seeds {disagree:?}")
            }
        ),
    )
}

fn delivery_contract() -> Outcome {
    let bank = assets::prompt_bank().unwrap();
    let fixtures = support::contract::fixtures(&bank);
    let mut failures = Vec::new();
    for (key, b) in &fixtures {
        for seed in 0..CONTRACT_SEEDS {
            if let Err(e) = support::contract::check(&bank, key, b, seed) {
                failures.push(format!("{key}/{seed}: {e}"));
            }
        }
    }
    let keys = bank.keys().count();
    outcome(
        failures.is_empty() && fixtures.len() >= keys,
        format!(
            "{} fixtures over {keys} prompts, {} failures{}",
            fixtures.len(),
            failures.len(),
            failures
                .first()
                .map(|f| format!(", first {f}"))
                .unwrap_or_default()
        ),
    )
}

fn replay_determinism() -> Outcome {
    let params = SessionParams::new(
        common::CLIENT_ID,
        DeliveryMode::SeTD,
        REPLAY_CLOCK,
        REPLAY_SEED,
    );
    let (mut session, _) = Session::open(shared(), params);
    for line in HAPPY_PATH {
        session.handle_utterance(line);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = session.log().save(dir.path()).unwrap();
    let log = SessionLog::load(&path).unwrap();
    let report = replay(shared(), &log);
    let turns = report.actual.len();
    outcome(
        session.ended() && turns == REPLAY_TURNS && report.identical(),
        format!(
            "{turns} system turns, ended {}, first mismatch {:?}",
            session.ended(),
            report.first_mismatch()
        ),
    )
}

/// Chunks delivered when a barge-in follows chunk `k` of the welcome.
async fn barge_in_after(service: Arc<Service>, k: usize) -> (usize, usize) {
    let mut conn = connect(service.clone());
    conn.tx
        .send(Ok(common::start(Some("setd"), None)))
        .await
        .unwrap();
    let mut delivered = 0;
    loop {
        match conn.rx.recv().await.unwrap() {
            WireMessage::Chunk { .. } => {
                delivered += 1;
                if delivered == k {
                    conn.tx.send(Ok(WireMessage::BargeIn {})).await.unwrap();
                }
            }
            WireMessage::TurnEnd {} => break,
            _ => {}
        }
    }
    let (_, full) = Session::open(
        shared(),
        SessionParams::new(
            common::CLIENT_ID,
            DeliveryMode::SeTD,
            REPLAY_CLOCK,
            REPLAY_SEED,
        ),
    );
    (delivered, full.chunks().len())
}

fn barge_in() -> Outcome {
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .start_paused(true)
        .build()
        .unwrap();
    let service = Arc::new(
        Service::new(shared())
            .with_clock(REPLAY_CLOCK)
            .with_seed(REPLAY_SEED),
    );
    let mut pass = true;
    let mut parts = Vec::new();
    for k in BARGE_AFTER {
        let (delivered, total) = rt.block_on(barge_in_after(service.clone(), k));
        pass &= delivered == k && total == BARGE_CHUNKS;
        parts.push(format!("k={k}: {delivered} of {total}"));
    }
    outcome(pass, parts.join(", "))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let runs = nlu_runs();
    let criteria: Vec<(&str, Check)> = vec![
        ("nlu unseen slots", Box::new(|| unseen_slots(&runs))),
        ("nlu unseen templates", Box::new(|| unseen_templates(&runs))),
        ("bio validity", Box::new(bio_fuzz)),
        ("mixed initiative", Box::new(mixed_initiative)),
        ("planner oracle", Box::new(planner_oracle)),
        ("delivery contract", Box::new(delivery_contract)),
        ("replay determinism", Box::new(replay_determinism)),
        ("barge-in", Box::new(barge_in)),
    ];
    let mut failed = 0;
    println!("acceptance: {} criteria", criteria.len());
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name:<22} {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {failed} failed, {:.1} s",
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
