//! Library-level pipeline: the full flow through the public API, from raw
//! text to flip detection and document classification, with no CLI in
//! between.

use rand::rngs::StdRng;
use rand::SeedableRng;

use sentivec::classify::{doc_vector, evaluate, split, train_svm, LabeledSet, Weighting};
use sentivec::corpus::{StopWordSet, TokenStream, Vocab};
use sentivec::diffing::{compare_models, project_2d, FlipStatus};
use sentivec::embedding::{continue_training, EmbeddingModel, TrainConfig};
use sentivec::sentiment::{
    inject_seeds, merge_lexicons, seeded_retrain, Metric, Polarity, PolarityLabel, PolarityScorer,
    SeedConfig, SentimentLexicon,
};

const POS: [&str; 4] = ["good", "great", "fine", "happy"];
const NEG: [&str; 4] = ["bad", "poor", "awful", "sad"];

fn corpus_with_flip_word(flip_alongside: &[&str; 4]) -> TokenStream {
    let mut text = String::new();
    for i in 0..120 {
        let p = |k: usize| POS[(i + k) % 4];
        let n = |k: usize| NEG[(i + k) % 4];
        let f = |k: usize| flip_alongside[(i + k) % 4];
        text.push_str(&format!("{} {} {} {}\n", p(0), p(1), p(2), p(3)));
        text.push_str(&format!("{} {} {} {}\n", n(0), n(1), n(2), n(3)));
        text.push_str(&format!("{} {} pivot {} {}\n", f(0), f(1), f(2), f(3)));
        text.push_str("thing place story road\n");
    }
    TokenStream::from_text(&text)
}

fn cfg(seed: u64, epochs: u32) -> TrainConfig {
    TrainConfig {
        dim: 16,
        window: 3,
        negatives: 4,
        epochs,
        subsample_threshold: 0.0,
        seed,
        threads: 1,
        ..TrainConfig::default()
    }
}

fn lexicon() -> SentimentLexicon {
    let pos = SentimentLexicon::new(
        POS.iter().map(|w| (w.to_string(), Polarity::Positive)),
        "pos",
    );
    let neg = SentimentLexicon::new(
        NEG.iter().map(|w| (w.to_string(), Polarity::Negative)),
        "neg",
    );
    merge_lexicons(&pos, &neg)
}

#[test]
fn full_pipeline_finds_planted_flip_and_classifies() {
    // general corpus: the pivot word rides with negative seeds
    let general = corpus_with_flip_word(&NEG);
    // domain corpus: the pivot word rides with positive seeds
    let domain = corpus_with_flip_word(&POS);
    let lexicon = lexicon();

    // stage 1: general model
    let train_cfg = cfg(42, 3);
    let general_vocab = Vocab::build(&general, 2, &StopWordSet::empty());
    let mut general_model =
        EmbeddingModel::init(general_vocab, &train_cfg, &mut StdRng::seed_from_u64(1)).unwrap();
    general_model.train(&general, &train_cfg).unwrap();

    // stage 2: continuation on the domain corpus
    let domain_vocab = Vocab::build(&domain, 2, &StopWordSet::empty());
    let (mut domain_model, _) =
        continue_training(&general_model, domain_vocab, &domain, &train_cfg).unwrap();

    // stage 3: seed both models and retrain one epoch each
    let seed_cfg = SeedConfig::default();
    inject_seeds(&mut general_model, &lexicon, &seed_cfg).unwrap();
    seeded_retrain(&mut general_model, &general, &train_cfg, &seed_cfg).unwrap();
    inject_seeds(&mut domain_model, &lexicon, &seed_cfg).unwrap();
    seeded_retrain(&mut domain_model, &domain, &train_cfg, &seed_cfg).unwrap();

    // stage 4: polarity per model, flip across models
    let general_scorer =
        PolarityScorer::from_model(&general_model, &lexicon, Metric::Cosine).unwrap();
    let domain_scorer =
        PolarityScorer::from_model(&domain_model, &lexicon, Metric::Cosine).unwrap();
    assert_eq!(
        general_scorer.polarity(&general_model, "pivot").unwrap(),
        PolarityLabel::Negative
    );
    assert_eq!(
        domain_scorer.polarity(&domain_model, "pivot").unwrap(),
        PolarityLabel::Positive
    );

    let words: Vec<String> = ["pivot", "good", "bad", "thing"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let report = compare_models(
        &[
            ("general", &general_model, &general_scorer),
            ("domain", &domain_model, &domain_scorer),
        ],
        &words,
    )
    .unwrap();
    assert_eq!(report.row("pivot").unwrap().status, FlipStatus::Flip);
    assert_eq!(report.row("good").unwrap().status, FlipStatus::Agree);
    assert_eq!(report.row("bad").unwrap().status, FlipStatus::Agree);

    // stage 5: projection over the inspected words succeeds and orders
    // variance correctly
    let projection = project_2d(&domain_model, &words).unwrap();
    assert_eq!(projection.len(), 4);

    // stage 6: classify synthetic documents built from seed words
    let mut items = Vec::new();
    for i in 0..40 {
        let (seeds, label) = if i % 2 == 0 {
            (&POS, Polarity::Positive)
        } else {
            (&NEG, Polarity::Negative)
        };
        let tokens: Vec<String> = (0..4).map(|k| seeds[(i + k) % 4].to_string()).collect();
        let feature = doc_vector(&domain_model, &tokens, Weighting::Uniform).unwrap();
        items.push((feature, label));
    }
    let data = LabeledSet::new(items);
    let (train, test) = split(&data, 0.8, &mut StdRng::seed_from_u64(9)).unwrap();
    let svm = train_svm(&train, 1.0, 0.7, 1e-3).unwrap();
    let accuracy = evaluate(&svm, &test).unwrap();
    assert!(accuracy >= 0.9, "test accuracy {accuracy}");
}

#[test]
fn save_load_seed_resume_matches_in_memory_run() {
    // seeding and retraining after a save/load round trip (with sidecar)
    // must match the purely in-memory run at file precision
    let corpus = corpus_with_flip_word(&POS);
    let train_cfg = cfg(7, 2);
    let vocab = Vocab::build(&corpus, 2, &StopWordSet::empty());
    let mut model = EmbeddingModel::init(vocab, &train_cfg, &mut StdRng::seed_from_u64(3)).unwrap();
    model.train(&corpus, &train_cfg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vectors.txt");
    model.save_vectors(&path).unwrap();
    model.save_output_sidecar(&path).unwrap();

    let mut resumed = EmbeddingModel::load_vectors(&path).unwrap();
    resumed.recount_vocab(&corpus);

    let lexicon = lexicon();
    let seed_cfg = SeedConfig::default();
    inject_seeds(&mut resumed, &lexicon, &seed_cfg).unwrap();
    seeded_retrain(&mut resumed, &corpus, &train_cfg, &seed_cfg).unwrap();

    inject_seeds(&mut model, &lexicon, &seed_cfg).unwrap();
    seeded_retrain(&mut model, &corpus, &train_cfg, &seed_cfg).unwrap();

    // same vocab order, near-identical vectors (inputs differed only by the
    // 6-decimal rounding of the save)
    assert_eq!(model.vocab().words(), resumed.vocab().words());
    for i in 0..model.len() {
        for (a, b) in model.row(i).iter().zip(resumed.row(i)) {
            assert!((a - b).abs() < 1e-4, "row {i}: {a} vs {b}");
        }
    }
}
