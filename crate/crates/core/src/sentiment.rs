//! Sentiment seeding and polarity scoring.
//!
//! Seed words come from a polarity lexicon. Their embedding rows are
//! overwritten with constant `+m`/`-m` vectors, the model is retrained for a
//! small, controlled number of epochs so context pulls nearby words toward
//! seed polarity, and any word is then scored by comparing its distance to
//! the positive and negative seed centroids.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::corpus::TokenStream;
use crate::embedding::{EmbeddingModel, Stage, TrainConfig, TrainStats};
use crate::error::SentimentError;

/// Sentiment tendency of a lexicon word or labeled document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// `+1.0` / `-1.0`.
    pub fn signum(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

/// Polarity assigned by a [`PolarityScorer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolarityLabel {
    Positive,
    Negative,
    /// Distances to both centroids agree within tolerance.
    Tie,
    /// The word is not in the model's vocabulary.
    Unknown,
}

impl std::fmt::Display for PolarityLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PolarityLabel::Positive => "positive",
            PolarityLabel::Negative => "negative",
            PolarityLabel::Tie => "tie",
            PolarityLabel::Unknown => "unknown",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for PolarityLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(PolarityLabel::Positive),
            "negative" => Ok(PolarityLabel::Negative),
            "tie" => Ok(PolarityLabel::Tie),
            "unknown" => Ok(PolarityLabel::Unknown),
            other => Err(format!("not a polarity label: {other:?}")),
        }
    }
}

/// Absolute tolerance under which the two centroid distances count as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Word -> polarity mapping loaded from one or more dictionaries.
#[derive(Debug, Clone, Default)]
pub struct SentimentLexicon {
    entries: HashMap<String, Polarity>,
    source_tag: String,
}

/// A loaded lexicon plus the number of intra-file conflicts dropped.
#[derive(Debug, Clone)]
pub struct LexiconLoad {
    pub lexicon: SentimentLexicon,
    pub conflicts: usize,
}

impl SentimentLexicon {
    pub fn new<I>(entries: I, source_tag: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = (String, Polarity)>,
    {
        SentimentLexicon {
            entries: entries.into_iter().collect(),
            source_tag: source_tag.into(),
        }
    }

    /// Load a TSV lexicon of `word<TAB>+` / `word<TAB>-` lines.
    ///
    /// Duplicate identical lines collapse. A word listed with both signs in
    /// the same file is dropped and counted as a conflict. Blank lines are
    /// ignored; an entirely empty file is an error.
    pub fn load(path: impl AsRef<Path>) -> Result<LexiconLoad, SentimentError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| SentimentError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut entries: HashMap<String, Polarity> = HashMap::new();
        let mut conflicted: std::collections::HashSet<String> = std::collections::HashSet::new();
        let mut saw_line = false;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            saw_line = true;
            let malformed = |msg: String| SentimentError::MalformedLine {
                path: path.to_owned(),
                line: lineno + 1,
                msg,
            };
            let (word, sign) = line
                .split_once('\t')
                .ok_or_else(|| malformed(format!("expected `word<TAB>sign`, got {line:?}")))?;
            let word = word.trim();
            if word.is_empty() {
                return Err(malformed("empty word".into()));
            }
            let polarity = match sign.trim() {
                "+" => Polarity::Positive,
                "-" => Polarity::Negative,
                other => return Err(malformed(format!("sign must be + or -, got {other:?}"))),
            };
            match entries.get(word) {
                Some(&existing) if existing != polarity => {
                    conflicted.insert(word.to_owned());
                }
                _ => {
                    entries.insert(word.to_owned(), polarity);
                }
            }
        }
        if !saw_line {
            return Err(SentimentError::EmptyFile {
                path: path.to_owned(),
            });
        }
        for word in &conflicted {
            entries.remove(word);
        }
        let source_tag = path.display().to_string();
        Ok(LexiconLoad {
            lexicon: SentimentLexicon {
                entries,
                source_tag,
            },
            conflicts: conflicted.len(),
        })
    }

    /// Write entries as `word<TAB>sign` lines, word-sorted.
    pub fn save(&self, mut w: impl Write) -> std::io::Result<()> {
        let mut words: Vec<&String> = self.entries.keys().collect();
        words.sort();
        for word in words {
            let sign = match self.entries[word] {
                Polarity::Positive => '+',
                Polarity::Negative => '-',
            };
            writeln!(w, "{word}\t{sign}")?;
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<Polarity> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Polarity)> {
        self.entries.iter().map(|(w, &p)| (w.as_str(), p))
    }

    /// Words of one polarity, in an unspecified order.
    pub fn words_with(&self, polarity: Polarity) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(move |(_, &p)| p == polarity)
            .map(|(w, _)| w.as_str())
    }
}

/// Merge two lexicons: words in both with equal polarity are kept once,
/// words in both with opposite polarity are dropped, and words in exactly
/// one are kept. Commutative over the entry sets.
pub fn merge_lexicons(a: &SentimentLexicon, b: &SentimentLexicon) -> SentimentLexicon {
    let mut entries = HashMap::new();
    for (word, pa) in a.entries() {
        match b.get(word) {
            Some(pb) if pb != pa => {} // disagreement: drop
            _ => {
                entries.insert(word.to_owned(), pa);
            }
        }
    }
    for (word, pb) in b.entries() {
        if a.get(word).is_none() {
            entries.insert(word.to_owned(), pb);
        }
    }
    SentimentLexicon {
        entries,
        source_tag: format!("{}+{}", a.source_tag, b.source_tag),
    }
}

/// How seed vectors are written and how long the seeded model retrains.
#[derive(Debug, Clone)]
pub struct SeedConfig {
    /// Per-component seed value; positive seeds get `+magnitude`, negative
    /// seeds `-magnitude`.
    pub magnitude: f64,
    /// Divide the component by `sqrt(dim)` so seed rows have unit norm.
    /// Off by default: the plain all-ones convention.
    pub scale_by_dim: bool,
    /// Epochs of retraining after injection. Kept deliberately small so
    /// seed information spreads without washing out.
    pub retrain_epochs: u32,
    /// Pin seed rows during retraining instead of letting them drift.
    pub freeze_seeds: bool,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            magnitude: 1.0,
            scale_by_dim: false,
            retrain_epochs: 1,
            freeze_seeds: false,
        }
    }
}

impl SeedConfig {
    fn component(&self, dim: usize) -> Result<f64, SentimentError> {
        if !self.magnitude.is_finite() || self.magnitude <= 0.0 {
            return Err(SentimentError::InvalidSeedMagnitude(self.magnitude));
        }
        Ok(if self.scale_by_dim {
            self.magnitude / (dim as f64).sqrt()
        } else {
            self.magnitude
        })
    }
}

/// Counts reported by seed injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InjectCounts {
    pub positives: usize,
    pub negatives: usize,
    pub skipped_oov: usize,
}

/// Overwrite the `W` rows of in-vocab lexicon words with constant seed
/// vectors; `W'` rows are untouched and out-of-vocab lexicon words are
/// counted as skipped. Idempotent. Sets the model stage to seeded.
pub fn inject_seeds(
    model: &mut EmbeddingModel,
    lexicon: &SentimentLexicon,
    cfg: &SeedConfig,
) -> Result<InjectCounts, SentimentError> {
    if lexicon.is_empty() {
        return Err(SentimentError::EmptyLexicon);
    }
    let component = cfg.component(model.dim())?;
    let mut counts = InjectCounts {
        positives: 0,
        negatives: 0,
        skipped_oov: 0,
    };
    let mut seeded_rows = Vec::new();
    // vocab order so repeated runs produce the same row list
    for index in 0..model.len() {
        let word = model.vocab().word(index).to_owned();
        let Some(polarity) = lexicon.get(&word) else {
            continue;
        };
        let value = polarity.signum() * component;
        model.row_mut(index).fill(value);
        seeded_rows.push(index);
        match polarity {
            Polarity::Positive => counts.positives += 1,
            Polarity::Negative => counts.negatives += 1,
        }
    }
    counts.skipped_oov = lexicon.len() - counts.positives - counts.negatives;
    model.set_seeded_rows(seeded_rows);
    model.set_stage(Stage::Seeded);
    Ok(counts)
}

/// Retrain a seeded model on the domain corpus for the configured number of
/// epochs. All vectors keep updating, including the seeds themselves, unless
/// `freeze_seeds` is set. Zero epochs is a no-op.
pub fn seeded_retrain(
    model: &mut EmbeddingModel,
    tokens: &TokenStream,
    train_cfg: &TrainConfig,
    seed_cfg: &SeedConfig,
) -> Result<TrainStats, crate::Error> {
    if model.stage() != Stage::Seeded {
        return Err(SentimentError::StageMismatch {
            expected: "seeded",
            found: model.stage(),
        }
        .into());
    }
    let cfg = TrainConfig {
        epochs: seed_cfg.retrain_epochs,
        ..train_cfg.clone()
    };
    let frozen_rows = if seed_cfg.freeze_seeds {
        let mut mask = vec![false; model.len()];
        for &row in model.seeded_rows() {
            mask[row] = true;
        }
        Some(mask)
    } else {
        None
    };
    let options = crate::embedding::TrainOptions { frozen_rows };
    model
        .train_with_options(tokens, &cfg, &options)
        .map_err(Into::into)
}

/// Distance metric for polarity decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `1 - cosine_similarity`; invariant to positive rescaling.
    Cosine,
    /// Euclidean (L2) distance.
    Euclidean,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Cosine => 1.0 - crate::embedding::cosine_similarity(a, b),
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(format!(
                "unknown metric {other:?} (expected cosine or euclidean)"
            )),
        }
    }
}

/// Positive and negative seed centroids plus the metric used against them.
#[derive(Debug, Clone)]
pub struct PolarityScorer {
    pos_centroid: Vec<f64>,
    neg_centroid: Vec<f64>,
    metric: Metric,
}

impl PolarityScorer {
    /// Build centroids as the arithmetic mean of the `W` rows of in-vocab
    /// positive and negative lexicon words. Fails when either side has no
    /// in-vocab seed.
    pub fn from_model(
        model: &EmbeddingModel,
        lexicon: &SentimentLexicon,
        metric: Metric,
    ) -> Result<PolarityScorer, SentimentError> {
        let centroid =
            |polarity: Polarity, side: &'static str| -> Result<Vec<f64>, SentimentError> {
                let mut sum = vec![0.0; model.dim()];
                let mut n = 0usize;
                for word in lexicon.words_with(polarity) {
                    if let Some(v) = model.vector(word) {
                        for (s, x) in sum.iter_mut().zip(v) {
                            *s += x;
                        }
                        n += 1;
                    }
                }
                if n == 0 {
                    return Err(SentimentError::NoSeedsInVocab { side });
                }
                sum.iter_mut().for_each(|s| *s /= n as f64);
                Ok(sum)
            };
        Ok(PolarityScorer {
            pos_centroid: centroid(Polarity::Positive, "positive")?,
            neg_centroid: centroid(Polarity::Negative, "negative")?,
            metric,
        })
    }

    pub fn pos_centroid(&self) -> &[f64] {
        &self.pos_centroid
    }

    pub fn neg_centroid(&self) -> &[f64] {
        &self.neg_centroid
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.pos_centroid.len()
    }

    /// Distances from a vector to the positive and negative centroids.
    pub fn distances(&self, v: &[f64]) -> (f64, f64) {
        (
            self.metric.distance(v, &self.pos_centroid),
            self.metric.distance(v, &self.neg_centroid),
        )
    }

    /// Label a word by whichever centroid is closer. Out-of-vocab words are
    /// `Unknown`; distances equal within [`TIE_TOLERANCE`] are a `Tie`.
    pub fn polarity(
        &self,
        model: &EmbeddingModel,
        word: &str,
    ) -> Result<PolarityLabel, SentimentError> {
        if self.dim() != model.dim() {
            return Err(SentimentError::DimensionMismatch {
                scorer_dim: self.dim(),
                model_dim: model.dim(),
            });
        }
        let Some(v) = model.vector(word) else {
            return Ok(PolarityLabel::Unknown);
        };
        let (d_pos, d_neg) = self.distances(v);
        Ok(if (d_pos - d_neg).abs() <= TIE_TOLERANCE {
            PolarityLabel::Tie
        } else if d_pos < d_neg {
            PolarityLabel::Positive
        } else {
            PolarityLabel::Negative
        })
    }
}

/// Fraction of gold words whose prediction matches; `Tie` and `Unknown`
/// count as incorrect. Every gold word must carry a prediction.
pub fn precision(
    predicted: &HashMap<String, PolarityLabel>,
    gold: &HashMap<String, Polarity>,
) -> Result<f64, SentimentError> {
    if gold.is_empty() {
        return Err(SentimentError::EmptyGold);
    }
    let mut correct = 0usize;
    for (word, &expected) in gold {
        let label = predicted
            .get(word)
            .ok_or_else(|| SentimentError::MissingPrediction(word.clone()))?;
        let hit = matches!(
            (label, expected),
            (PolarityLabel::Positive, Polarity::Positive)
                | (PolarityLabel::Negative, Polarity::Negative)
        );
        if hit {
            correct += 1;
        }
    }
    Ok(correct as f64 / gold.len() as f64)
}

/// Write a polarity report as TSV `word<TAB>label<TAB>d_pos<TAB>d_neg`
/// (distances are `NA` for out-of-vocab words), one row per requested word.
pub fn write_polarity_report(
    scorer: &PolarityScorer,
    model: &EmbeddingModel,
    words: &[String],
    mut w: impl Write,
) -> Result<(), crate::Error> {
    writeln!(w, "word\tlabel\td_pos\td_neg").map_err(map_report_io)?;
    for word in words {
        let label = scorer.polarity(model, word)?;
        match model.vector(word) {
            Some(v) => {
                let (d_pos, d_neg) = scorer.distances(v);
                writeln!(w, "{word}\t{label}\t{d_pos:.6}\t{d_neg:.6}").map_err(map_report_io)?;
            }
            None => {
                writeln!(w, "{word}\t{label}\tNA\tNA").map_err(map_report_io)?;
            }
        }
    }
    Ok(())
}

fn map_report_io(e: std::io::Error) -> crate::Error {
    crate::Error::Sentiment(SentimentError::Io {
        path: "<writer>".into(),
        source: e,
    })
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_lexicon(max: usize) -> impl Strategy<Value = SentimentLexicon> {
        proptest::collection::hash_map("[a-f]{1,2}", proptest::bool::ANY, 0..max).prop_map(|m| {
            SentimentLexicon::new(
                m.into_iter().map(|(w, pos)| {
                    (
                        w,
                        if pos {
                            Polarity::Positive
                        } else {
                            Polarity::Negative
                        },
                    )
                }),
                "prop",
            )
        })
    }

    proptest! {
        #[test]
        fn merge_commutes(a in arb_lexicon(12), b in arb_lexicon(12)) {
            let ab: std::collections::BTreeMap<String, bool> = merge_lexicons(&a, &b)
                .entries()
                .map(|(w, p)| (w.to_owned(), p == Polarity::Positive))
                .collect();
            let ba: std::collections::BTreeMap<String, bool> = merge_lexicons(&b, &a)
                .entries()
                .map(|(w, p)| (w.to_owned(), p == Polarity::Positive))
                .collect();
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn merge_never_keeps_conflicts(a in arb_lexicon(12), b in arb_lexicon(12)) {
            let merged = merge_lexicons(&a, &b);
            for (w, p) in merged.entries() {
                let pa = a.get(w);
                let pb = b.get(w);
                prop_assert!(pa.is_none() || pa == Some(p));
                prop_assert!(pb.is_none() || pb == Some(p));
            }
        }
    }
}
