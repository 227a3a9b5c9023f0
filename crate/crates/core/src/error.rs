//! Crate-wide error types, one enum per module plus a catch-all wrapper.

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading corpora or building vocabularies.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { path: PathBuf, offset: usize },
    #[error("{path}:{line}: malformed vocab line: {msg}")]
    MalformedVocabLine {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

/// Errors raised by model construction, training, and vector file I/O.
#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("cannot build a model over an empty vocabulary")]
    EmptyVocab,
    #[error("word index {index} out of range for vocabulary of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("negatives list must be nonempty")]
    NoNegatives,
    #[error("learning rate must be positive, got {0}")]
    NonPositiveLearningRate(f64),
    #[error("model dimension {model_dim} does not match configured dimension {cfg_dim}")]
    DimensionMismatch { model_dim: usize, cfg_dim: usize },
    #[error("model vocabulary does not match the vocabulary it is trained against")]
    VocabMismatch,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("word not in vocabulary: {0:?}")]
    UnknownWord(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:1: malformed header: {msg}")]
    MalformedHeader { path: PathBuf, msg: String },
    #[error("{path}: expected {expected} vector rows, found {found}")]
    RowCountMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: {msg}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

/// Errors raised by lexicon handling, seeding, and polarity scoring.
#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed lexicon line: {msg}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: lexicon file is empty")]
    EmptyFile { path: PathBuf },
    #[error("lexicon has no entries")]
    EmptyLexicon,
    #[error("seed magnitude must be positive, got {0}")]
    InvalidSeedMagnitude(f64),
    #[error("no in-vocab {side} seed words; cannot build a centroid")]
    NoSeedsInVocab { side: &'static str },
    #[error("scorer dimension {scorer_dim} does not match model dimension {model_dim}")]
    DimensionMismatch { scorer_dim: usize, model_dim: usize },
    #[error("model stage is {found:?}, expected {expected}")]
    StageMismatch {
        expected: &'static str,
        found: crate::embedding::Stage,
    },
    #[error("gold set is empty")]
    EmptyGold,
    #[error("gold word {0:?} has no prediction")]
    MissingPrediction(String),
}

/// Errors raised while comparing models or projecting vectors.
#[derive(Debug, Error)]
pub enum DiffError {
    #[error("need at least two models to compare, got {0}")]
    TooFewModels(usize),
    #[error("duplicate model name: {0:?}")]
    DuplicateModelName(String),
    #[error("need at least 3 in-vocab words to project, found {0}")]
    TooFewWords(usize),
    #[error("projection requires dimension >= 2, model has {0}")]
    DimensionTooSmall(usize),
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
    #[error("{path}:{line}: malformed report line: {msg}")]
    MalformedReport {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

/// Errors raised by feature building, splitting, and SVM training.
#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("token list is empty")]
    EmptyTokens,
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("split fraction must lie in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("cannot split {0} items into two nonempty parts")]
    TooFewItems(usize),
    #[error("training set contains a single class")]
    SingleClass,
    #[error("SMO did not converge within {0} pair updates")]
    NoConvergence(u64),
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("{path}:{line}: malformed labeled document: {msg}")]
    MalformedDoc {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed model file: {msg}")]
    MalformedModel {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Top-level error carrying the owning module's name in its display form.
#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("embedding: {0}")]
    Embedding(#[from] EmbeddingError),
    #[error("sentiment: {0}")]
    Sentiment(#[from] SentimentError),
    #[error("diffing: {0}")]
    Diffing(#[from] DiffError),
    #[error("classify: {0}")]
    Classify(#[from] ClassifyError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
