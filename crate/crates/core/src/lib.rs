//! Sentiment-aware word embeddings.
//!
//! The crate trains skip-gram vectors with negative sampling, continues
//! training across corpora, injects sentiment-seed vectors from a polarity
//! lexicon, retrains under a controlled number of epochs, scores word
//! polarity by distance to seed centroids, detects words whose polarity
//! flips between models trained on different corpora, and classifies
//! documents with an RBF-kernel SVM over averaged word vectors.
//!
//! The usual pipeline:
//!
//! 1. [`corpus`]: load tokenized text, build a [`corpus::Vocab`].
//! 2. [`embedding`]: train an [`embedding::EmbeddingModel`] on a general
//!    corpus, then continue on a domain corpus.
//! 3. [`sentiment`]: inject seed vectors from a [`sentiment::SentimentLexicon`],
//!    retrain briefly, and score polarity against the seed centroids.
//! 4. [`diffing`]: compare polarity labels across models and project vectors
//!    to 2-D for inspection.
//! 5. [`classify`]: build document features and train an SVM sentiment
//!    classifier.

pub mod classify;
pub mod corpus;
pub mod diffing;
pub mod embedding;
pub mod error;
pub mod sentiment;

pub use error::{Error, Result};
