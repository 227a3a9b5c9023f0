//! Document sentiment classification over averaged word vectors.
//!
//! A document's feature is the mean of its in-vocab token embeddings; a
//! binary SVM with an RBF kernel separates positive from negative documents.

mod svm;

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::embedding::EmbeddingModel;
use crate::error::ClassifyError;
use crate::sentiment::Polarity;

pub use svm::{rbf, train_svm, SvmModel};

/// How token occurrences are weighted when averaging into a document vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Every in-vocab occurrence counts once.
    #[default]
    Uniform,
    /// Distinct words weighted by occurrence count. Equal to `Uniform` over
    /// the token multiset; the hook for alternative schemes.
    Frequency,
}

/// Averaged word-vector feature for one document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocFeature {
    pub vector: Vec<f64>,
    /// Share of tokens that were out of vocabulary.
    pub oov_fraction: f64,
}

/// Feature vector of a token list: the mean of in-vocab token vectors over
/// occurrences. All-out-of-vocab documents get the zero vector and an
/// `oov_fraction` of one.
pub fn doc_vector(
    model: &EmbeddingModel,
    tokens: &[String],
    weighting: Weighting,
) -> Result<DocFeature, ClassifyError> {
    if tokens.is_empty() {
        return Err(ClassifyError::EmptyTokens);
    }
    let mut vector = vec![0.0; model.dim()];
    let mut in_vocab = 0u64;
    match weighting {
        Weighting::Uniform => {
            for token in tokens {
                if let Some(v) = model.vector(token) {
                    for (s, x) in vector.iter_mut().zip(v) {
                        *s += x;
                    }
                    in_vocab += 1;
                }
            }
        }
        Weighting::Frequency => {
            let mut counts: std::collections::HashMap<&str, u64> = std::collections::HashMap::new();
            for token in tokens {
                if model.vector(token).is_some() {
                    *counts.entry(token.as_str()).or_insert(0) += 1;
                }
            }
            for (word, count) in counts {
                let v = model.vector(word).expect("counted in-vocab");
                for (s, x) in vector.iter_mut().zip(v) {
                    *s += count as f64 * x;
                }
                in_vocab += count;
            }
        }
    }
    if in_vocab > 0 {
        vector.iter_mut().for_each(|s| *s /= in_vocab as f64);
    }
    Ok(DocFeature {
        vector,
        oov_fraction: (tokens.len() as u64 - in_vocab) as f64 / tokens.len() as f64,
    })
}

/// Labeled feature set for training or evaluation.
#[derive(Debug, Clone, Default)]
pub struct LabeledSet {
    pub items: Vec<(DocFeature, Polarity)>,
}

impl LabeledSet {
    pub fn new(items: Vec<(DocFeature, Polarity)>) -> Self {
        LabeledSet { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn has_both_classes(&self) -> bool {
        let mut pos = false;
        let mut neg = false;
        for (_, label) in &self.items {
            match label {
                Polarity::Positive => pos = true,
                Polarity::Negative => neg = true,
            }
        }
        pos && neg
    }
}

/// Parse a labeled-document file: TSV lines `label<TAB>tokens` where label
/// is `+1` or `-1` and tokens are space-separated.
pub fn load_labeled_docs(
    path: impl AsRef<Path>,
) -> Result<Vec<(Polarity, Vec<String>)>, ClassifyError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ClassifyError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut docs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |msg: String| ClassifyError::MalformedDoc {
            path: path.to_owned(),
            line: lineno + 1,
            msg,
        };
        let (label, body) = line
            .split_once('\t')
            .ok_or_else(|| malformed(format!("expected `label<TAB>tokens`, got {line:?}")))?;
        let polarity = match label.trim() {
            "+1" => Polarity::Positive,
            "-1" => Polarity::Negative,
            other => return Err(malformed(format!("label must be +1 or -1, got {other:?}"))),
        };
        let tokens: Vec<String> = body.split_whitespace().map(str::to_owned).collect();
        if tokens.is_empty() {
            return Err(malformed("document has no tokens".into()));
        }
        docs.push((polarity, tokens));
    }
    Ok(docs)
}

/// Randomly partition into train and test.
///
/// The train size is `round_ties_even(fraction * n)`, clamped so both sides
/// stay nonempty. A train side holding a single class is rejected.
pub fn split<R: Rng>(
    data: &LabeledSet,
    train_fraction: f64,
    rng: &mut R,
) -> Result<(LabeledSet, LabeledSet), ClassifyError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ClassifyError::BadFraction(train_fraction));
    }
    let n = data.len();
    if n < 2 {
        return Err(ClassifyError::TooFewItems(n));
    }
    let train_size = (train_fraction * n as f64)
        .round_ties_even()
        .clamp(1.0, (n - 1) as f64) as usize;
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let (train_idx, test_idx) = indices.split_at(train_size);
    let pick = |idx: &[usize]| LabeledSet {
        items: idx.iter().map(|&i| data.items[i].clone()).collect(),
    };
    let train = pick(train_idx);
    let test = pick(test_idx);
    if !train.has_both_classes() {
        return Err(ClassifyError::SingleClass);
    }
    Ok((train, test))
}

/// Fraction of test documents the model labels correctly.
pub fn evaluate(svm: &SvmModel, test: &LabeledSet) -> Result<f64, ClassifyError> {
    if test.is_empty() {
        return Err(ClassifyError::EmptyTestSet);
    }
    let mut correct = 0usize;
    for (feature, label) in &test.items {
        if svm.predict(feature)? == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}
