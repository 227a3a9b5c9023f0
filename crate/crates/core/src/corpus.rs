//! Corpus ingestion: tokenized document streams, stop-word sets, and
//! frequency-filtered vocabularies.
//!
//! Input text is expected to be tokenized upstream. A corpus file holds one
//! document per line with space-separated tokens; a stop-word file holds one
//! word per line with `#`-prefixed comment lines.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::CorpusError;

/// A sequence of tokenized documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    docs: Vec<Vec<String>>,
    token_count: usize,
}

impl TokenStream {
    /// Wrap pre-tokenized documents. Empty documents are dropped; tokens must
    /// be non-empty and free of internal whitespace.
    pub fn from_docs<I, D, T>(docs: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let docs: Vec<Vec<String>> = docs
            .into_iter()
            .map(|doc| {
                doc.into_iter()
                    .map(Into::into)
                    .inspect(|t: &String| {
                        debug_assert!(
                            !t.is_empty() && !t.chars().any(char::is_whitespace),
                            "token {t:?} is empty or contains whitespace"
                        );
                    })
                    .collect()
            })
            .filter(|doc: &Vec<String>| !doc.is_empty())
            .collect();
        let token_count = docs.iter().map(Vec::len).sum();
        TokenStream { docs, token_count }
    }

    /// Load a corpus file: UTF-8, one document per line, space-separated
    /// tokens. Empty lines are skipped; repeated separators collapse.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_owned(),
            source,
        })?;
        let text = std::str::from_utf8(&bytes).map_err(|e| CorpusError::InvalidUtf8 {
            path: path.to_owned(),
            offset: e.valid_up_to(),
        })?;
        Ok(Self::from_text(text))
    }

    /// Parse corpus text directly (same format as [`TokenStream::from_path`]).
    pub fn from_text(text: &str) -> Self {
        let docs = text.lines().map(|line| {
            line.split_whitespace()
                .map(str::to_owned)
                .collect::<Vec<_>>()
        });
        Self::from_docs(docs)
    }

    pub fn docs(&self) -> &[Vec<String>] {
        &self.docs
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Iterate over all tokens in document order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.docs.iter().flatten().map(String::as_str)
    }

    /// Drop frequent in-vocab tokens at random and all out-of-vocab tokens.
    ///
    /// An occurrence of word `w` with corpus frequency `f(w) = count(w) /
    /// total_tokens` is discarded with probability
    /// `max(0, 1 - sqrt(threshold / f(w)))`. A threshold of zero disables
    /// subsampling and keeps every in-vocab token. Documents left empty are
    /// removed from the stream.
    pub fn subsample<R: Rng>(&self, vocab: &Vocab, threshold: f64, rng: &mut R) -> TokenStream {
        assert!(threshold >= 0.0, "subsample threshold must be >= 0");
        let docs = self.docs.iter().map(|doc| {
            doc.iter()
                .filter(|tok| {
                    let Some(idx) = vocab.index_of(tok) else {
                        return false;
                    };
                    let p = vocab.discard_probability(idx, threshold);
                    p == 0.0 || rng.gen::<f64>() >= p
                })
                .cloned()
                .collect::<Vec<_>>()
        });
        Self::from_docs(docs)
    }
}

/// An exact-match stop-word set.
#[derive(Debug, Clone, Default)]
pub struct StopWordSet {
    words: HashSet<String>,
}

impl StopWordSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(words: I) -> Self {
        StopWordSet {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    /// Load a stop-word file: one word per line, `#`-prefixed lines are
    /// comments, blank lines ignored.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_owned(),
            source,
        })?;
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_owned);
        Ok(Self::new(words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A frequency-filtered vocabulary with a deterministic word order:
/// descending count, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    words: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
    min_count: u64,
    total_tokens: u64,
}

impl Vocab {
    /// Build a vocabulary from a token stream, keeping words that occur at
    /// least `min_count` times and are not stop words.
    pub fn build(tokens: &TokenStream, min_count: u64, stops: &StopWordSet) -> Vocab {
        assert!(min_count >= 1, "min_count must be >= 1");
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for tok in tokens.tokens() {
            *counts.entry(tok).or_insert(0) += 1;
        }
        let mut kept: Vec<(&str, u64)> = counts
            .into_iter()
            .filter(|(w, c)| *c >= min_count && !stops.contains(w))
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        Self::from_sorted(kept.into_iter().map(|(w, c)| (w.to_owned(), c)), min_count)
    }

    /// Assemble a vocabulary from `(word, count)` pairs already in vocab
    /// order. Counts below `min_count` or duplicate words panic.
    pub fn from_sorted<I: IntoIterator<Item = (String, u64)>>(pairs: I, min_count: u64) -> Vocab {
        let mut words = Vec::new();
        let mut counts = Vec::new();
        let mut index = HashMap::new();
        let mut total_tokens = 0u64;
        for (word, count) in pairs {
            assert!(count >= min_count, "count for {word:?} below min_count");
            let prev = index.insert(word.clone(), words.len());
            assert!(prev.is_none(), "duplicate vocab word {word:?}");
            total_tokens += count;
            words.push(word);
            counts.push(count);
        }
        Vocab {
            words,
            index,
            counts,
            min_count,
            total_tokens,
        }
    }

    /// Load a vocab file of `word count` lines (vocab order preserved).
    pub fn from_path(path: impl AsRef<Path>) -> Result<Vocab, CorpusError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(word), Some(count), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(CorpusError::MalformedVocabLine {
                    path: path.to_owned(),
                    line: lineno + 1,
                    msg: format!("expected `word count`, got {line:?}"),
                });
            };
            let count: u64 = count.parse().map_err(|_| CorpusError::MalformedVocabLine {
                path: path.to_owned(),
                line: lineno + 1,
                msg: format!("invalid count {count:?}"),
            })?;
            pairs.push((word.to_owned(), count));
        }
        let min_count = pairs.iter().map(|(_, c)| *c).min().unwrap_or(1).max(1);
        Ok(Self::from_sorted(pairs, min_count))
    }

    /// Write `word count` lines in vocab order.
    pub fn write(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        for (word, count) in self.words.iter().zip(&self.counts) {
            writeln!(w, "{word} {count}")?;
        }
        Ok(())
    }

    /// Replace stored counts with occurrence counts taken from `tokens`,
    /// keeping the word set and order unchanged. Used when resuming training
    /// from a vector file, which does not carry frequencies.
    pub fn recount(&mut self, tokens: &TokenStream) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        for tok in tokens.tokens() {
            if let Some(&i) = self.index.get(tok) {
                self.counts[i] += 1;
            }
        }
        self.total_tokens = self.counts.iter().sum();
        self.min_count = 0;
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Total retained token occurrences (sum of stored counts).
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Corpus frequency of the word at `index`.
    pub fn frequency(&self, index: usize) -> f64 {
        if self.total_tokens == 0 {
            0.0
        } else {
            self.counts[index] as f64 / self.total_tokens as f64
        }
    }

    /// Subsampling discard probability for the word at `index`; zero when
    /// `threshold` is zero.
    pub fn discard_probability(&self, index: usize, threshold: f64) -> f64 {
        if threshold == 0.0 {
            return 0.0;
        }
        let f = self.frequency(index);
        if f <= 0.0 {
            return 0.0;
        }
        (1.0 - (threshold / f).sqrt()).max(0.0)
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn word_strategy() -> impl Strategy<Value = String> {
        "[a-e]{1,3}"
    }

    proptest! {
        #[test]
        fn discard_probability_in_unit_interval(
            words in proptest::collection::vec(word_strategy(), 1..50),
            threshold in 0.0f64..2.0,
        ) {
            let ts = TokenStream::from_docs([words]);
            let v = Vocab::build(&ts, 1, &StopWordSet::empty());
            for i in 0..v.len() {
                let p = v.discard_probability(i, threshold);
                prop_assert!((0.0..=1.0).contains(&p), "p = {}", p);
            }
        }

        #[test]
        fn vocab_round_trip_bijection(
            words in proptest::collection::vec(word_strategy(), 0..60),
        ) {
            let ts = TokenStream::from_docs([words]);
            let v = Vocab::build(&ts, 1, &StopWordSet::empty());
            for i in 0..v.len() {
                prop_assert_eq!(v.index_of(v.word(i)), Some(i));
            }
        }

        #[test]
        fn subsample_seed_reproducible(
            words in proptest::collection::vec(word_strategy(), 0..80),
            seed in any::<u64>(),
            threshold in 0.0f64..0.2,
        ) {
            let ts = TokenStream::from_docs([words]);
            let v = Vocab::build(&ts, 1, &StopWordSet::empty());
            let a = ts.subsample(&v, threshold, &mut StdRng::seed_from_u64(seed));
            let b = ts.subsample(&v, threshold, &mut StdRng::seed_from_u64(seed));
            prop_assert_eq!(a, b);
        }
    }
}
