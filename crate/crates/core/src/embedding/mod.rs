//! Skip-gram word embeddings trained with negative-sampling SGD.
//!
//! A model holds two matrices over the vocabulary: the input matrix `W`
//! (one vector per word, the embeddings proper) and the output matrix `W'`
//! (context weights). Training predicts context words from center words;
//! each center/context pair is contrasted against `k` noise words drawn
//! from the unigram^(3/4) distribution.

mod io;
mod sampler;
mod train;

use rand::Rng;

pub use io::sidecar_path;
pub use sampler::NoiseDistribution;
pub(crate) use train::TrainOptions;
pub use train::TrainStats;

use crate::corpus::{TokenStream, Vocab};
use crate::error::EmbeddingError;

/// Which pipeline stage produced the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Trained from scratch on a general corpus.
    General,
    /// Continuation-trained on a domain corpus.
    Domain,
    /// Seed vectors injected (and possibly retrained).
    Seeded,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::General => write!(f, "general"),
            Stage::Domain => write!(f, "domain"),
            Stage::Seeded => write!(f, "seeded"),
        }
    }
}

/// Hyperparameters for a training run.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Vector dimensionality.
    pub dim: usize,
    /// Maximum context offset; the effective window per token is drawn
    /// uniformly from `1..=window`.
    pub window: usize,
    /// Noise words per center/context pair.
    pub negatives: usize,
    /// Learning rate at the first scheduled pair.
    pub initial_lr: f64,
    /// Learning rate approached at the last scheduled pair.
    pub final_lr: f64,
    /// Passes over the corpus.
    pub epochs: u32,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample_threshold: f64,
    /// Seed for every random draw made by the trainer.
    pub seed: u64,
    /// Worker count. One worker is fully deterministic; more workers update
    /// the shared matrices lock-free and tolerate lost updates.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            initial_lr: 0.025,
            final_lr: 1e-4,
            epochs: 5,
            subsample_threshold: 1e-3,
            seed: 1,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let fail = |msg: String| Err(EmbeddingError::InvalidConfig(msg));
        if self.dim == 0 {
            return fail("dim must be >= 1".into());
        }
        if self.window == 0 {
            return fail("window must be >= 1".into());
        }
        if self.negatives == 0 {
            return fail("negatives must be >= 1".into());
        }
        if !self.initial_lr.is_finite() || self.initial_lr <= 0.0 {
            return fail(format!(
                "initial_lr must be positive, got {}",
                self.initial_lr
            ));
        }
        if !self.final_lr.is_finite() || self.final_lr < 0.0 {
            return fail(format!(
                "final_lr must be non-negative, got {}",
                self.final_lr
            ));
        }
        if self.final_lr > self.initial_lr {
            return fail(format!(
                "final_lr {} exceeds initial_lr {}",
                self.final_lr, self.initial_lr
            ));
        }
        if self.subsample_threshold < 0.0 {
            return fail("subsample_threshold must be >= 0".into());
        }
        if self.threads == 0 {
            return fail("threads must be >= 1".into());
        }
        Ok(())
    }
}

/// Skip-gram embedding model: vocabulary plus input/output matrices.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    vocab: Vocab,
    dim: usize,
    w: Vec<f64>,
    w_out: Vec<f64>,
    trained_epochs: u32,
    stage: Stage,
    seeded_rows: Vec<usize>,
}

impl EmbeddingModel {
    /// Fresh model: `W` uniform in `[-0.5/dim, +0.5/dim]`, `W'` all zeros.
    pub fn init<R: Rng>(
        vocab: Vocab,
        cfg: &TrainConfig,
        rng: &mut R,
    ) -> Result<EmbeddingModel, EmbeddingError> {
        cfg.validate()?;
        if vocab.is_empty() {
            return Err(EmbeddingError::EmptyVocab);
        }
        let dim = cfg.dim;
        let bound = 0.5 / dim as f64;
        let w = (0..vocab.len() * dim)
            .map(|_| rng.gen_range(-bound..bound))
            .collect();
        let w_out = vec![0.0; vocab.len() * dim];
        Ok(EmbeddingModel {
            vocab,
            dim,
            w,
            w_out,
            trained_epochs: 0,
            stage: Stage::General,
            seeded_rows: Vec::new(),
        })
    }

    pub(crate) fn from_parts(
        vocab: Vocab,
        dim: usize,
        w: Vec<f64>,
        w_out: Vec<f64>,
        stage: Stage,
    ) -> EmbeddingModel {
        debug_assert_eq!(w.len(), vocab.len() * dim);
        debug_assert_eq!(w_out.len(), vocab.len() * dim);
        EmbeddingModel {
            vocab,
            dim,
            w,
            w_out,
            trained_epochs: 0,
            stage,
            seeded_rows: Vec::new(),
        }
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub(crate) fn set_stage(&mut self, stage: Stage) {
        self.stage = stage;
    }

    pub fn trained_epochs(&self) -> u32 {
        self.trained_epochs
    }

    pub(crate) fn add_epochs(&mut self, epochs: u32) {
        self.trained_epochs += epochs;
    }

    /// Refresh vocabulary counts from a corpus, keeping the word set and
    /// order. Vector files carry no frequencies, so a model about to resume
    /// training needs its counts rebuilt from the corpus it will train on.
    pub fn recount_vocab(&mut self, tokens: &TokenStream) {
        self.vocab.recount(tokens);
    }

    /// Rows of `W` that were overwritten by seed injection.
    pub fn seeded_rows(&self) -> &[usize] {
        &self.seeded_rows
    }

    pub(crate) fn set_seeded_rows(&mut self, rows: Vec<usize>) {
        self.seeded_rows = rows;
    }

    fn check_index(&self, index: usize) -> Result<(), EmbeddingError> {
        if index >= self.vocab.len() {
            return Err(EmbeddingError::IndexOutOfRange {
                index,
                len: self.vocab.len(),
            });
        }
        Ok(())
    }

    /// Input vector (`W` row) of the word at `index`.
    pub fn row(&self, index: usize) -> &[f64] {
        &self.w[index * self.dim..(index + 1) * self.dim]
    }

    pub fn row_mut(&mut self, index: usize) -> &mut [f64] {
        &mut self.w[index * self.dim..(index + 1) * self.dim]
    }

    /// Output vector (`W'` row) of the word at `index`.
    pub fn out_row(&self, index: usize) -> &[f64] {
        &self.w_out[index * self.dim..(index + 1) * self.dim]
    }

    pub fn out_row_mut(&mut self, index: usize) -> &mut [f64] {
        &mut self.w_out[index * self.dim..(index + 1) * self.dim]
    }

    /// Input vector by word, if present.
    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vocab.index_of(word).map(|i| self.row(i))
    }

    pub(crate) fn matrices_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.w, &mut self.w_out)
    }

    /// Negative-sampling loss of one center/context pair against the given
    /// noise words, evaluated at the current parameters without updating
    /// them.
    pub fn pair_loss(
        &self,
        center: usize,
        context: usize,
        negatives: &[usize],
    ) -> Result<f64, EmbeddingError> {
        self.check_index(center)?;
        self.check_index(context)?;
        if negatives.is_empty() {
            return Err(EmbeddingError::NoNegatives);
        }
        for &n in negatives {
            self.check_index(n)?;
        }
        Ok(train::pair_loss(self, center, context, negatives))
    }

    /// One SGD step on the negative-sampling loss for a center/context pair.
    ///
    /// Returns the loss at the pre-update parameters, then updates
    /// `W[center]`, `W'[context]`, and each `W'[negative]` by `-lr` times
    /// the gradient evaluated at those same pre-update parameters.
    pub fn step_pair(
        &mut self,
        center: usize,
        context: usize,
        negatives: &[usize],
        lr: f64,
    ) -> Result<f64, EmbeddingError> {
        self.check_index(center)?;
        self.check_index(context)?;
        if negatives.is_empty() {
            return Err(EmbeddingError::NoNegatives);
        }
        for &n in negatives {
            self.check_index(n)?;
        }
        if !lr.is_finite() || lr <= 0.0 {
            return Err(EmbeddingError::NonPositiveLearningRate(lr));
        }
        Ok(train::step_pair(self, center, context, negatives, lr))
    }

    /// Train in place per `cfg`. Zero epochs is a no-op.
    pub fn train(
        &mut self,
        tokens: &TokenStream,
        cfg: &TrainConfig,
    ) -> Result<TrainStats, EmbeddingError> {
        train::run(self, tokens, cfg, &train::TrainOptions::default())
    }

    pub(crate) fn train_with_options(
        &mut self,
        tokens: &TokenStream,
        cfg: &TrainConfig,
        options: &train::TrainOptions,
    ) -> Result<TrainStats, EmbeddingError> {
        train::run(self, tokens, cfg, options)
    }

    /// The `k` nearest in-vocab words by cosine similarity, excluding the
    /// query itself. Ties are broken by vocab order.
    pub fn nearest_neighbors(
        &self,
        word: &str,
        k: usize,
    ) -> Result<Vec<(String, f64)>, EmbeddingError> {
        assert!(k >= 1, "k must be >= 1");
        let query = self
            .vocab
            .index_of(word)
            .ok_or_else(|| EmbeddingError::UnknownWord(word.to_owned()))?;
        let qv = self.row(query);
        let mut scored: Vec<(usize, f64)> = (0..self.vocab.len())
            .filter(|&i| i != query)
            .map(|i| (i, cosine_similarity(qv, self.row(i))))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(i, s)| (self.vocab.word(i).to_owned(), s))
            .collect())
    }
}

/// Cosine similarity; zero when either vector has zero norm.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Continuation training: carry vectors over from `pretrained` for words in
/// `new_vocab`, initialize the rest fresh, then train on `tokens`.
///
/// Carried words copy their `W` and `W'` rows bit-for-bit; new words draw a
/// fresh uniform `W` row (from the config seed) and a zero `W'` row. The
/// result's vocabulary is exactly `new_vocab`.
pub fn continue_training(
    pretrained: &EmbeddingModel,
    new_vocab: Vocab,
    tokens: &TokenStream,
    cfg: &TrainConfig,
) -> Result<(EmbeddingModel, TrainStats), EmbeddingError> {
    cfg.validate()?;
    if pretrained.dim() != cfg.dim {
        return Err(EmbeddingError::DimensionMismatch {
            model_dim: pretrained.dim(),
            cfg_dim: cfg.dim,
        });
    }
    if new_vocab.is_empty() {
        return Err(EmbeddingError::EmptyVocab);
    }
    let dim = cfg.dim;
    let bound = 0.5 / dim as f64;
    let mut rng = train::stream_rng(cfg.seed, train::STREAM_INIT, 0, 0);
    let mut w = vec![0.0; new_vocab.len() * dim];
    let mut w_out = vec![0.0; new_vocab.len() * dim];
    for i in 0..new_vocab.len() {
        match pretrained.vocab().index_of(new_vocab.word(i)) {
            Some(j) => {
                w[i * dim..(i + 1) * dim].copy_from_slice(pretrained.row(j));
                w_out[i * dim..(i + 1) * dim].copy_from_slice(pretrained.out_row(j));
            }
            None => {
                for slot in &mut w[i * dim..(i + 1) * dim] {
                    *slot = rng.gen_range(-bound..bound);
                }
            }
        }
    }
    let mut model = EmbeddingModel::from_parts(new_vocab, dim, w, w_out, Stage::Domain);
    model.trained_epochs = pretrained.trained_epochs;
    let stats = model.train(tokens, cfg)?;
    Ok((model, stats))
}
