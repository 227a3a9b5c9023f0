//! Negative-sampling SGD: the per-pair update and the epoch/worker loop.
//!
//! Training runs in one of two modes. With one worker every random draw
//! comes from a seeded stream and runs are bit-identical. With several
//! workers the matrices are shared lock-free and concurrent read-modify-write
//! races are tolerated; results are approximate and nondeterministic.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{EmbeddingModel, NoiseDistribution, TrainConfig};
use crate::corpus::TokenStream;
use crate::error::EmbeddingError;

pub(crate) const STREAM_INIT: u64 = 1;
const STREAM_SCHEDULE: u64 = 2;
const STREAM_NEGATIVES: u64 = 3;

/// Counters reported by a training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainStats {
    /// Center tokens visited (post-subsampling), summed over epochs.
    pub tokens_processed: u64,
    /// Mean per-pair loss at pre-update parameters.
    pub mean_loss: f64,
    /// Epochs actually run.
    pub wall_epochs: u32,
}

impl TrainStats {
    fn empty() -> Self {
        TrainStats {
            tokens_processed: 0,
            mean_loss: 0.0,
            wall_epochs: 0,
        }
    }
}

#[derive(Debug, Default)]
pub(crate) struct TrainOptions {
    /// Per-vocab-index mask; `true` pins that word's `W` row during training.
    pub frozen_rows: Option<Vec<bool>>,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seeded stream per (purpose, worker, epoch).
pub(crate) fn stream_rng(seed: u64, stream: u64, worker: usize, epoch: u32) -> StdRng {
    let mut s = seed ^ mix64(stream.wrapping_add(0x9E37_79B9_7F4A_7C15));
    s = mix64(s.wrapping_add((worker as u64).wrapping_mul(0xA24B_AED4_963E_E407)));
    s = mix64(s.wrapping_add((epoch as u64).wrapping_mul(0x9FB2_1C65_1E98_DF25)));
    StdRng::seed_from_u64(s)
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// ln(1 + e^z), stable for large |z|.
#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Lock-free view of one matrix. The exclusive borrow taken at construction
/// guarantees no non-atomic access aliases it; workers read and write rows
/// with relaxed loads/stores and tolerate lost updates.
pub(crate) struct AtomicMatrix<'a> {
    cells: &'a [AtomicU64],
    dim: usize,
}

impl<'a> AtomicMatrix<'a> {
    pub(crate) fn new(data: &'a mut [f64], dim: usize) -> Self {
        debug_assert_eq!(data.len() % dim, 0);
        // AtomicU64 has u64's size and alignment, which match f64's.
        let cells = unsafe {
            std::slice::from_raw_parts(data.as_mut_ptr().cast::<AtomicU64>(), data.len())
        };
        AtomicMatrix { cells, dim }
    }

    #[inline]
    fn load(&self, i: usize) -> f64 {
        f64::from_bits(self.cells[i].load(Ordering::Relaxed))
    }

    #[inline]
    fn store(&self, i: usize, v: f64) {
        self.cells[i].store(v.to_bits(), Ordering::Relaxed);
    }

    fn copy_row(&self, row: usize, out: &mut [f64]) {
        let base = row * self.dim;
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.load(base + j);
        }
    }

    fn dot_row(&self, row: usize, v: &[f64]) -> f64 {
        let base = row * self.dim;
        let mut acc = 0.0;
        for (j, x) in v.iter().enumerate() {
            acc += x * self.load(base + j);
        }
        acc
    }

    /// `acc += coef * matrix[row]`
    fn accumulate_row(&self, row: usize, coef: f64, acc: &mut [f64]) {
        let base = row * self.dim;
        for (j, slot) in acc.iter_mut().enumerate() {
            *slot += coef * self.load(base + j);
        }
    }

    /// `matrix[row] += coef * v` (racy read-modify-write)
    fn axpy_row(&self, row: usize, coef: f64, v: &[f64]) {
        let base = row * self.dim;
        for (j, x) in v.iter().enumerate() {
            self.store(base + j, self.load(base + j) + coef * x);
        }
    }
}

pub(crate) struct StepScratch {
    center: Vec<f64>,
    grad: Vec<f64>,
    gains: Vec<(usize, f64)>,
}

impl StepScratch {
    pub(crate) fn new(dim: usize, negatives: usize) -> Self {
        StepScratch {
            center: vec![0.0; dim],
            grad: vec![0.0; dim],
            gains: Vec::with_capacity(negatives + 1),
        }
    }
}

/// Loss of one pair at the current parameters, no update. Must stay in sync
/// with the loss computed inside [`sgd_step`].
pub(crate) fn pair_loss(
    model: &EmbeddingModel,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> f64 {
    let cv = model.row(center);
    let dot = |row: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (x, y) in cv.iter().zip(row) {
            acc += x * y;
        }
        acc
    };
    let mut loss = softplus(-dot(model.out_row(context)));
    for &n in negatives {
        loss += softplus(dot(model.out_row(n)));
    }
    loss
}

/// One SGD step on `-log sigma(w_c . w'_o) - sum_n log sigma(-w_c . w'_n)`.
///
/// All dot products and the center gradient are evaluated at the pre-update
/// parameters, then `W'[context]`, each `W'[negative]`, and finally
/// `W[center]` move one `lr`-scaled gradient step. Returns the pre-update
/// loss.
#[allow(clippy::too_many_arguments)]
fn sgd_step(
    w: &AtomicMatrix,
    wp: &AtomicMatrix,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f64,
    freeze_center: bool,
    scratch: &mut StepScratch,
) -> f64 {
    w.copy_row(center, &mut scratch.center);
    scratch.grad.fill(0.0);
    scratch.gains.clear();

    let s = wp.dot_row(context, &scratch.center);
    let mut loss = softplus(-s);
    let g = sigmoid(s) - 1.0;
    wp.accumulate_row(context, g, &mut scratch.grad);
    scratch.gains.push((context, g));

    for &n in negatives {
        let s = wp.dot_row(n, &scratch.center);
        loss += softplus(s);
        let g = sigmoid(s);
        wp.accumulate_row(n, g, &mut scratch.grad);
        scratch.gains.push((n, g));
    }

    for &(row, g) in &scratch.gains {
        wp.axpy_row(row, -lr * g, &scratch.center);
    }
    if !freeze_center {
        w.axpy_row(center, -lr, &scratch.grad);
    }
    loss
}

pub(crate) fn step_pair(
    model: &mut EmbeddingModel,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f64,
) -> f64 {
    let dim = model.dim();
    let mut scratch = StepScratch::new(dim, negatives.len());
    let (w, wp) = model.matrices_mut();
    let w = AtomicMatrix::new(w, dim);
    let wp = AtomicMatrix::new(wp, dim);
    sgd_step(&w, &wp, center, context, negatives, lr, false, &mut scratch)
}

/// Replays the subsample and window draws of one worker without touching the
/// matrices, to count its scheduled pairs. Must draw in exactly the order
/// the main pass does.
fn count_worker_pairs(docs: &[Vec<u32>], discard: &[f64], cfg: &TrainConfig, worker: usize) -> u64 {
    let mut pairs = 0u64;
    for epoch in 0..cfg.epochs {
        let mut sched = stream_rng(cfg.seed, STREAM_SCHEDULE, worker, epoch);
        for (di, doc) in docs.iter().enumerate() {
            if di % cfg.threads != worker {
                continue;
            }
            let mut len = 0usize;
            for &t in doc {
                let p = discard[t as usize];
                if p > 0.0 && sched.gen::<f64>() < p {
                    continue;
                }
                len += 1;
            }
            for i in 0..len {
                let b = sched.gen_range(1..=cfg.window);
                pairs += (i.min(b) + b.min(len - 1 - i)) as u64;
            }
        }
    }
    pairs
}

struct WorkerOutcome {
    tokens_processed: u64,
    loss_sum: f64,
    pairs_updated: u64,
}

#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn worker_pass(
    w: &AtomicMatrix,
    wp: &AtomicMatrix,
    docs: &[Vec<u32>],
    discard: &[f64],
    noise: &NoiseDistribution,
    cfg: &TrainConfig,
    frozen: Option<&[bool]>,
    worker: usize,
    pair_counter: &AtomicU64,
    total_pairs: u64,
) -> WorkerOutcome {
    let dim = w.dim;
    let mut scratch = StepScratch::new(dim, cfg.negatives);
    let mut retained: Vec<u32> = Vec::new();
    let mut negatives: Vec<usize> = Vec::with_capacity(cfg.negatives);
    let lr_span = cfg.initial_lr - cfg.final_lr;

    let mut out = WorkerOutcome {
        tokens_processed: 0,
        loss_sum: 0.0,
        pairs_updated: 0,
    };

    for epoch in 0..cfg.epochs {
        let mut sched = stream_rng(cfg.seed, STREAM_SCHEDULE, worker, epoch);
        let mut negrng = stream_rng(cfg.seed, STREAM_NEGATIVES, worker, epoch);
        for (di, doc) in docs.iter().enumerate() {
            if di % cfg.threads != worker {
                continue;
            }
            retained.clear();
            for &t in doc {
                let p = discard[t as usize];
                if p > 0.0 && sched.gen::<f64>() < p {
                    continue;
                }
                retained.push(t);
            }
            let len = retained.len();
            for i in 0..len {
                out.tokens_processed += 1;
                let b = sched.gen_range(1..=cfg.window);
                let center = retained[i] as usize;
                let lo = i.saturating_sub(b);
                let hi = (i + b).min(len - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let context = retained[j] as usize;
                    let t = pair_counter.fetch_add(1, Ordering::Relaxed);
                    let lr = (cfg.initial_lr - lr_span * (t as f64 / total_pairs as f64))
                        .max(cfg.final_lr);

                    negatives.clear();
                    let mut ok = true;
                    'draw: for _ in 0..cfg.negatives {
                        // the true context word is never a noise target
                        for attempt in 0.. {
                            let cand = noise.sample(&mut negrng);
                            if cand != context {
                                negatives.push(cand);
                                break;
                            }
                            if attempt >= 100 {
                                ok = false;
                                break 'draw;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }

                    let freeze = frozen.is_some_and(|f| f[center]);
                    out.loss_sum +=
                        sgd_step(w, wp, center, context, &negatives, lr, freeze, &mut scratch);
                    out.pairs_updated += 1;
                }
            }
        }
    }
    out
}

pub(crate) fn run(
    model: &mut EmbeddingModel,
    tokens: &TokenStream,
    cfg: &TrainConfig,
    options: &TrainOptions,
) -> Result<TrainStats, EmbeddingError> {
    cfg.validate()?;
    if cfg.dim != model.dim() {
        return Err(EmbeddingError::DimensionMismatch {
            model_dim: model.dim(),
            cfg_dim: cfg.dim,
        });
    }
    if let Some(frozen) = &options.frozen_rows {
        if frozen.len() != model.len() {
            return Err(EmbeddingError::VocabMismatch);
        }
    }
    if cfg.epochs == 0 || model.is_empty() {
        return Ok(TrainStats::empty());
    }

    let vocab = model.vocab();
    let docs: Vec<Vec<u32>> = tokens
        .docs()
        .iter()
        .map(|doc| {
            doc.iter()
                .filter_map(|t| vocab.index_of(t))
                .map(|i| i as u32)
                .collect::<Vec<u32>>()
        })
        .filter(|d| !d.is_empty())
        .collect();
    if docs.is_empty() {
        return Ok(TrainStats {
            wall_epochs: cfg.epochs,
            ..TrainStats::empty()
        });
    }

    let noise = NoiseDistribution::unigram_power(vocab.counts(), 0.75).ok_or_else(|| {
        EmbeddingError::InvalidConfig(
            "vocabulary has no positive counts to sample noise from".into(),
        )
    })?;
    let discard: Vec<f64> = (0..vocab.len())
        .map(|i| vocab.discard_probability(i, cfg.subsample_threshold))
        .collect();

    let total_pairs: u64 = (0..cfg.threads)
        .map(|worker| count_worker_pairs(&docs, &discard, cfg, worker))
        .sum();
    if total_pairs == 0 {
        model.add_epochs(cfg.epochs);
        return Ok(TrainStats {
            tokens_processed: cfg.epochs as u64 * docs.iter().map(|d| d.len() as u64).sum::<u64>(),
            mean_loss: 0.0,
            wall_epochs: cfg.epochs,
        });
    }

    let dim = model.dim();
    let frozen = options.frozen_rows.as_deref();
    let pair_counter = AtomicU64::new(0);
    let (w_raw, wp_raw) = model.matrices_mut();
    let w = AtomicMatrix::new(w_raw, dim);
    let wp = AtomicMatrix::new(wp_raw, dim);

    let outcomes: Vec<WorkerOutcome> = if cfg.threads == 1 {
        vec![worker_pass(
            &w,
            &wp,
            &docs,
            &discard,
            &noise,
            cfg,
            frozen,
            0,
            &pair_counter,
            total_pairs,
        )]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..cfg.threads)
                .map(|worker| {
                    let w = &w;
                    let wp = &wp;
                    let docs = &docs;
                    let discard = &discard;
                    let noise = &noise;
                    let pair_counter = &pair_counter;
                    scope.spawn(move || {
                        worker_pass(
                            w,
                            wp,
                            docs,
                            discard,
                            noise,
                            cfg,
                            frozen,
                            worker,
                            pair_counter,
                            total_pairs,
                        )
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("training worker panicked"))
                .collect()
        })
    };

    let tokens_processed: u64 = outcomes.iter().map(|o| o.tokens_processed).sum();
    let pairs_updated: u64 = outcomes.iter().map(|o| o.pairs_updated).sum();
    let loss_sum: f64 = outcomes.iter().map(|o| o.loss_sum).sum();
    model.add_epochs(cfg.epochs);
    Ok(TrainStats {
        tokens_processed,
        mean_loss: if pairs_updated == 0 {
            0.0
        } else {
            loss_sum / pairs_updated as f64
        },
        wall_epochs: cfg.epochs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{StopWordSet, Vocab};
    use crate::embedding::cosine_similarity;

    fn random_model(n_words: usize, dim: usize, seed: u64) -> EmbeddingModel {
        let vocab = Vocab::from_sorted(
            (0..n_words).map(|i| (format!("w{i}"), (n_words - i) as u64)),
            1,
        );
        let cfg = TrainConfig {
            dim,
            ..TrainConfig::default()
        };
        let mut model =
            EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(seed)).unwrap();
        // randomize W' too so gradients flow through every term
        let mut rng = StdRng::seed_from_u64(seed ^ 0xDEAD);
        for i in 0..model.len() {
            for v in model.out_row_mut(i) {
                *v = rng.gen_range(-0.5..0.5);
            }
        }
        model
    }

    /// Central finite differences of the pair loss, the independent oracle
    /// for the analytic gradient inside `sgd_step`.
    fn finite_difference_grad(
        model: &EmbeddingModel,
        center: usize,
        context: usize,
        negatives: &[usize],
        which: Which,
        row: usize,
        col: usize,
    ) -> f64 {
        const EPS: f64 = 1e-5;
        let mut plus = model.clone();
        let mut minus = model.clone();
        match which {
            Which::Input => {
                plus.row_mut(row)[col] += EPS;
                minus.row_mut(row)[col] -= EPS;
            }
            Which::Output => {
                plus.out_row_mut(row)[col] += EPS;
                minus.out_row_mut(row)[col] -= EPS;
            }
        }
        let lp = pair_loss(&plus, center, context, negatives);
        let lm = pair_loss(&minus, center, context, negatives);
        (lp - lm) / (2.0 * EPS)
    }

    #[derive(Clone, Copy)]
    enum Which {
        Input,
        Output,
    }

    fn relative_error(a: f64, b: f64) -> f64 {
        let denom = a.abs().max(b.abs()).max(1e-8);
        (a - b).abs() / denom
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = StdRng::seed_from_u64(2024);
        for trial in 0..20 {
            let n = rng.gen_range(2..=10);
            let dim = rng.gen_range(1..=8);
            let model = random_model(n, dim, 1000 + trial);
            let center = rng.gen_range(0..n);
            let context = rng.gen_range(0..n);
            let k = rng.gen_range(1..=4);
            let negatives: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();

            let lr = 1e-6;
            let mut stepped = model.clone();
            stepped.step_pair(center, context, &negatives, lr).unwrap();

            // analytic gradient recovered from the update: g = (before - after) / lr
            let mut rows: Vec<(Which, usize)> =
                vec![(Which::Input, center), (Which::Output, context)];
            for &nidx in &negatives {
                rows.push((Which::Output, nidx));
            }
            for (which, row) in rows {
                for col in 0..dim {
                    let (before, after) = match which {
                        Which::Input => (model.row(row)[col], stepped.row(row)[col]),
                        Which::Output => (model.out_row(row)[col], stepped.out_row(row)[col]),
                    };
                    let analytic = (before - after) / lr;
                    let numeric = finite_difference_grad(
                        &model, center, context, &negatives, which, row, col,
                    );
                    let err = relative_error(analytic, numeric);
                    assert!(
                        err < 1e-4,
                        "trial {trial}: grad mismatch at row {row} col {col}: \
                         analytic {analytic} vs numeric {numeric} (rel err {err})"
                    );
                }
            }
        }
    }

    #[test]
    fn step_pair_loss_matches_pair_loss() {
        let model = random_model(6, 5, 9);
        let negatives = [2, 3, 3]; // duplicate on purpose
        let expected = pair_loss(&model, 0, 1, &negatives);
        let mut m = model.clone();
        let got = m.step_pair(0, 1, &negatives, 0.01).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn loss_is_non_negative() {
        let mut rng = StdRng::seed_from_u64(7);
        for trial in 0..50 {
            let model = random_model(5, 4, trial);
            let c = rng.gen_range(0..5);
            let o = rng.gen_range(0..5);
            let negs: Vec<usize> = (0..3).map(|_| rng.gen_range(0..5)).collect();
            assert!(pair_loss(&model, c, o, &negs) >= 0.0);
        }
    }

    #[test]
    fn untouched_rows_do_not_move() {
        let model = random_model(8, 4, 21);
        let mut stepped = model.clone();
        stepped.step_pair(1, 2, &[3], 0.05).unwrap();
        for i in 0..8 {
            if i != 1 {
                assert_eq!(model.row(i), stepped.row(i), "W row {i} moved");
            }
            if i != 2 && i != 3 {
                assert_eq!(model.out_row(i), stepped.out_row(i), "W' row {i} moved");
            }
        }
    }

    fn train_corpus() -> (TokenStream, Vocab) {
        let text = "a b c d a b c a b a e\n".repeat(30);
        let tokens = TokenStream::from_text(&text);
        let vocab = Vocab::build(&tokens, 1, &StopWordSet::empty());
        (tokens, vocab)
    }

    fn train_cfg(dim: usize, epochs: u32) -> TrainConfig {
        TrainConfig {
            dim,
            window: 3,
            negatives: 3,
            epochs,
            subsample_threshold: 0.0,
            seed: 42,
            threads: 1,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_epochs_is_identity() {
        let (tokens, vocab) = train_corpus();
        let cfg = train_cfg(8, 0);
        let mut model = EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(5)).unwrap();
        let snapshot = model.clone();
        let stats = model.train(&tokens, &cfg).unwrap();
        assert_eq!(stats.tokens_processed, 0);
        assert_eq!(stats.wall_epochs, 0);
        assert_eq!(model.row(0), snapshot.row(0));
        for i in 0..model.len() {
            assert_eq!(model.row(i), snapshot.row(i));
            assert_eq!(model.out_row(i), snapshot.out_row(i));
        }
    }

    #[test]
    fn tokens_processed_counts_retained_tokens() {
        let (tokens, vocab) = train_corpus();
        let cfg = train_cfg(8, 2);
        let in_vocab: u64 = tokens.tokens().filter(|t| vocab.contains(t)).count() as u64;
        let mut model = EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(5)).unwrap();
        let stats = model.train(&tokens, &cfg).unwrap();
        assert_eq!(stats.tokens_processed, 2 * in_vocab);
        assert!(stats.mean_loss > 0.0);
    }

    #[test]
    fn single_thread_training_is_deterministic() {
        let (tokens, vocab) = train_corpus();
        let cfg = train_cfg(8, 2);
        let run = || {
            let mut m =
                EmbeddingModel::init(vocab.clone(), &cfg, &mut StdRng::seed_from_u64(5)).unwrap();
            m.train(&tokens, &cfg).unwrap();
            m
        };
        let a = run();
        let b = run();
        for i in 0..a.len() {
            assert_eq!(a.row(i), b.row(i));
            assert_eq!(a.out_row(i), b.out_row(i));
        }
    }

    #[test]
    fn words_sharing_contexts_align() {
        // a and b both occur between s and t, so their input vectors chase
        // the same output rows; cosine(W[a], W[b]) should beat the untrained
        // value, measured independently of the trainer.
        let text = "s a t\ns b t\n".repeat(50);
        let tokens = TokenStream::from_text(&text);
        let vocab = Vocab::build(&tokens, 1, &StopWordSet::empty());
        let cfg = TrainConfig {
            dim: 10,
            window: 2,
            negatives: 2,
            epochs: 3,
            subsample_threshold: 0.0,
            seed: 3,
            threads: 1,
            ..TrainConfig::default()
        };
        let mut model = EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(11)).unwrap();
        let a = model.vocab().index_of("a").unwrap();
        let b = model.vocab().index_of("b").unwrap();
        let before = cosine_similarity(model.row(a), model.row(b));
        model.train(&tokens, &cfg).unwrap();
        let after = cosine_similarity(model.row(a), model.row(b));
        assert!(
            after > before,
            "cosine did not improve: before {before}, after {after}"
        );
    }

    #[test]
    fn frozen_rows_stay_fixed() {
        let (tokens, vocab) = train_corpus();
        let cfg = train_cfg(6, 1);
        let mut model = EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(5)).unwrap();
        let a = model.vocab().index_of("a").unwrap();
        let pinned = model.row(a).to_vec();
        let mut frozen = vec![false; model.len()];
        frozen[a] = true;
        model
            .train_with_options(
                &tokens,
                &cfg,
                &TrainOptions {
                    frozen_rows: Some(frozen),
                },
            )
            .unwrap();
        assert_eq!(model.row(a), pinned.as_slice());
        // everything else trained
        let b = model.vocab().index_of("b").unwrap();
        assert!(model.out_row(b).iter().any(|&v| v != 0.0));
    }

    #[test]
    fn parallel_training_produces_finite_vectors() {
        let (tokens, vocab) = train_corpus();
        let mut cfg = train_cfg(8, 2);
        cfg.threads = 2;
        let mut model = EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(5)).unwrap();
        let stats = model.train(&tokens, &cfg).unwrap();
        assert!(stats.tokens_processed > 0);
        for i in 0..model.len() {
            assert!(model.row(i).iter().all(|v| v.is_finite()));
            assert!(model.out_row(i).iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn pair_count_prepass_is_replayable() {
        let (tokens, vocab) = train_corpus();
        let mut cfg = train_cfg(4, 3);
        cfg.subsample_threshold = 0.05;
        let docs: Vec<Vec<u32>> = tokens
            .docs()
            .iter()
            .map(|d| {
                d.iter()
                    .filter_map(|t| vocab.index_of(t))
                    .map(|i| i as u32)
                    .collect()
            })
            .collect();
        let discard: Vec<f64> = (0..vocab.len())
            .map(|i| vocab.discard_probability(i, cfg.subsample_threshold))
            .collect();
        let a = count_worker_pairs(&docs, &discard, &cfg, 0);
        let b = count_worker_pairs(&docs, &discard, &cfg, 0);
        assert_eq!(a, b);
        assert!(a > 0);
    }

    #[test]
    fn vocab_mismatch_is_rejected() {
        let (tokens, vocab) = train_corpus();
        let cfg = train_cfg(4, 1);
        let mut model = EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(5)).unwrap();
        let bad = TrainConfig { dim: 9, ..cfg };
        assert!(matches!(
            model.train(&tokens, &bad),
            Err(EmbeddingError::DimensionMismatch { .. })
        ));
    }
}
