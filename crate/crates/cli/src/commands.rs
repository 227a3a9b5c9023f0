//! Subcommand argument definitions and implementations.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::Args;
use rand::rngs::StdRng;
use rand::SeedableRng;

use sentivec::classify::{doc_vector, evaluate, load_labeled_docs, train_svm, LabeledSet};
use sentivec::corpus::{StopWordSet, TokenStream, Vocab};
use sentivec::diffing::{
    compare_models, compare_models_with_margin, project_2d, write_projection_tsv,
};
use sentivec::embedding::{continue_training, EmbeddingModel};
use sentivec::sentiment::{
    inject_seeds, merge_lexicons, seeded_retrain, write_polarity_report, PolarityScorer,
    SentimentLexicon,
};

use crate::config::{ReportFormat, Settings};
use crate::util::{model_names, read_word_list, save_atomic, write_atomic};

pub struct Ctx {
    pub settings: Settings,
    pub quiet: bool,
}

impl Ctx {
    fn info(&self, msg: std::fmt::Arguments) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

macro_rules! info {
    ($ctx:expr, $($arg:tt)*) => { $ctx.info(format_args!($($arg)*)) };
}

/// Overlay per-command flags onto the settings; flags beat config values.
macro_rules! overlay {
    ($settings:expr, $($field:ident <- $value:expr),+ $(,)?) => {
        $(
            if let Some(v) = $value {
                $settings.$field = v;
                $settings.explicit.insert(stringify!($field).to_owned());
            }
        )+
    };
}

#[derive(Args, Debug)]
pub struct TrainFlags {
    /// Vector dimensionality
    #[arg(long)]
    pub dim: Option<usize>,
    /// Maximum context window offset
    #[arg(long)]
    pub window: Option<usize>,
    /// Negative samples per pair
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Starting learning rate
    #[arg(long)]
    pub initial_lr: Option<f64>,
    /// Learning rate floor reached at the end of the schedule
    #[arg(long)]
    pub final_lr: Option<f64>,
    /// Training epochs
    #[arg(long)]
    pub epochs: Option<u32>,
    /// Frequent-word subsampling threshold (0 disables)
    #[arg(long)]
    pub subsample: Option<f64>,
}

impl TrainFlags {
    fn apply(&self, settings: &mut Settings) {
        overlay!(settings,
            dim <- self.dim,
            window <- self.window,
            negatives <- self.negatives,
            initial_lr <- self.initial_lr,
            final_lr <- self.final_lr,
            epochs <- self.epochs,
            subsample <- self.subsample,
        );
    }
}

// --- vocab ---

#[derive(Args, Debug)]
pub struct VocabArgs {
    /// Corpus file: one document per line, space-separated tokens
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Stop-word file: one word per line, `#` comments
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Keep words occurring at least this often
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Output vocab file
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn cmd_vocab(ctx: &mut Ctx, args: &VocabArgs) -> Result<()> {
    overlay!(ctx.settings, min_count <- args.min_count);
    if ctx.settings.min_count == 0 {
        bail!("cli: min_count must be >= 1");
    }
    let corpus_path = ctx.settings.require_path(args.corpus.as_ref(), "corpus")?;
    let output = ctx.settings.require_path(args.output.as_ref(), "output")?;
    let stopwords = match ctx
        .settings
        .optional_path(args.stopwords.as_ref(), "stopwords")
    {
        Some(p) => StopWordSet::from_path(&p).map_err(sentivec::Error::from)?,
        None => StopWordSet::empty(),
    };

    let tokens = TokenStream::from_path(&corpus_path).map_err(sentivec::Error::from)?;
    info!(
        ctx,
        "vocab: corpus {} docs, {} tokens",
        tokens.doc_count(),
        tokens.token_count()
    );
    let vocab = Vocab::build(&tokens, ctx.settings.min_count, &stopwords);
    info!(
        ctx,
        "vocab: kept {} words at min_count {}",
        vocab.len(),
        ctx.settings.min_count
    );

    let mut bytes = Vec::new();
    vocab
        .write(&mut bytes)
        .map_err(|e| anyhow!("cli: serializing vocab failed: {e}"))?;
    write_atomic(&output, &bytes)?;
    info!(ctx, "wrote {}", output.display());
    Ok(())
}

// --- train ---

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training corpus
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Vocab file produced by `vocab`
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Pretrained vectors to continue from (domain adaptation)
    #[arg(long)]
    pub pretrained: Option<PathBuf>,
    /// Output vectors file (the `.out` sidecar is written alongside)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub train: TrainFlags,
}

pub fn cmd_train(ctx: &mut Ctx, args: &TrainArgs) -> Result<()> {
    args.train.apply(&mut ctx.settings);
    let corpus_path = ctx.settings.require_path(args.corpus.as_ref(), "corpus")?;
    let vocab_path = ctx.settings.require_path(args.vocab.as_ref(), "vocab")?;
    let output = ctx.settings.require_path(args.output.as_ref(), "output")?;
    let pretrained_path = ctx
        .settings
        .optional_path(args.pretrained.as_ref(), "pretrained");

    let tokens = TokenStream::from_path(&corpus_path).map_err(sentivec::Error::from)?;
    let vocab = Vocab::from_path(&vocab_path).map_err(sentivec::Error::from)?;

    let (model, stats) = match &pretrained_path {
        Some(pre_path) => {
            let pretrained =
                EmbeddingModel::load_vectors(pre_path).map_err(sentivec::Error::from)?;
            if !ctx.settings.explicit.contains("dim") {
                ctx.settings.dim = pretrained.dim();
            }
            let cfg = ctx.settings.train_config();
            info!(
                ctx,
                "train: continuing from {} ({} words, dim {})",
                pre_path.display(),
                pretrained.len(),
                pretrained.dim()
            );
            continue_training(&pretrained, vocab, &tokens, &cfg).map_err(sentivec::Error::from)?
        }
        None => {
            let cfg = ctx.settings.train_config();
            let mut rng = StdRng::seed_from_u64(cfg.seed);
            let mut model =
                EmbeddingModel::init(vocab, &cfg, &mut rng).map_err(sentivec::Error::from)?;
            let stats = model.train(&tokens, &cfg).map_err(sentivec::Error::from)?;
            (model, stats)
        }
    };
    info!(
        ctx,
        "train: {} epochs, {} tokens, mean loss {:.4}",
        stats.wall_epochs,
        stats.tokens_processed,
        stats.mean_loss
    );

    save_model(&model, &output)?;
    info!(ctx, "wrote {} (+ .out sidecar)", output.display());
    Ok(())
}

fn save_model(model: &EmbeddingModel, output: &std::path::Path) -> Result<()> {
    save_atomic(output, |tmp| {
        model.save_vectors(tmp).map_err(sentivec::Error::from)?;
        Ok(())
    })?;
    let sidecar = sentivec::embedding::sidecar_path(output);
    save_atomic(&sidecar, |tmp| {
        model
            .save_output_matrix(tmp)
            .map_err(sentivec::Error::from)?;
        Ok(())
    })?;
    Ok(())
}

// --- seed-retrain ---

#[derive(Args, Debug)]
pub struct SeedRetrainArgs {
    /// Vectors to seed (sidecar `.out` is picked up when present)
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Domain corpus for the controlled retraining pass
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Polarity lexicon TSV; repeat to merge several
    #[arg(long)]
    pub lexicon: Vec<PathBuf>,
    /// Output vectors file
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Seed component magnitude
    #[arg(long)]
    pub magnitude: Option<f64>,
    /// Scale seed components by 1/sqrt(dim)
    #[arg(long)]
    pub scale_by_dim: bool,
    /// Retraining epochs after injection
    #[arg(long)]
    pub retrain_epochs: Option<u32>,
    /// Pin seed rows during retraining
    #[arg(long)]
    pub freeze_seeds: bool,
    #[command(flatten)]
    pub train: TrainFlags,
}

pub fn cmd_seed_retrain(ctx: &mut Ctx, args: &SeedRetrainArgs) -> Result<()> {
    args.train.apply(&mut ctx.settings);
    overlay!(ctx.settings,
        magnitude <- args.magnitude,
        retrain_epochs <- args.retrain_epochs,
    );
    if args.scale_by_dim {
        ctx.settings.scale_by_dim = true;
    }
    if args.freeze_seeds {
        ctx.settings.freeze_seeds = true;
    }
    let vectors_path = ctx
        .settings
        .require_path(args.vectors.as_ref(), "vectors")?;
    let corpus_path = ctx.settings.require_path(args.corpus.as_ref(), "corpus")?;
    let output = ctx.settings.require_path(args.output.as_ref(), "output")?;
    let lexicon = load_merged_lexicons(ctx, &args.lexicon)?;

    let mut model = EmbeddingModel::load_vectors(&vectors_path).map_err(sentivec::Error::from)?;
    if !ctx.settings.explicit.contains("dim") {
        ctx.settings.dim = model.dim();
    }
    let tokens = TokenStream::from_path(&corpus_path).map_err(sentivec::Error::from)?;
    // vector files carry no frequencies; rebuild counts from this corpus
    model.recount_vocab(&tokens);

    let seed_cfg = ctx.settings.seed_config();
    let counts = inject_seeds(&mut model, &lexicon, &seed_cfg).map_err(sentivec::Error::from)?;
    info!(
        ctx,
        "seed-retrain: injected {} positive, {} negative seeds ({} lexicon words out of vocab)",
        counts.positives,
        counts.negatives,
        counts.skipped_oov
    );

    let cfg = ctx.settings.train_config();
    let stats = seeded_retrain(&mut model, &tokens, &cfg, &seed_cfg)?;
    info!(
        ctx,
        "seed-retrain: {} epochs, {} tokens, mean loss {:.4}",
        stats.wall_epochs,
        stats.tokens_processed,
        stats.mean_loss
    );

    save_model(&model, &output)?;
    info!(ctx, "wrote {} (+ .out sidecar)", output.display());
    Ok(())
}

fn load_merged_lexicons(ctx: &Ctx, flags: &[PathBuf]) -> Result<SentimentLexicon> {
    let paths = ctx.settings.require_paths(flags, "lexicon")?;
    let mut merged: Option<SentimentLexicon> = None;
    for path in &paths {
        let load = SentimentLexicon::load(path).map_err(sentivec::Error::from)?;
        if load.conflicts > 0 {
            info!(
                ctx,
                "lexicon: {} dropped {} conflicting word(s)",
                path.display(),
                load.conflicts
            );
        }
        merged = Some(match merged {
            None => load.lexicon,
            Some(prev) => merge_lexicons(&prev, &load.lexicon),
        });
    }
    let lexicon = merged.expect("require_paths returned at least one path");
    info!(ctx, "lexicon: {} entries after merge", lexicon.len());
    Ok(lexicon)
}

// --- polarity ---

#[derive(Args, Debug)]
pub struct PolarityArgs {
    /// Vectors file to score against
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Polarity lexicon TSV; repeat to merge several
    #[arg(long)]
    pub lexicon: Vec<PathBuf>,
    /// Word list to score (one word per line)
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// Distance metric (cosine or euclidean)
    #[arg(long)]
    pub metric: Option<sentivec::sentiment::Metric>,
    /// Output TSV report
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn cmd_polarity(ctx: &mut Ctx, args: &PolarityArgs) -> Result<()> {
    overlay!(ctx.settings, metric <- args.metric);
    let vectors_path = ctx
        .settings
        .require_path(args.vectors.as_ref(), "vectors")?;
    let words_path = ctx.settings.require_path(args.words.as_ref(), "words")?;
    let output = ctx.settings.require_path(args.output.as_ref(), "output")?;
    let lexicon = load_merged_lexicons(ctx, &args.lexicon)?;

    let model = EmbeddingModel::load_vectors(&vectors_path).map_err(sentivec::Error::from)?;
    let words = read_word_list(&words_path)?;
    let scorer = PolarityScorer::from_model(&model, &lexicon, ctx.settings.metric)
        .map_err(sentivec::Error::from)?;

    let mut bytes = Vec::new();
    write_polarity_report(&scorer, &model, &words, &mut bytes)?;
    write_atomic(&output, &bytes)?;
    info!(ctx, "wrote {} ({} words)", output.display(), words.len());
    Ok(())
}

// --- diff ---

#[derive(Args, Debug)]
pub struct DiffArgs {
    /// Vectors files to compare; repeat two or more times
    #[arg(long)]
    pub vectors: Vec<PathBuf>,
    /// Polarity lexicon TSV; repeat to merge several
    #[arg(long)]
    pub lexicon: Vec<PathBuf>,
    /// Word list to compare (one word per line)
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// Distance metric (cosine or euclidean)
    #[arg(long)]
    pub metric: Option<sentivec::sentiment::Metric>,
    /// Report format (tsv or jsonl)
    #[arg(long)]
    pub format: Option<ReportFormat>,
    /// Treat labels whose distance margin is below this as uncomparable
    #[arg(long)]
    pub min_margin: Option<f64>,
    /// Output report file
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn cmd_diff(ctx: &mut Ctx, args: &DiffArgs) -> Result<()> {
    overlay!(ctx.settings, metric <- args.metric, format <- args.format);
    if args.min_margin.is_some() {
        ctx.settings.min_margin = args.min_margin;
    }
    let vector_paths = ctx.settings.require_paths(&args.vectors, "vectors")?;
    if vector_paths.len() < 2 {
        bail!("cli: diff needs at least two --vectors files");
    }
    let words_path = ctx.settings.require_path(args.words.as_ref(), "words")?;
    let output = ctx.settings.require_path(args.output.as_ref(), "output")?;
    let lexicon = load_merged_lexicons(ctx, &args.lexicon)?;
    let words = read_word_list(&words_path)?;

    let names = model_names(&vector_paths);
    let mut loaded = Vec::new();
    for path in &vector_paths {
        let model = EmbeddingModel::load_vectors(path).map_err(sentivec::Error::from)?;
        let scorer = PolarityScorer::from_model(&model, &lexicon, ctx.settings.metric)
            .map_err(sentivec::Error::from)?;
        loaded.push((model, scorer));
    }
    let entries: Vec<(&str, &EmbeddingModel, &PolarityScorer)> = names
        .iter()
        .zip(&loaded)
        .map(|(name, (model, scorer))| (name.as_str(), model, scorer))
        .collect();

    let report = match ctx.settings.min_margin {
        Some(margin) => compare_models_with_margin(&entries, &words, margin)?,
        None => compare_models(&entries, &words)?,
    };
    info!(
        ctx,
        "diff: {} words, {} flips",
        report.rows().len(),
        report.flip_count()
    );

    let mut bytes = Vec::new();
    match ctx.settings.format {
        ReportFormat::Tsv => report
            .write_tsv(&mut bytes)
            .map_err(sentivec::Error::from)?,
        ReportFormat::Jsonl => report
            .write_jsonl(&mut bytes)
            .map_err(sentivec::Error::from)?,
    }
    write_atomic(&output, &bytes)?;
    info!(ctx, "wrote {}", output.display());
    Ok(())
}

// --- project ---

#[derive(Args, Debug)]
pub struct ProjectArgs {
    /// Vectors files to project; repeat for several models
    #[arg(long)]
    pub vectors: Vec<PathBuf>,
    /// Word list to project (one word per line)
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// Output TSV (`model word x y`)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn cmd_project(ctx: &mut Ctx, args: &ProjectArgs) -> Result<()> {
    let vector_paths = ctx.settings.require_paths(&args.vectors, "vectors")?;
    let words_path = ctx.settings.require_path(args.words.as_ref(), "words")?;
    let output = ctx.settings.require_path(args.output.as_ref(), "output")?;
    let words = read_word_list(&words_path)?;

    let names = model_names(&vector_paths);
    let mut projections = Vec::new();
    for (name, path) in names.iter().zip(&vector_paths) {
        let model = EmbeddingModel::load_vectors(path).map_err(sentivec::Error::from)?;
        let projection = project_2d(&model, &words).map_err(sentivec::Error::from)?;
        projections.push((name.clone(), projection));
    }

    let mut bytes = Vec::new();
    write_projection_tsv(&projections, &mut bytes).map_err(sentivec::Error::from)?;
    write_atomic(&output, &bytes)?;
    info!(
        ctx,
        "wrote {} ({} models x {} words)",
        output.display(),
        projections.len(),
        words.len()
    );
    Ok(())
}

// --- classify ---

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Vectors used to build document features
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Labeled documents TSV: `+1|-1<TAB>tokens`
    #[arg(long)]
    pub docs: Option<PathBuf>,
    /// Fraction of documents used for training
    #[arg(long)]
    pub split_fraction: Option<f64>,
    /// Soft-margin parameter C
    #[arg(long)]
    pub c: Option<f64>,
    /// RBF kernel gamma
    #[arg(long)]
    pub gamma: Option<f64>,
    /// SMO convergence tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Token weighting (uniform or frequency)
    #[arg(long)]
    pub weighting: Option<crate::config::WeightingArg>,
    /// Also dump the trained SVM model here
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Output metrics JSON
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(serde::Serialize)]
struct ClassifyMetrics {
    documents: usize,
    train_size: usize,
    test_size: usize,
    train_accuracy: f64,
    test_accuracy: f64,
    support_vectors: usize,
    gamma: f64,
    c: f64,
    split_fraction: f64,
    seed: u64,
    mean_oov_fraction: f64,
}

pub fn cmd_classify(ctx: &mut Ctx, args: &ClassifyArgs) -> Result<()> {
    overlay!(ctx.settings,
        split_fraction <- args.split_fraction,
        c <- args.c,
        gamma <- args.gamma,
        tol <- args.tol,
        weighting <- args.weighting,
    );
    let vectors_path = ctx
        .settings
        .require_path(args.vectors.as_ref(), "vectors")?;
    let docs_path = ctx.settings.require_path(args.docs.as_ref(), "docs")?;
    let output = ctx.settings.require_path(args.output.as_ref(), "output")?;
    let model_out = ctx
        .settings
        .optional_path(args.model_out.as_ref(), "model_out");

    let model = EmbeddingModel::load_vectors(&vectors_path).map_err(sentivec::Error::from)?;
    let docs = load_labeled_docs(&docs_path).map_err(sentivec::Error::from)?;
    let mut items = Vec::with_capacity(docs.len());
    let mut oov_sum = 0.0;
    for (label, tokens) in &docs {
        let feature = doc_vector(&model, tokens, ctx.settings.weighting.into())
            .map_err(sentivec::Error::from)?;
        oov_sum += feature.oov_fraction;
        items.push((feature, *label));
    }
    let mean_oov = if items.is_empty() {
        0.0
    } else {
        oov_sum / items.len() as f64
    };
    let data = LabeledSet::new(items);

    let mut rng = StdRng::seed_from_u64(ctx.settings.seed);
    let (train, test) = sentivec::classify::split(&data, ctx.settings.split_fraction, &mut rng)
        .map_err(sentivec::Error::from)?;
    info!(
        ctx,
        "classify: {} train / {} test documents",
        train.len(),
        test.len()
    );

    let svm = train_svm(&train, ctx.settings.c, ctx.settings.gamma, ctx.settings.tol)
        .map_err(sentivec::Error::from)?;
    let train_accuracy = evaluate(&svm, &train).map_err(sentivec::Error::from)?;
    let test_accuracy = evaluate(&svm, &test).map_err(sentivec::Error::from)?;
    info!(
        ctx,
        "classify: train accuracy {:.4}, test accuracy {:.4} ({} support vectors)",
        train_accuracy,
        test_accuracy,
        svm.support_vector_count()
    );

    let metrics = ClassifyMetrics {
        documents: data.len(),
        train_size: train.len(),
        test_size: test.len(),
        train_accuracy,
        test_accuracy,
        support_vectors: svm.support_vector_count(),
        gamma: ctx.settings.gamma,
        c: ctx.settings.c,
        split_fraction: ctx.settings.split_fraction,
        seed: ctx.settings.seed,
        mean_oov_fraction: mean_oov,
    };
    let mut bytes = serde_json::to_vec_pretty(&metrics)
        .map_err(|e| anyhow!("cli: serializing metrics: {e}"))?;
    bytes.push(b'\n');
    write_atomic(&output, &bytes)?;
    info!(ctx, "wrote {}", output.display());

    if let Some(model_path) = model_out {
        save_atomic(&model_path, |tmp| {
            svm.save(tmp).map_err(sentivec::Error::from)?;
            Ok(())
        })?;
        info!(ctx, "wrote {}", model_path.display());
    }
    Ok(())
}
