//! Flat key=value configuration with flag > config > default precedence.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use sentivec::embedding::TrainConfig;
use sentivec::sentiment::{Metric, SeedConfig};

/// Output format for flip reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Tsv,
    Jsonl,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            other => Err(format!("unknown format {other:?} (expected tsv or jsonl)")),
        }
    }
}

/// Token weighting for document vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WeightingArg {
    Uniform,
    Frequency,
}

impl From<WeightingArg> for sentivec::classify::Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Uniform => sentivec::classify::Weighting::Uniform,
            WeightingArg::Frequency => sentivec::classify::Weighting::Frequency,
        }
    }
}

impl FromStr for WeightingArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(WeightingArg::Uniform),
            "frequency" => Ok(WeightingArg::Frequency),
            other => Err(format!(
                "unknown weighting {other:?} (expected uniform or frequency)"
            )),
        }
    }
}

/// Every tunable, resolved to a concrete value. Input paths have no default
/// and live separately in [`Settings::paths`].
#[derive(Debug, Clone)]
pub struct Settings {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub initial_lr: f64,
    pub final_lr: f64,
    pub epochs: u32,
    pub subsample: f64,
    pub seed: u64,
    pub threads: usize,
    pub min_count: u64,
    pub magnitude: f64,
    pub scale_by_dim: bool,
    pub retrain_epochs: u32,
    pub freeze_seeds: bool,
    pub metric: Metric,
    pub c: f64,
    pub gamma: f64,
    pub tol: f64,
    pub split_fraction: f64,
    pub format: ReportFormat,
    pub weighting: WeightingArg,
    pub min_margin: Option<f64>,
    /// Path-valued keys supplied by the config file (`corpus`, `vectors`,
    /// ...). Values for `vectors` and `lexicon` may list several paths
    /// separated by spaces.
    pub paths: BTreeMap<String, String>,
    /// Keys explicitly set (by the config file or a flag), as opposed to
    /// sitting at their defaults.
    pub explicit: std::collections::BTreeSet<String>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            dim: 100,
            window: 5,
            negatives: 5,
            initial_lr: 0.025,
            final_lr: 1e-4,
            epochs: 5,
            subsample: 1e-3,
            seed: 1,
            threads: 1,
            min_count: 5,
            magnitude: 1.0,
            scale_by_dim: false,
            retrain_epochs: 1,
            freeze_seeds: false,
            metric: Metric::Cosine,
            c: 1.0,
            gamma: 0.7,
            tol: 1e-3,
            split_fraction: 0.8,
            format: ReportFormat::Tsv,
            weighting: WeightingArg::Uniform,
            min_margin: None,
            paths: BTreeMap::new(),
            explicit: std::collections::BTreeSet::new(),
        }
    }
}

const PATH_KEYS: &[&str] = &[
    "corpus",
    "stopwords",
    "vocab",
    "vectors",
    "pretrained",
    "lexicon",
    "words",
    "docs",
    "output",
    "model_out",
];

impl Settings {
    /// Overlay a config file onto the defaults. Unknown keys are rejected
    /// and every value is type-checked here.
    pub fn load(config_path: Option<&Path>) -> Result<Settings> {
        let mut settings = Settings::default();
        let Some(path) = config_path else {
            return Ok(settings);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow!("cli: cannot read config {}: {e}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!(
                    "cli: {}:{}: expected `key = value`, got {raw:?}",
                    path.display(),
                    lineno + 1
                )
            })?;
            let key = key.trim();
            let value = value.trim();
            settings
                .set(key, value)
                .map_err(|e| anyhow!("cli: {}:{}: {e}", path.display(), lineno + 1))?;
        }
        Ok(settings)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: Display,
        {
            value
                .parse()
                .map_err(|e| anyhow!("key {key:?}: cannot parse {value:?}: {e}"))
        }
        self.explicit.insert(key.to_owned());
        match key {
            "dim" => self.dim = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "negatives" => self.negatives = parse(key, value)?,
            "initial_lr" => self.initial_lr = parse(key, value)?,
            "final_lr" => self.final_lr = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "subsample" => self.subsample = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "min_count" => self.min_count = parse(key, value)?,
            "magnitude" => self.magnitude = parse(key, value)?,
            "scale_by_dim" => self.scale_by_dim = parse(key, value)?,
            "retrain_epochs" => self.retrain_epochs = parse(key, value)?,
            "freeze_seeds" => self.freeze_seeds = parse(key, value)?,
            "metric" => self.metric = parse(key, value)?,
            "c" => self.c = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "split_fraction" => self.split_fraction = parse(key, value)?,
            "format" => self.format = parse(key, value)?,
            "weighting" => self.weighting = parse(key, value)?,
            "min_margin" => self.min_margin = Some(parse(key, value)?),
            _ if PATH_KEYS.contains(&key) => {
                self.paths.insert(key.to_owned(), value.to_owned());
            }
            _ => bail!("unknown config key {key:?}"),
        }
        Ok(())
    }

    /// The training hyperparameters as a core config.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            initial_lr: self.initial_lr,
            final_lr: self.final_lr,
            epochs: self.epochs,
            subsample_threshold: self.subsample,
            seed: self.seed,
            threads: self.threads,
        }
    }

    pub fn seed_config(&self) -> SeedConfig {
        SeedConfig {
            magnitude: self.magnitude,
            scale_by_dim: self.scale_by_dim,
            retrain_epochs: self.retrain_epochs,
            freeze_seeds: self.freeze_seeds,
        }
    }

    /// Resolve a single required path: flag first, then config, else error.
    pub fn require_path(&self, flag: Option<&PathBuf>, key: &str) -> Result<PathBuf> {
        if let Some(p) = flag {
            return Ok(p.clone());
        }
        if let Some(v) = self.paths.get(key) {
            return Ok(PathBuf::from(v));
        }
        bail!("cli: missing required path {key:?} (flag or config)")
    }

    /// Resolve an optional path the same way.
    pub fn optional_path(&self, flag: Option<&PathBuf>, key: &str) -> Option<PathBuf> {
        flag.cloned()
            .or_else(|| self.paths.get(key).map(PathBuf::from))
    }

    /// Resolve a multi-valued path list (flags win wholesale over config).
    pub fn require_paths(&self, flags: &[PathBuf], key: &str) -> Result<Vec<PathBuf>> {
        if !flags.is_empty() {
            return Ok(flags.to_vec());
        }
        if let Some(v) = self.paths.get(key) {
            let list: Vec<PathBuf> = v.split_whitespace().map(PathBuf::from).collect();
            if !list.is_empty() {
                return Ok(list);
            }
        }
        bail!("cli: missing required path(s) {key:?} (flag or config)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(text: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(&path, text).unwrap();
        (dir, path)
    }

    #[test]
    fn defaults_apply_without_config() {
        let s = Settings::load(None).unwrap();
        assert_eq!(s.dim, 100);
        assert_eq!(s.gamma, 0.7);
        assert_eq!(s.split_fraction, 0.8);
    }

    #[test]
    fn config_overrides_defaults() {
        let (_dir, path) = write_config("dim = 12\nseed = 9\nmetric = euclidean\n# note\n");
        let s = Settings::load(Some(&path)).unwrap();
        assert_eq!(s.dim, 12);
        assert_eq!(s.seed, 9);
        assert_eq!(s.metric, Metric::Euclidean);
        assert_eq!(s.window, 5); // untouched default
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let (_dir, path) = write_config("dimensions = 12\n");
        let err = Settings::load(Some(&path)).unwrap_err();
        assert!(format!("{err:#}").contains("unknown config key"));
    }

    #[test]
    fn values_are_type_checked() {
        let (_dir, path) = write_config("dim = banana\n");
        let err = Settings::load(Some(&path)).unwrap_err();
        assert!(format!("{err:#}").contains("cannot parse"));
    }

    #[test]
    fn path_keys_resolve_with_flag_precedence() {
        let (_dir, path) = write_config("corpus = from_config.txt\nvectors = a.txt b.txt\n");
        let s = Settings::load(Some(&path)).unwrap();
        assert_eq!(
            s.require_path(None, "corpus").unwrap(),
            PathBuf::from("from_config.txt")
        );
        let flag = PathBuf::from("from_flag.txt");
        assert_eq!(s.require_path(Some(&flag), "corpus").unwrap(), flag);
        assert_eq!(
            s.require_paths(&[], "vectors").unwrap(),
            vec![PathBuf::from("a.txt"), PathBuf::from("b.txt")]
        );
        assert!(s.require_path(None, "docs").is_err());
    }
}
