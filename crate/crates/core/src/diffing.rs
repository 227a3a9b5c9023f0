//! Cross-model polarity comparison and 2-D projection.
//!
//! Words picking up a different sentiment in a different context show up as
//! label flips between models trained on the respective corpora. Projection
//! to two principal components supports side-by-side plots of the same word
//! list under several models.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingModel;
use crate::error::DiffError;
use crate::sentiment::{PolarityLabel, PolarityScorer};

/// Agreement status of one word across models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipStatus {
    /// All labels known and equal.
    Agree,
    /// All labels known, at least two differ.
    Flip,
    /// At least one model does not know the word (or, with a margin filter,
    /// scores it too close to call).
    Uncomparable,
}

impl std::fmt::Display for FlipStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlipStatus::Agree => write!(f, "agree"),
            FlipStatus::Flip => write!(f, "flip"),
            FlipStatus::Uncomparable => write!(f, "uncomparable"),
        }
    }
}

/// One word's labels across all compared models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipRow {
    pub word: String,
    pub labels: Vec<PolarityLabel>,
    pub status: FlipStatus,
}

/// Per-word polarity labels across two or more models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipReport {
    model_names: Vec<String>,
    rows: Vec<FlipRow>,
}

/// A named model/scorer pair entering a comparison.
pub type ScoredModel<'a> = (&'a str, &'a EmbeddingModel, &'a PolarityScorer);

fn status_of(labels: &[PolarityLabel], comparable: bool) -> FlipStatus {
    if !comparable || labels.contains(&PolarityLabel::Unknown) {
        FlipStatus::Uncomparable
    } else if labels.windows(2).all(|w| w[0] == w[1]) {
        FlipStatus::Agree
    } else {
        FlipStatus::Flip
    }
}

/// Label every requested word under each model's own scorer and classify the
/// rows as agree/flip/uncomparable. Rows come back word-sorted.
pub fn compare_models(
    models: &[ScoredModel<'_>],
    words: &[String],
) -> Result<FlipReport, crate::Error> {
    compare(models, words, None)
}

/// [`compare_models`] with a minimum-margin filter: a word whose two
/// centroid distances differ by less than `min_margin` in any model is
/// reported uncomparable instead of contributing a near-tie flip.
pub fn compare_models_with_margin(
    models: &[ScoredModel<'_>],
    words: &[String],
    min_margin: f64,
) -> Result<FlipReport, crate::Error> {
    compare(models, words, Some(min_margin))
}

fn compare(
    models: &[ScoredModel<'_>],
    words: &[String],
    min_margin: Option<f64>,
) -> Result<FlipReport, crate::Error> {
    if models.len() < 2 {
        return Err(DiffError::TooFewModels(models.len()).into());
    }
    let mut seen = HashSet::new();
    for (name, _, _) in models {
        if !seen.insert(*name) {
            return Err(DiffError::DuplicateModelName((*name).to_owned()).into());
        }
    }

    let mut sorted_words: Vec<&String> = words.iter().collect();
    sorted_words.sort();
    sorted_words.dedup();

    let mut rows = Vec::with_capacity(sorted_words.len());
    for word in sorted_words {
        let mut labels = Vec::with_capacity(models.len());
        let mut comparable = true;
        for (_, model, scorer) in models {
            labels.push(scorer.polarity(model, word)?);
            if let (Some(margin), Some(v)) = (min_margin, model.vector(word)) {
                let (d_pos, d_neg) = scorer.distances(v);
                if (d_pos - d_neg).abs() < margin {
                    comparable = false;
                }
            }
        }
        let status = status_of(&labels, comparable);
        rows.push(FlipRow {
            word: word.clone(),
            labels,
            status,
        });
    }
    Ok(FlipReport {
        model_names: models.iter().map(|(n, _, _)| (*n).to_owned()).collect(),
        rows,
    })
}

impl FlipReport {
    pub fn model_names(&self) -> &[String] {
        &self.model_names
    }

    pub fn rows(&self) -> &[FlipRow] {
        &self.rows
    }

    pub fn row(&self, word: &str) -> Option<&FlipRow> {
        self.rows.iter().find(|r| r.word == word)
    }

    pub fn flip_count(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == FlipStatus::Flip)
            .count()
    }

    /// TSV: header `word<TAB>label_<name>...<TAB>status`, one row per word.
    pub fn write_tsv(&self, mut w: impl Write) -> Result<(), DiffError> {
        write!(w, "word")?;
        for name in &self.model_names {
            write!(w, "\tlabel_{name}")?;
        }
        writeln!(w, "\tstatus")?;
        for row in &self.rows {
            write!(w, "{}", row.word)?;
            for label in &row.labels {
                write!(w, "\t{label}")?;
            }
            writeln!(w, "\t{}", row.status)?;
        }
        Ok(())
    }

    /// JSON lines, one object per word.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<(), DiffError> {
        for row in &self.rows {
            let labels: Vec<JsonLabel> = self
                .model_names
                .iter()
                .zip(&row.labels)
                .map(|(model, label)| JsonLabel {
                    model: model.clone(),
                    label: label.to_string(),
                })
                .collect();
            let line = serde_json::to_string(&JsonRow {
                word: row.word.clone(),
                labels,
                status: row.status,
            })
            .expect("report row serializes");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Parse a TSV produced by [`FlipReport::write_tsv`].
    pub fn parse_tsv(path: impl AsRef<Path>, text: &str) -> Result<FlipReport, DiffError> {
        let path = path.as_ref();
        let malformed = |line: usize, msg: String| DiffError::MalformedReport {
            path: path.to_owned(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| malformed(1, "empty report".into()))?;
        let mut cols = header.split('\t');
        if cols.next() != Some("word") {
            return Err(malformed(1, format!("bad header {header:?}")));
        }
        let cols: Vec<&str> = cols.collect();
        let (label_cols, tail) = cols.split_at(cols.len().saturating_sub(1));
        if tail != ["status"] {
            return Err(malformed(
                1,
                format!("header must end in status: {header:?}"),
            ));
        }
        let model_names: Vec<String> = label_cols
            .iter()
            .map(|c| {
                c.strip_prefix("label_")
                    .map(str::to_owned)
                    .ok_or_else(|| malformed(1, format!("bad label column {c:?}")))
            })
            .collect::<Result<_, _>>()?;

        let mut rows = Vec::new();
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != model_names.len() + 2 {
                return Err(malformed(
                    lineno + 1,
                    format!(
                        "expected {} fields, got {}",
                        model_names.len() + 2,
                        fields.len()
                    ),
                ));
            }
            let word = fields[0].to_owned();
            let labels: Vec<PolarityLabel> = fields[1..fields.len() - 1]
                .iter()
                .map(|f| f.parse().map_err(|e| malformed(lineno + 1, e)))
                .collect::<Result<_, _>>()?;
            let status = match *fields.last().expect("nonempty") {
                "agree" => FlipStatus::Agree,
                "flip" => FlipStatus::Flip,
                "uncomparable" => FlipStatus::Uncomparable,
                other => return Err(malformed(lineno + 1, format!("bad status {other:?}"))),
            };
            rows.push(FlipRow {
                word,
                labels,
                status,
            });
        }
        Ok(FlipReport { model_names, rows })
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    word: String,
    labels: Vec<JsonLabel>,
    status: FlipStatus,
}

#[derive(Serialize, Deserialize)]
struct JsonLabel {
    model: String,
    label: String,
}

/// 2-D PCA projection of selected word vectors from one model.
#[derive(Debug, Clone)]
pub struct Projection {
    words: Vec<String>,
    coords: Vec<[f64; 2]>,
}

impl Projection {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn coord(&self, word: &str) -> Option<[f64; 2]> {
        self.words
            .iter()
            .position(|w| w == word)
            .map(|i| self.coords[i])
    }
}

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERS: usize = 1000;

/// Project the selected in-vocab words onto their top two principal
/// components.
///
/// Vectors are mean-centered; components come from power iteration with
/// deflation (tolerance 1e-10, at most 1000 iterations); each component's
/// sign is fixed so its largest-magnitude loading is positive. Words missing
/// from the vocabulary are skipped; fewer than three usable words is an
/// error, as is a model dimension below two.
pub fn project_2d(model: &EmbeddingModel, words: &[String]) -> Result<Projection, DiffError> {
    if model.dim() < 2 {
        return Err(DiffError::DimensionTooSmall(model.dim()));
    }
    let mut seen = HashSet::new();
    let usable: Vec<&String> = words
        .iter()
        .filter(|w| model.vector(w).is_some() && seen.insert(w.as_str()))
        .collect();
    if usable.len() < 3 {
        return Err(DiffError::TooFewWords(usable.len()));
    }

    let n = usable.len();
    let dim = model.dim();
    let mut centered: Vec<Vec<f64>> = usable
        .iter()
        .map(|w| model.vector(w).expect("filtered to in-vocab").to_vec())
        .collect();
    let mut mean = vec![0.0; dim];
    for row in &centered {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    for row in &mut centered {
        for (v, m) in row.iter_mut().zip(&mean) {
            *v -= m;
        }
    }

    let pc1 = principal_component(&centered, &[]);
    let pc2 = principal_component(&centered, &[&pc1]);

    let coords = centered
        .iter()
        .map(|row| [dot(row, &pc1), dot(row, &pc2)])
        .collect();
    Ok(Projection {
        words: usable.into_iter().cloned().collect(),
        coords,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Leading eigenvector of the covariance of `rows` (already centered),
/// orthogonal to every vector in `deflate`, by power iteration. The sign is
/// fixed so the largest-magnitude loading is positive.
fn principal_component(rows: &[Vec<f64>], deflate: &[&Vec<f64>]) -> Vec<f64> {
    let dim = rows[0].len();
    let n = rows.len() as f64;
    // fixed arbitrary start, deterministic and unlikely to be orthogonal to
    // the leading eigenvector
    let mut v: Vec<f64> = (0..dim)
        .map(|j| 1.0 + 0.6180339887498949 * (j as f64 + 1.0).sin())
        .collect();
    for &d in deflate {
        let proj = dot(&v, d);
        for (x, y) in v.iter_mut().zip(d) {
            *x -= proj * y;
        }
    }
    normalize(&mut v);

    let mut next = vec![0.0; dim];
    for _ in 0..POWER_MAX_ITERS {
        // next = Cov * v = X^T (X v) / n without forming Cov
        next.fill(0.0);
        for row in rows {
            let s = dot(row, &v);
            for (nx, x) in next.iter_mut().zip(row) {
                *nx += s * x;
            }
        }
        next.iter_mut().for_each(|x| *x /= n);
        for &d in deflate {
            let proj = dot(&next, d);
            for (x, y) in next.iter_mut().zip(d) {
                *x -= proj * y;
            }
        }
        if normalize(&mut next) == 0.0 {
            // degenerate direction: no variance left
            break;
        }
        let delta: f64 = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        std::mem::swap(&mut v, &mut next);
        if delta < POWER_TOLERANCE {
            break;
        }
    }

    // sign convention: largest-magnitude loading positive
    let lead = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Write projections as TSV `model<TAB>word<TAB>x<TAB>y` with a header row.
pub fn write_projection_tsv(
    projections: &[(String, Projection)],
    mut w: impl Write,
) -> Result<(), DiffError> {
    writeln!(w, "model\tword\tx\ty")?;
    for (name, projection) in projections {
        for (word, [x, y]) in projection.words().iter().zip(projection.coords()) {
            writeln!(w, "{name}\t{word}\t{x:.6}\t{y:.6}")?;
        }
    }
    Ok(())
}
