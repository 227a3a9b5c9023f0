//! Binary soft-margin SVM with an RBF kernel, trained by sequential minimal
//! optimization on the maximal violating pair.

use std::fs;
use std::path::Path;

use crate::error::ClassifyError;
use crate::sentiment::Polarity;

use super::{DocFeature, LabeledSet};

/// RBF kernel `exp(-gamma * ||x - y||^2)`.
pub fn rbf(x: &[f64], y: &[f64], gamma: f64) -> Result<f64, ClassifyError> {
    if x.len() != y.len() {
        return Err(ClassifyError::DimensionMismatch(x.len(), y.len()));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(ClassifyError::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-gamma * sq).exp())
}

/// Trained classifier: support vectors with signed dual coefficients
/// (`y_i * alpha_i`), a bias, and the kernel parameters.
#[derive(Debug, Clone)]
pub struct SvmModel {
    support_vectors: Vec<Vec<f64>>,
    alphas: Vec<f64>,
    bias: f64,
    gamma: f64,
    c: f64,
    /// Positions of the support vectors in the training set; empty on a
    /// model loaded from disk.
    support_indices: Vec<usize>,
}

impl SvmModel {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    pub fn support_vector_count(&self) -> usize {
        self.support_vectors.len()
    }

    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    /// Signed dual coefficients, aligned with the support vectors.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Decision value `f(x) = sum_i alpha_i K(sv_i, x) + b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64, ClassifyError> {
        let mut f = self.bias;
        for (sv, alpha) in self.support_vectors.iter().zip(&self.alphas) {
            f += alpha * rbf(sv, x, self.gamma)?;
        }
        Ok(f)
    }

    /// Predicted label: the sign of the decision value, with exactly zero
    /// mapped to positive.
    pub fn predict(&self, feature: &DocFeature) -> Result<Polarity, ClassifyError> {
        Ok(if self.decision(&feature.vector)? >= 0.0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        })
    }

    /// Write the model as a versioned text file. Values round-trip exactly.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ClassifyError> {
        let path = path.as_ref();
        let mut text = String::new();
        text.push_str("svm-model v1\n");
        text.push_str(&format!("gamma {}\n", self.gamma));
        text.push_str(&format!("c {}\n", self.c));
        text.push_str(&format!("bias {}\n", self.bias));
        text.push_str(&format!("dim {}\n", self.dim()));
        text.push_str(&format!("nsv {}\n", self.support_vectors.len()));
        for (sv, alpha) in self.support_vectors.iter().zip(&self.alphas) {
            text.push_str(&format!("{alpha}"));
            for v in sv {
                text.push_str(&format!(" {v}"));
            }
            text.push('\n');
        }
        fs::write(path, text).map_err(|source| ClassifyError::Io {
            path: path.to_owned(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SvmModel, ClassifyError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ClassifyError::Io {
            path: path.to_owned(),
            source,
        })?;
        let malformed = |line: usize, msg: String| ClassifyError::MalformedModel {
            path: path.to_owned(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let mut expect = |key: &str| -> Result<(usize, String), ClassifyError> {
            let (i, line) = lines
                .next()
                .ok_or_else(|| malformed(0, format!("missing {key} line")))?;
            if key.is_empty() {
                return Ok((i, line.to_owned()));
            }
            let rest = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| malformed(i + 1, format!("expected `{key} ...`, got {line:?}")))?;
            Ok((i, rest.to_owned()))
        };

        let (i, version) = expect("")?;
        if version != "svm-model v1" {
            return Err(malformed(i + 1, format!("unsupported version {version:?}")));
        }
        let parse_f64 = |(i, s): (usize, String)| -> Result<f64, ClassifyError> {
            s.parse()
                .map_err(|_| malformed(i + 1, format!("bad number {s:?}")))
        };
        let parse_usize = |(i, s): (usize, String)| -> Result<usize, ClassifyError> {
            s.parse()
                .map_err(|_| malformed(i + 1, format!("bad count {s:?}")))
        };
        let gamma = parse_f64(expect("gamma")?)?;
        let c = parse_f64(expect("c")?)?;
        let bias = parse_f64(expect("bias")?)?;
        let dim = parse_usize(expect("dim")?)?;
        let nsv = parse_usize(expect("nsv")?)?;

        let mut support_vectors = Vec::with_capacity(nsv);
        let mut alphas = Vec::with_capacity(nsv);
        for _ in 0..nsv {
            let (i, line) = lines
                .next()
                .ok_or_else(|| malformed(0, "missing support vector rows".into()))?;
            let mut fields = line.split_whitespace();
            let alpha: f64 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| malformed(i + 1, "bad alpha".into()))?;
            let sv: Vec<f64> = fields
                .map(|s| {
                    s.parse()
                        .map_err(|_| malformed(i + 1, format!("bad component {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            if sv.len() != dim {
                return Err(malformed(
                    i + 1,
                    format!("expected {dim} components, found {}", sv.len()),
                ));
            }
            alphas.push(alpha);
            support_vectors.push(sv);
        }
        Ok(SvmModel {
            support_vectors,
            alphas,
            bias,
            gamma,
            c,
            support_indices: Vec::new(),
        })
    }
}

const ALPHA_EPS: f64 = 1e-12;

/// Train by SMO: repeatedly pick the maximal violating pair and solve the
/// two-variable subproblem until the KKT gap closes within `tol`, with a
/// hard cap of `10 * n^2` pair updates.
pub fn train_svm(
    train: &LabeledSet,
    c: f64,
    gamma: f64,
    tol: f64,
) -> Result<SvmModel, ClassifyError> {
    if !c.is_finite() || c <= 0.0 {
        return Err(ClassifyError::InvalidParameter(format!(
            "C must be positive, got {c}"
        )));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(ClassifyError::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(ClassifyError::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if !train.has_both_classes() {
        return Err(ClassifyError::SingleClass);
    }

    let n = train.len();
    let x: Vec<&[f64]> = train
        .items
        .iter()
        .map(|(f, _)| f.vector.as_slice())
        .collect();
    let y: Vec<f64> = train.items.iter().map(|(_, l)| l.signum()).collect();

    // full Gram matrix; n is modest for document sets
    let mut gram = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = rbf(x[i], x[j], gamma)?;
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }

    let mut alpha = vec![0.0f64; n];
    let mut f = vec![0.0f64; n]; // f_i = sum_j alpha_j y_j K_ij
    let cap = 10u64 * (n as u64) * (n as u64);
    let mut updates = 0u64;

    let (bias, _gap) = loop {
        // maximal violating pair over -E_t = y_t - f_t
        let mut up_best: Option<(usize, f64)> = None;
        let mut low_best: Option<(usize, f64)> = None;
        for t in 0..n {
            let v = y[t] - f[t];
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            if in_up && up_best.is_none_or(|(_, m)| v > m) {
                up_best = Some((t, v));
            }
            if in_low && low_best.is_none_or(|(_, m)| v < m) {
                low_best = Some((t, v));
            }
        }
        let ((i, m), (j, m_low)) = match (up_best, low_best) {
            (Some(up), Some(low)) => (up, low),
            // one side empty: any bias beyond that side's extreme satisfies
            // the remaining inequality constraints
            (Some((_, m)), None) => break (m, 0.0),
            (None, Some((_, m_low))) => break (m_low, 0.0),
            (None, None) => unreachable!("either index set is nonempty for n >= 1"),
        };
        if m - m_low <= tol {
            break ((m + m_low) / 2.0, m - m_low);
        }
        if updates >= cap {
            return Err(ClassifyError::NoConvergence(cap));
        }
        updates += 1;

        // two-variable step along t_i += d, t_j -= d (t = y * alpha)
        let eta = (gram[i * n + i] + gram[j * n + j] - 2.0 * gram[i * n + j]).max(1e-12);
        let room_i = if y[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if y[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        let d = ((m - m_low) / eta).min(room_i).min(room_j);

        alpha[i] += y[i] * d;
        alpha[j] -= y[j] * d;
        // snap to the box to keep the index sets clean
        for t in [i, j] {
            if alpha[t] < ALPHA_EPS {
                alpha[t] = 0.0;
            } else if alpha[t] > c - ALPHA_EPS {
                alpha[t] = c;
            }
        }
        for t in 0..n {
            f[t] += d * (gram[i * n + t] - gram[j * n + t]);
        }
    };

    let mut support_vectors = Vec::new();
    let mut alphas = Vec::new();
    let mut support_indices = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(x[t].to_vec());
            alphas.push(y[t] * alpha[t]);
            support_indices.push(t);
        }
    }
    Ok(SvmModel {
        support_vectors,
        alphas,
        bias,
        gamma,
        c,
        support_indices,
    })
}
