//! Text vector files.
//!
//! Line 1 is `<vocab_size> <dim>`; each following line is
//! `<word> <v1> ... <vd>` with components printed to six decimal places.
//! The output matrix can ride along in a sidecar file of the same layout
//! whose name is the vector path plus an `.out` suffix, so seeded
//! retraining can resume from exactly the saved state.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{EmbeddingModel, Stage};
use crate::corpus::Vocab;
use crate::error::EmbeddingError;

/// Sidecar path for the output matrix: `vectors.txt` -> `vectors.txt.out`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".out");
    PathBuf::from(name)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmbeddingError + '_ {
    move |source| EmbeddingError::Io {
        path: path.to_owned(),
        source,
    }
}

impl EmbeddingModel {
    /// Write the input matrix `W` as a text vector file.
    pub fn save_vectors(&self, path: impl AsRef<Path>) -> Result<(), EmbeddingError> {
        let path = path.as_ref();
        save_rows(path, self.vocab(), self.dim(), |i| self.row(i))
    }

    /// Write the output matrix `W'` to exactly `path` in the same layout.
    pub fn save_output_matrix(&self, path: impl AsRef<Path>) -> Result<(), EmbeddingError> {
        save_rows(path.as_ref(), self.vocab(), self.dim(), |i| self.out_row(i))
    }

    /// Write the output matrix `W'` to the `.out` sidecar of `path`.
    pub fn save_output_sidecar(&self, path: impl AsRef<Path>) -> Result<(), EmbeddingError> {
        self.save_output_matrix(sidecar_path(path.as_ref()))
    }

    /// Read a text vector file back into a model.
    ///
    /// If the `.out` sidecar exists it supplies the output matrix, otherwise
    /// `W'` starts at zero. The vector format carries no frequencies or
    /// stage, so the loaded vocabulary has unit counts and the model reports
    /// stage `general` with zero trained epochs.
    pub fn load_vectors(path: impl AsRef<Path>) -> Result<EmbeddingModel, EmbeddingError> {
        let path = path.as_ref();
        let (words, dim, w) = load_rows(path)?;

        let sidecar = sidecar_path(path);
        let w_out = if sidecar.exists() {
            let (out_words, out_dim, data) = load_rows(&sidecar)?;
            if out_dim != dim || out_words != words {
                return Err(EmbeddingError::MalformedHeader {
                    path: sidecar,
                    msg: "sidecar does not match the vector file".into(),
                });
            }
            data
        } else {
            vec![0.0; words.len() * dim]
        };

        let vocab = Vocab::from_sorted(words.into_iter().map(|w| (w, 1)), 1);
        Ok(EmbeddingModel::from_parts(
            vocab,
            dim,
            w,
            w_out,
            Stage::General,
        ))
    }
}

fn save_rows<'a>(
    path: &Path,
    vocab: &Vocab,
    dim: usize,
    row: impl Fn(usize) -> &'a [f64],
) -> Result<(), EmbeddingError> {
    let file = fs::File::create(path).map_err(|e| io_err(path)(e))?;
    let mut out = BufWriter::new(file);
    let mut write = |s: std::fmt::Arguments| -> std::io::Result<()> { out.write_fmt(s) };
    let result: std::io::Result<()> = (|| {
        write(format_args!("{} {}\n", vocab.len(), dim))?;
        for i in 0..vocab.len() {
            write(format_args!("{}", vocab.word(i)))?;
            for v in row(i) {
                write(format_args!(" {v:.6}"))?;
            }
            write(format_args!("\n"))?;
        }
        Ok(())
    })();
    result.map_err(|e| io_err(path)(e))?;
    out.flush().map_err(|e| io_err(path)(e))?;
    Ok(())
}

fn load_rows(path: &Path) -> Result<(Vec<String>, usize, Vec<f64>), EmbeddingError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();

    let header = lines
        .next()
        .ok_or_else(|| EmbeddingError::MalformedHeader {
            path: path.to_owned(),
            msg: "file is empty".into(),
        })?;
    let mut fields = header.split_whitespace();
    let parse_field = |f: Option<&str>, what: &str| -> Result<usize, EmbeddingError> {
        f.and_then(|s| s.parse().ok())
            .ok_or_else(|| EmbeddingError::MalformedHeader {
                path: path.to_owned(),
                msg: format!("expected `<vocab_size> <dim>`, bad {what} in {header:?}"),
            })
    };
    let expected = parse_field(fields.next(), "vocab size")?;
    let dim = parse_field(fields.next(), "dimension")?;
    if fields.next().is_some() {
        return Err(EmbeddingError::MalformedHeader {
            path: path.to_owned(),
            msg: format!("trailing fields in {header:?}"),
        });
    }
    if dim == 0 {
        return Err(EmbeddingError::MalformedHeader {
            path: path.to_owned(),
            msg: "dimension must be >= 1".into(),
        });
    }

    let mut words = Vec::with_capacity(expected);
    let mut data = Vec::with_capacity(expected * dim);
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            break; // trailing blank lines allowed
        }
        let row_index = lineno + 2; // 1-based file line
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("non-empty line has a first field");
        let mut count = 0;
        for f in fields {
            let v: f64 = f
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| EmbeddingError::MalformedRow {
                    path: path.to_owned(),
                    line: row_index,
                    msg: format!("non-numeric component {f:?}"),
                })?;
            data.push(v);
            count += 1;
        }
        if count != dim {
            return Err(EmbeddingError::MalformedRow {
                path: path.to_owned(),
                line: row_index,
                msg: format!("expected {dim} components, found {count}"),
            });
        }
        words.push(word.to_owned());
    }
    if words.len() != expected {
        return Err(EmbeddingError::RowCountMismatch {
            path: path.to_owned(),
            expected,
            found: words.len(),
        });
    }
    let mut seen = std::collections::HashSet::new();
    for (i, w) in words.iter().enumerate() {
        if !seen.insert(w.as_str()) {
            return Err(EmbeddingError::MalformedRow {
                path: path.to_owned(),
                line: i + 2,
                msg: format!("duplicate word {w:?}"),
            });
        }
    }
    Ok((words, dim, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::TrainConfig;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn sample_model() -> EmbeddingModel {
        let vocab = Vocab::from_sorted(
            [("alpha", 3u64), ("beta", 2), ("gamma", 1)]
                .into_iter()
                .map(|(w, c)| (w.to_string(), c)),
            1,
        );
        let cfg = TrainConfig {
            dim: 2,
            ..TrainConfig::default()
        };
        let mut m = EmbeddingModel::init(vocab, &cfg, &mut StdRng::seed_from_u64(8)).unwrap();
        m.row_mut(0).copy_from_slice(&[0.125, -3.5]);
        m.row_mut(1).copy_from_slice(&[1.0, 0.000001]);
        m.row_mut(2).copy_from_slice(&[-0.333333, 42.0]);
        m.out_row_mut(0).copy_from_slice(&[0.5, 0.25]);
        m
    }

    #[test]
    fn round_trip_preserves_six_decimals() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.txt");
        let m = sample_model();
        m.save_vectors(&path).unwrap();
        let loaded = EmbeddingModel::load_vectors(&path).unwrap();
        assert_eq!(loaded.len(), 3);
        assert_eq!(loaded.dim(), 2);
        assert_eq!(loaded.vocab().words(), m.vocab().words());
        for i in 0..3 {
            for (a, b) in loaded.row(i).iter().zip(m.row(i)) {
                assert!((a - b).abs() < 5e-7, "{a} vs {b}");
            }
        }
        // no sidecar written: W' comes back zero
        for i in 0..3 {
            assert!(loaded.out_row(i).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn sidecar_round_trip_restores_output_matrix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.txt");
        let m = sample_model();
        m.save_vectors(&path).unwrap();
        m.save_output_sidecar(&path).unwrap();
        assert!(sidecar_path(&path).exists());
        let loaded = EmbeddingModel::load_vectors(&path).unwrap();
        for (a, b) in loaded.out_row(0).iter().zip(m.out_row(0)) {
            assert!((a - b).abs() < 5e-7);
        }
    }

    #[test]
    fn save_twice_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let m = sample_model();
        let p1 = dir.path().join("a.txt");
        let p2 = dir.path().join("b.txt");
        m.save_vectors(&p1).unwrap();
        m.save_vectors(&p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn missing_rows_error_carries_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.txt");
        fs::write(&path, "3 2\na 1.0 2.0\nb 3.0 4.0\n").unwrap();
        match EmbeddingModel::load_vectors(&path) {
            Err(EmbeddingError::RowCountMismatch {
                expected, found, ..
            }) => {
                assert_eq!((expected, found), (3, 2));
            }
            other => panic!("expected RowCountMismatch, got {other:?}"),
        }
    }

    #[test]
    fn bad_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "abc 2\nx 1.0 2.0\n").unwrap();
        assert!(matches!(
            EmbeddingModel::load_vectors(&path),
            Err(EmbeddingError::MalformedHeader { .. })
        ));
    }

    #[test]
    fn non_numeric_component_is_rejected_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "2 2\na 1.0 2.0\nb 3.0 oops\n").unwrap();
        match EmbeddingModel::load_vectors(&path) {
            Err(EmbeddingError::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_component_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "1 2\na 1e999 0.0\n").unwrap();
        assert!(matches!(
            EmbeddingModel::load_vectors(&path),
            Err(EmbeddingError::MalformedRow { .. })
        ));
    }

    #[test]
    fn wrong_component_count_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "1 3\na 1.0 2.0\n").unwrap();
        assert!(matches!(
            EmbeddingModel::load_vectors(&path),
            Err(EmbeddingError::MalformedRow { .. })
        ));
    }
}
