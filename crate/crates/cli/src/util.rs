//! Small helpers shared by the subcommands.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use anyhow::{anyhow, bail, Result};

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// A sibling temp path in the same directory, so the final rename stays on
/// one filesystem.
pub fn temp_sibling(path: &Path) -> PathBuf {
    let n = TEMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let mut name = path.file_name().unwrap_or_default().to_owned();
    name.push(format!(".tmp.{}.{n}", std::process::id()));
    path.with_file_name(name)
}

/// Write bytes to `path` atomically: temp file in the same directory, then
/// rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = temp_sibling(path);
    std::fs::write(&tmp, bytes).map_err(|e| anyhow!("cli: cannot write {}: {e}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| anyhow!("cli: cannot move {} into place: {e}", path.display()))?;
    Ok(())
}

/// Run `save` against a temp path, then rename the result over `path`.
pub fn save_atomic(path: &Path, save: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let tmp = temp_sibling(path);
    save(&tmp)?;
    std::fs::rename(&tmp, path)
        .map_err(|e| anyhow!("cli: cannot move {} into place: {e}", path.display()))?;
    Ok(())
}

/// Load a word-list file: one word per line, `#` comments and blank lines
/// skipped, no internal whitespace allowed.
pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!("cli: cannot read word list {}: {e}", path.display()))?;
    let mut words = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.split_whitespace().nth(1).is_some() {
            bail!(
                "cli: {}:{}: a word list holds one word per line, got {raw:?}",
                path.display(),
                lineno + 1
            );
        }
        words.push(line.to_owned());
    }
    Ok(words)
}

/// Human-readable unique names for a list of model files: the file stem,
/// with `#2`, `#3`, ... appended on collision (so diffing a file against
/// itself still works).
pub fn model_names(paths: &[PathBuf]) -> Vec<String> {
    let mut names: Vec<String> = Vec::with_capacity(paths.len());
    for path in paths {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".to_owned());
        let mut name = stem.clone();
        let mut k = 2;
        while names.contains(&name) {
            name = format!("{stem}#{k}");
            k += 1;
        }
        names.push(name);
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_for_repeated_paths() {
        let paths = vec![
            PathBuf::from("out/vecs.txt"),
            PathBuf::from("elsewhere/vecs.txt"),
            PathBuf::from("out/vecs.txt"),
        ];
        assert_eq!(model_names(&paths), vec!["vecs", "vecs#2", "vecs#3"]);
    }

    #[test]
    fn word_list_skips_comments_and_rejects_spaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("words.txt");
        std::fs::write(&path, "# header\nalpha\n\nbeta\n").unwrap();
        assert_eq!(read_word_list(&path).unwrap(), vec!["alpha", "beta"]);
        std::fs::write(&path, "two words\n").unwrap();
        assert!(read_word_list(&path).is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        // no temp litter
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains(".tmp."))
            .collect();
        assert!(leftovers.is_empty());
    }
}
