//! All-or-nothing artifact writing.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

/// Files produced by a command, held in memory until the run succeeds.
#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, path: &Path, contents: impl Into<Vec<u8>>) {
        self.files.push((path.to_path_buf(), contents.into()));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Writes every file to a temporary sibling first and renames only once
    /// all of them are complete. A failure removes the temporaries.
    pub fn commit(self) -> std::io::Result<()> {
        let mut ready = Vec::with_capacity(self.files.len());
        for (path, contents) in self.files {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| annotate(&path, e))?;
            tmp.write_all(&contents).map_err(|e| annotate(&path, e))?;
            tmp.as_file().sync_all().map_err(|e| annotate(&path, e))?;
            ready.push((tmp, path));
        }
        for (tmp, path) in ready {
            tmp.persist(&path).map_err(|e| annotate(&path, e.error))?;
        }
        Ok(())
    }
}

fn annotate(path: &Path, e: std::io::Error) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nothing_is_written_when_one_target_is_unwritable() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("a.csv");
        let bad = dir.path().join("missing").join("b.json");
        let mut staged = Staged::default();
        staged.add(&good, "x");
        staged.add(&bad, "y");
        assert!(staged.commit().is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn files_appear_complete() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        let mut staged = Staged::default();
        staged.add(&path, "{}\n");
        staged.commit().unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{}\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
