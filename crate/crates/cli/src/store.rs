//! Output layout and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reversed,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Reversed => "reversed",
        }
    }
}

pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: &Path) -> Self {
        Layout { root: root.to_path_buf() }
    }

    pub fn solution(&self, dir: Direction, n: usize) -> PathBuf {
        self.root.join("solutions").join(dir.name()).join(format!("n{n:04}.json"))
    }

    pub fn diagnostics(&self) -> PathBuf {
        self.root.join("diagnostics.json")
    }

    pub fn equilibrium(&self, dir: Direction) -> PathBuf {
        self.root.join("equilibrium").join(format!("{}.json", dir.name()))
    }

    pub fn table(&self, name: &str, ext: &str) -> PathBuf {
        self.root.join("tables").join(format!("{name}.{ext}"))
    }

    pub fn plot(&self, name: &str) -> PathBuf {
        self.root.join("plots").join(format!("{name}.dat"))
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report.json")
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Failure::from(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Solver(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// `Ok(None)` when the file does not exist.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<Option<T>> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Failure::Validation(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}
