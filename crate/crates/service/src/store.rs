//! Append-only JSONL files, one per session or job.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

/// A file's id and its events, or why it could not be read.
pub(crate) type Loaded<T> = (String, Result<Vec<T>, String>);

#[derive(Debug, Clone)]
pub(crate) struct Store {
    root: PathBuf,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Collection {
    Sessions,
    Jobs,
}

impl Collection {
    fn dir(self) -> &'static str {
        match self {
            Collection::Sessions => "sessions",
            Collection::Jobs => "jobs",
        }
    }
}

impl Store {
    pub fn open(root: &Path) -> io::Result<Self> {
        for c in [Collection::Sessions, Collection::Jobs] {
            fs::create_dir_all(root.join(c.dir()))?;
        }
        Ok(Store { root: root.to_path_buf() })
    }

    fn path(&self, c: Collection, id: &str) -> PathBuf {
        self.root.join(c.dir()).join(format!("{id}.jsonl"))
    }

    pub fn append<T: Serialize>(&self, c: Collection, id: &str, event: &T) -> io::Result<()> {
        let mut line = serde_json::to_string(event).map_err(io::Error::other)?;
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(self.path(c, id))?;
        f.write_all(line.as_bytes())?;
        f.flush()
    }

    /// Every stored file as `(id, events)`, sorted by id.
    pub fn load<T: DeserializeOwned>(&self, c: Collection) -> io::Result<Vec<Loaded<T>>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join(c.dir()))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                continue;
            }
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
                continue;
            };
            let events = BufReader::new(File::open(&path)?)
                .lines()
                .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
                .map(|l| {
                    let l = l.map_err(|e| e.to_string())?;
                    serde_json::from_str(&l).map_err(|e| e.to_string())
                })
                .collect();
            out.push((id, events));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }
}
