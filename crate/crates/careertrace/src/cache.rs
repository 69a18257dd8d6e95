//! Content-addressed cache of intermediate tables.
//!
//! An entry is a directory `<stage>-<key>` holding the stage's CSV tables and
//! an `index.json` with the SHA-256 of every file. Entries whose index or
//! checksums do not match are deleted and reported as corrupt.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const INDEX: &str = "index.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key from parts, each length-prefixed so that no two part lists collide.
pub fn cache_key(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryIndex {
    files: BTreeMap<String, String>,
}

#[derive(Debug)]
pub enum Lookup {
    Hit(BTreeMap<String, Vec<u8>>),
    Miss,
    /// An entry existed but failed verification and was removed.
    Corrupt(String),
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry(&self, stage: &str, key: &str) -> PathBuf {
        self.dir.join(format!("{stage}-{key}"))
    }

    pub fn load(&self, stage: &str, key: &str) -> Lookup {
        let dir = self.entry(stage, key);
        if !dir.exists() {
            return Lookup::Miss;
        }
        match read_entry(&dir) {
            Ok(files) => Lookup::Hit(files),
            Err(reason) => {
                self.discard(stage, key);
                Lookup::Corrupt(reason)
            }
        }
    }

    /// Removes an entry, e.g. one whose content failed to parse.
    pub fn discard(&self, stage: &str, key: &str) {
        let _ = fs::remove_dir_all(self.entry(stage, key));
    }

    /// Writes an entry next to its final location and renames it into place.
    pub fn store(&self, stage: &str, key: &str, files: &[(&str, &[u8])]) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let dest = self.entry(stage, key);
        let tmp = self
            .dir
            .join(format!(".tmp-{stage}-{key}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&tmp);
        fs::create_dir_all(&tmp)?;
        let mut index = EntryIndex {
            files: BTreeMap::new(),
        };
        for (name, bytes) in files {
            fs::write(tmp.join(name), bytes)?;
            index.files.insert(name.to_string(), sha256_hex(bytes));
        }
        let json = serde_json::to_vec_pretty(&index).map_err(std::io::Error::other)?;
        fs::write(tmp.join(INDEX), json)?;
        let _ = fs::remove_dir_all(&dest);
        match fs::rename(&tmp, &dest) {
            Ok(()) => Ok(()),
            Err(e) => {
                let _ = fs::remove_dir_all(&tmp);
                Err(e)
            }
        }
    }
}

fn read_entry(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let raw = fs::read(dir.join(INDEX)).map_err(|e| format!("missing index: {e}"))?;
    let index: EntryIndex =
        serde_json::from_slice(&raw).map_err(|e| format!("unreadable index: {e}"))?;
    let mut out = BTreeMap::new();
    for (name, sum) in index.files {
        let bytes = fs::read(dir.join(&name)).map_err(|e| format!("{name}: {e}"))?;
        if sha256_hex(&bytes) != sum {
            return Err(format!("{name}: checksum mismatch"));
        }
        out.insert(name, bytes);
    }
    Ok(out)
}
