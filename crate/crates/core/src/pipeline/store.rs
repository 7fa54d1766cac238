//! Output directory with atomic writes, content hashes and a stage cache.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of a sequence of parts, each length-prefixed.
pub fn key_of(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Write via a temporary sibling and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct CacheEntry<T> {
    key: String,
    value: T,
}

pub struct Store {
    root: PathBuf,
    /// Relative path → sha256 of every artifact written in this run.
    hashes: BTreeMap<String, String>,
}

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Store {
            root: root.into(),
            hashes: BTreeMap::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.root.join(rel), bytes)?;
        self.hashes.insert(rel.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn hashes(&self) -> &BTreeMap<String, String> {
        &self.hashes
    }

    fn cache_path(&self, stage: &str, item: &str) -> PathBuf {
        self.root.join("cache").join(stage).join(format!("{}.json", item.replace('/', "__")))
    }

    /// Cached value of `(stage, item)` if it was stored under `key`.
    pub fn cached<T: DeserializeOwned>(&self, stage: &str, item: &str, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.cache_path(stage, item)).ok()?;
        let entry: CacheEntry<T> = serde_json::from_str(&text).ok()?;
        (entry.key == key).then_some(entry.value)
    }

    pub fn store_cache<T: Serialize>(&self, stage: &str, item: &str, key: &str, value: &T) -> Result<()> {
        let entry = CacheEntry {
            key: key.to_string(),
            value,
        };
        let text = serde_json::to_vec(&entry).map_err(|e| Error::stage("cache", e))?;
        write_atomic(&self.cache_path(stage, item), &text)
    }

    /// `manifest.json`: artifact hashes, sorted by path.
    pub fn write_manifest(&mut self) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.hashes).expect("map serializes") + "\n";
        write_atomic(&self.root.join("manifest.json"), text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_round_trip_requires_matching_key() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Store::new(dir.path());
        s.store_cache("stage", "a/b", "k1", &vec![1, 2]).unwrap();
        assert_eq!(s.cached::<Vec<i32>>("stage", "a/b", "k1"), Some(vec![1, 2]));
        assert_eq!(s.cached::<Vec<i32>>("stage", "a/b", "k2"), None);
        s.write("x/y.csv", b"z").unwrap();
        assert_eq!(fs::read(dir.path().join("x/y.csv")).unwrap(), b"z");
        assert!(!dir.path().join("x/y.csv.tmp").exists());
        assert_eq!(s.hashes()["x/y.csv"], sha256_hex(b"z"));
    }

    #[test]
    fn keys_are_length_prefixed() {
        assert_ne!(key_of(&[b"ab", b"c"]), key_of(&[b"a", b"bc"]));
    }
}
