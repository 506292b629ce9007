//! On-disk artifact cache keyed by content hash.
//!
//! Each entry is a JSON file `<kind>-<sha256>.json` where the hash covers
//! the kind and every key part. Unreadable or stale entries are recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "FPTOWER_CACHE";

#[derive(Clone, Debug)]
pub struct ArtifactCache {
    dir: PathBuf,
}

impl ArtifactCache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ArtifactCache { dir })
    }

    /// Cache in the directory named by [`CACHE_ENV`], if set.
    pub fn from_env() -> Option<Self> {
        let dir = std::env::var_os(CACHE_ENV)?;
        Self::new(dir).ok()
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(kind: &str, parts: &[&str]) -> String {
        let mut h = Sha256::new();
        h.update(kind.as_bytes());
        for p in parts {
            h.update([0u8]);
            h.update(p.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn path(&self, kind: &str, key: &str) -> PathBuf {
        self.dir.join(format!("{kind}-{key}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path(kind, key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Best effort: a failed write only costs a recomputation later.
    pub fn put<T: Serialize>(&self, kind: &str, key: &str, value: &T) {
        let Ok(text) = serde_json::to_string(value) else { return };
        let tmp = self.dir.join(format!(".{kind}-{key}.tmp"));
        if fs::write(&tmp, text).is_ok() {
            let _ = fs::rename(&tmp, self.path(kind, key));
        }
    }

    pub fn get_or_insert_with<T, F>(&self, kind: &str, parts: &[&str], f: F) -> T
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> T,
    {
        let key = Self::key(kind, parts);
        if let Some(v) = self.get(kind, &key) {
            log::debug!("cache hit {kind}-{key}");
            return v;
        }
        let v = f();
        self.put(kind, &key, &v);
        v
    }
}

/// Runs `f` through the cache when one is given.
pub fn cached<T, F>(cache: Option<&ArtifactCache>, kind: &str, parts: &[&str], f: F) -> T
where
    T: Serialize + DeserializeOwned,
    F: FnOnce() -> T,
{
    match cache {
        Some(c) => c.get_or_insert_with(kind, parts, f),
        None => f(),
    }
}
