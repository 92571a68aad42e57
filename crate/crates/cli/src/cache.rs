//! Checksummed on-disk cache: one file per (kind, n), format-versioned.
//!
//! A cache hit must be indistinguishable from a recompute, so entries are
//! trusted only when version, kind, size, and SHA-256 all match; anything
//! else is treated as a miss and silently recomputed.

use sha2::{Digest, Sha256};
use std::fs;
use std::path::PathBuf;

const VERSION: &str = "v1";

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Cache {
        Cache { dir }
    }

    fn path(&self, kind: &str, n: u64) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{n}.{VERSION}")))
    }

    fn load(&self, kind: &str, n: u64) -> Option<String> {
        let bytes = fs::read(self.path(kind, n)?).ok()?;
        let text = String::from_utf8(bytes).ok()?;
        let (header, payload) = text.split_once('\n')?;
        let mut fields = header.split(' ');
        if fields.next() != Some("tanglekit-cache") || fields.next() != Some(VERSION) {
            return None;
        }
        if fields.next() != Some(kind) || fields.next() != Some(&n.to_string()) {
            return None;
        }
        let sha = fields.next()?.strip_prefix("sha256=")?;
        if fields.next().is_some() {
            return None;
        }
        let digest = Sha256::digest(payload.as_bytes());
        if format!("{digest:x}") != sha {
            return None;
        }
        Some(payload.to_string())
    }

    fn store(&self, kind: &str, n: u64, payload: &str) {
        let Some(path) = self.path(kind, n) else {
            return;
        };
        if let Some(parent) = path.parent() {
            let _ = fs::create_dir_all(parent);
        }
        let digest = Sha256::digest(payload.as_bytes());
        let body = format!("tanglekit-cache {VERSION} {kind} {n} sha256={digest:x}\n{payload}");
        // Failure to persist is not an error: the value was computed anyway.
        let _ = fs::write(path, body);
    }

    /// Returns the cached payload for (kind, n), or computes, stores, and
    /// returns it. Corrupt or mismatched entries are recomputed, never served.
    pub fn get_or_compute<E>(
        &self,
        kind: &str,
        n: u64,
        compute: impl FnOnce() -> Result<String, E>,
    ) -> Result<String, E> {
        if let Some(hit) = self.load(kind, n) {
            return Ok(hit);
        }
        let payload = compute()?;
        self.store(kind, n, &payload);
        Ok(payload)
    }
}
