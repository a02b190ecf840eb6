//! Query-result cache: JSON records keyed by an FNV-1a hash of the full
//! canonical query description (function, parameters, grids, quadrature
//! resolution). Serialized f64 values round-trip exactly, so replayed
//! results reproduce output files byte for byte; any resolution change
//! alters the key and invalidates the entry.

use anyhow::Result;
use serde::{de::DeserializeOwned, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(output_dir: &Path, enabled: bool) -> Self {
        Cache { dir: enabled.then(|| output_dir.join("cache")) }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{:016x}.json", fnv1a(key.as_bytes()))))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let path = self.path(key)?;
        let bytes = fs::read(path).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        let Some(path) = self.path(key) else {
            return Ok(());
        };
        let body = serde_json::to_vec(value)?;
        crate::output::write_atomic(&path, &body)?;
        Ok(())
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
