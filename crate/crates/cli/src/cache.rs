//! Content-addressed report cache. Entries are JSON files named by the
//! SHA-256 of the job's key material; writes go through a temporary file and
//! an atomic rename, and entries that fail their checksum are evicted.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub created_unix: u64,
    pub command: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    /// SHA-256 of `value`.
    pub checksum: String,
    pub value: String,
    pub meta: Meta,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key for a job: a hash of its normalized description. `serde_json` maps
/// are sorted, so the serialization is canonical.
pub fn cache_key(material: &serde_json::Value) -> String {
    sha256_hex(&serde_json::to_vec(material).expect("JSON values serialize"))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Cache { dir: dir.as_ref().to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// The cached value, if present and intact. Corrupt entries are removed.
    pub fn get(&self, key: &str) -> io::Result<Option<String>> {
        let path = self.path(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        let intact = serde_json::from_slice::<CacheEntry>(&bytes)
            .ok()
            .filter(|e| e.key == key && e.checksum == sha256_hex(e.value.as_bytes()));
        match intact {
            Some(entry) => Ok(Some(entry.value)),
            None => {
                match fs::remove_file(&path) {
                    Ok(()) => {}
                    Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                    Err(e) => return Err(e),
                }
                Ok(None)
            }
        }
    }

    pub fn put(&self, key: &str, value: &str, command: &str) -> io::Result<()> {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let entry = CacheEntry {
            key: key.to_string(),
            checksum: sha256_hex(value.as_bytes()),
            value: value.to_string(),
            meta: Meta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                created_unix: now,
                command: command.to_string(),
            },
        };
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.subsec_nanos());
        let tmp = self.dir.join(format!(".{key}.{}.{nanos}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&entry).expect("entries serialize"))?;
        fs::rename(&tmp, self.path(key)).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        assert_eq!(cache.get("abc").unwrap(), None);
        cache.put("abc", "{\"x\":1}\n", "test").unwrap();
        assert_eq!(cache.get("abc").unwrap().as_deref(), Some("{\"x\":1}\n"));
    }

    #[test]
    fn corrupt_entries_are_evicted() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        cache.put("k", "value", "test").unwrap();
        let path = dir.path().join("k.json");
        let text = fs::read_to_string(&path).unwrap().replace("value", "valuf");
        fs::write(&path, text).unwrap();
        assert_eq!(cache.get("k").unwrap(), None);
        assert!(!path.exists());
        fs::write(&path, b"not json").unwrap();
        assert_eq!(cache.get("k").unwrap(), None);
        assert!(!path.exists());
    }

    #[test]
    fn keys_ignore_field_order() {
        let a: serde_json::Value = serde_json::from_str(r#"{"a":1,"b":2}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"b":2,"a":1}"#).unwrap();
        assert_eq!(cache_key(&a), cache_key(&b));
    }
}
