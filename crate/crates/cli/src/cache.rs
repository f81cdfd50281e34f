//! Write-once JSONL store of special values.
//!
//! One record per line. Each record carries a sha256 over its other
//! fields; a line that fails to parse or to verify is ignored, so the
//! value is recomputed and appended again.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use periodpoly::mp::DecimalPair;
use periodpoly::{Ball, Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_FILE: &str = "values.jsonl";

/// Everything that determines a cached value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub label: String,
    /// Symmetric power, 0 for a coefficient file.
    pub n: u32,
    pub s: i64,
    /// Balance parameter of the approximate functional equation.
    pub balance: String,
    pub precision_bits: u32,
    pub target_error: String,
    pub input_sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Body {
    version: u32,
    #[serde(flatten)]
    key: CacheKey,
    mid: String,
    rad: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Record {
    #[serde(flatten)]
    body: Body,
    checksum: String,
}

fn checksum(body: &Body) -> String {
    let text = serde_json::to_string(body).expect("record serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug)]
pub struct ValueCache {
    path: PathBuf,
    entries: HashMap<CacheKey, DecimalPair>,
    /// Lines skipped on load because they did not parse or verify.
    pub rejected: usize,
    pub hits: usize,
    pub misses: usize,
}

impl ValueCache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        let mut rejected = 0;
        if path.exists() {
            for line in fs::read_to_string(&path)?.lines() {
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<Record>(line) {
                    Ok(r) if r.body.version == CACHE_VERSION && checksum(&r.body) == r.checksum => {
                        entries.entry(r.body.key).or_insert(DecimalPair(r.body.mid, r.body.rad));
                    }
                    _ => rejected += 1,
                }
            }
        }
        Ok(ValueCache {
            path,
            entries,
            rejected,
            hits: 0,
            misses: 0,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&mut self, key: &CacheKey, prec: u32) -> Result<Option<Ball>> {
        match self.entries.get(key) {
            Some(pair) => {
                self.hits += 1;
                Ok(Some(pair.to_ball(prec)?))
            }
            None => {
                self.misses += 1;
                Ok(None)
            }
        }
    }

    pub fn get_pair(&self, key: &CacheKey) -> Option<&DecimalPair> {
        self.entries.get(key)
    }

    /// Appends a record unless the key is already present.
    pub fn put(&mut self, key: CacheKey, value: &Ball) -> Result<()> {
        if self.entries.contains_key(&key) {
            return Ok(());
        }
        let pair = DecimalPair::from(value);
        let body = Body {
            version: CACHE_VERSION,
            key: key.clone(),
            mid: pair.0.clone(),
            rad: pair.1.clone(),
        };
        let record = Record {
            checksum: checksum(&body),
            body,
        };
        let line = serde_json::to_string(&record).map_err(|e| Error::InvalidData(e.to_string()))?;
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{line}")?;
        self.entries.insert(key, pair);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(s: i64, bits: u32) -> CacheKey {
        CacheKey {
            label: "t".into(),
            n: 3,
            s,
            balance: "1".into(),
            precision_bits: bits,
            target_error: "1e-20".into(),
            input_sha256: "00".into(),
        }
    }

    fn ball(v: &str) -> Ball {
        Ball::new(
            periodpoly::mp::parse_decimal(128, v).unwrap(),
            periodpoly::mp::parse_decimal(64, "3.5e-25").unwrap(),
        )
    }

    #[test]
    fn store_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let b = ball("44.919088391528014021");
        {
            let mut c = ValueCache::open(dir.path()).unwrap();
            c.put(key(1, 128), &b).unwrap();
        }
        let mut c = ValueCache::open(dir.path()).unwrap();
        let got = c.get(&key(1, 128), 128).unwrap().unwrap();
        assert_eq!(DecimalPair::from(&got), DecimalPair::from(&b));
        assert_eq!(c.get(&key(1, 192), 192).unwrap(), None);
        assert_eq!((c.hits, c.misses), (1, 1));
    }

    #[test]
    fn corrupted_line_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut c = ValueCache::open(dir.path()).unwrap();
            c.put(key(1, 128), &ball("1.5")).unwrap();
            c.put(key(2, 128), &ball("2.5")).unwrap();
        }
        let path = dir.path().join(CACHE_FILE);
        let text = fs::read_to_string(&path).unwrap().replacen("1.5", "1.6", 1);
        fs::write(&path, text + "not json\n").unwrap();
        let mut c = ValueCache::open(dir.path()).unwrap();
        assert_eq!(c.rejected, 2);
        assert!(c.get(&key(1, 128), 128).unwrap().is_none());
        assert!(c.get(&key(2, 128), 128).unwrap().is_some());
    }

    #[test]
    fn write_once() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ValueCache::open(dir.path()).unwrap();
        c.put(key(1, 128), &ball("1.5")).unwrap();
        c.put(key(1, 128), &ball("9.5")).unwrap();
        let lines = fs::read_to_string(c.path()).unwrap().lines().count();
        assert_eq!(lines, 1);
        assert!(c.get_pair(&key(1, 128)).unwrap().0.starts_with("1.5"));
    }
}
