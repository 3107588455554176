//! Content-addressed record store: one JSON envelope per (diagram hash, flavor, version).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::record::RunRecord;

#[derive(Serialize, Deserialize)]
struct Envelope {
    checksum: String,
    record: RunRecord,
}

fn checksum(record: &RunRecord) -> String {
    let body = serde_json::to_string(record).expect("records serialize");
    hex::encode(Sha256::digest(body.as_bytes()))
}

pub fn cache_key(hash: &str, flavor: &str, version: &str) -> String {
    hex::encode(Sha256::digest(format!("{hash}\n{flavor}\n{version}").as_bytes()))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn path_for(&self, hash: &str, flavor: &str, version: &str) -> PathBuf {
        self.dir.join(format!("{}.json", cache_key(hash, flavor, version)))
    }

    /// Writes through a temp file in the same directory, then renames.
    pub fn store(&self, record: &RunRecord) -> std::io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&record.diagram.hash, &record.flavor, &record.meta.tool_version);
        let mut stored = record.clone();
        stored.meta.timings = None;
        let envelope = Envelope { checksum: checksum(&stored), record: stored };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer_pretty(&mut tmp, &envelope)?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }

    /// `None` on a miss; corrupt or mismatched files count as misses with a warning.
    pub fn load(&self, hash: &str, flavor: &str, version: &str) -> Option<RunRecord> {
        let path = self.path_for(hash, flavor, version);
        let text = fs::read_to_string(&path).ok()?;
        match verify(&path, &text) {
            Ok(r) if r.diagram.hash == hash && r.flavor == flavor && r.meta.tool_version == version => Some(r),
            Ok(_) => {
                log::warn!("{}: cached record does not match its key, ignoring", path.display());
                None
            }
            Err(msg) => {
                log::warn!("{}: {msg}, ignoring", path.display());
                None
            }
        }
    }
}

fn verify(path: &Path, text: &str) -> Result<RunRecord, String> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| format!("unreadable cache entry ({e})"))?;
    if checksum(&env.record) != env.checksum {
        return Err(format!("checksum mismatch in {}", path.display()));
    }
    Ok(env.record)
}
