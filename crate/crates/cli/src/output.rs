use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write through a temp file in the target directory and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Failure {
    pub item: String,
    pub error: String,
}

/// Record of one command run: parameters, seed, and every file written.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub master_seed: Option<u64>,
    pub outputs: Vec<OutputEntry>,
    pub failures: Vec<Failure>,
    pub started_unix: u64,
    pub finished_unix: u64,
    #[serde(skip)]
    dir: PathBuf,
}

impl RunManifest {
    pub fn new(command: &str, dir: &Path, master_seed: Option<u64>) -> Self {
        RunManifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            parameters: BTreeMap::new(),
            master_seed,
            outputs: Vec::new(),
            failures: Vec::new(),
            started_unix: unix_now(),
            finished_unix: 0,
            dir: dir.to_path_buf(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.into(), serde_json::to_value(value).expect("parameter serializes"));
        self
    }

    /// Write `bytes` to `name` inside the output directory and list it.
    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.outputs.push(OutputEntry { path: name.into(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    pub fn fail(&mut self, item: impl Into<String>, error: impl ToString) {
        self.failures.push(Failure { item: item.into(), error: error.to_string() });
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.finished_unix = unix_now();
        let mut json = serde_json::to_string_pretty(&self)?;
        json.push('\n');
        let path = self.dir.join(format!("{}.manifest.json", self.command));
        write_atomic(&path, json.as_bytes())?;
        Ok(path)
    }
}

pub fn to_pretty_json(v: &impl Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("demo", dir.path(), Some(3));
        m.param("count", 2);
        m.emit("a.txt", b"hello").unwrap();
        m.fail("b", "broken");
        let path = m.finish().unwrap();
        assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), b"hello");
        let v: serde_json::Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
        assert_eq!(v["outputs"][0]["sha256"], sha256_hex(b"hello"));
        assert_eq!(v["parameters"]["count"], 2);
        assert_eq!(v["failures"][0]["item"], "b");
        // No temp files left behind.
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
    }
}
