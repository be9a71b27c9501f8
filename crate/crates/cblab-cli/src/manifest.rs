//! Run manifest: one `manifest.txt` per output directory, written with
//! status=running before compute starts and rewritten with the final status,
//! finish time, and artifact list afterwards. Timestamps are Unix seconds
//! and are the only non-deterministic bytes a run produces.

use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use cblab::report::KvReport;

pub const MANIFEST_NAME: &str = "manifest.txt";

#[derive(Debug)]
pub struct Manifest {
    path: PathBuf,
    command: String,
    seed: Option<u64>,
    started: u64,
    /// Resolved configuration echo (full effective values, sorted upstream).
    config: Vec<(String, String)>,
    artifacts: Vec<String>,
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl Manifest {
    /// Creates the manifest and writes the running state to disk.
    pub fn start(out_dir: &Path, command: &str, seed: Option<u64>) -> io::Result<Self> {
        let m = Manifest {
            path: out_dir.join(MANIFEST_NAME),
            command: command.to_string(),
            seed,
            started: now_unix(),
            config: Vec::new(),
            artifacts: Vec::new(),
        };
        m.write("running", None)?;
        Ok(m)
    }

    /// Records one resolved configuration value.
    pub fn config_value(&mut self, key: &str, value: impl std::fmt::Display) {
        self.config.push((key.to_string(), value.to_string()));
    }

    /// Records a produced artifact (path relative to the output directory).
    pub fn artifact(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    fn write(&self, status: &str, error: Option<&str>) -> io::Result<()> {
        let mut kv = KvReport::new();
        kv.push("status", status);
        kv.push("command", &self.command);
        kv.push("code_version", env!("CARGO_PKG_VERSION"));
        kv.push("seed", self.seed.map_or("default".to_string(), |s| s.to_string()));
        kv.push("started_unix", self.started);
        if status != "running" {
            kv.push("finished_unix", now_unix());
        }
        if let Some(msg) = error {
            kv.push("error", msg.replace('\n', " "));
        }
        for (k, v) in &self.config {
            kv.push(&format!("config.{k}"), v);
        }
        for a in &self.artifacts {
            kv.push("artifact", a);
        }
        kv.write(&self.path)
    }

    /// Rewrites the manifest with the terminal status.
    pub fn finalize(&self, error: Option<&str>) -> io::Result<()> {
        self.write(if error.is_some() { "failed" } else { "ok" }, error)
    }
}
