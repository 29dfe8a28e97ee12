//! Output files stamped with the run metadata.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cantorlab::render::Ppm;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    /// Hash of the canonical JSON of `config`.
    pub fn new(config: &impl Serialize, seed: u64) -> Meta {
        let text = serde_json::to_string(config).expect("run config serializes");
        let digest = Sha256::digest(text.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Meta { version: VERSION.to_string(), config_hash, seed }
    }

    fn stamp(&self) -> String {
        format!("# cantorlab {} config {} seed {}", self.version, self.config_hash, self.seed)
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    meta: &'a Meta,
    result: &'a T,
}

/// Writes into `dir` when one was given; otherwise every write is a no-op.
pub struct Output {
    pub dir: Option<PathBuf>,
    pub meta: Meta,
    pub written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<&Path>, meta: Meta) -> Result<Output> {
        if let Some(d) = dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Output { dir: dir.map(Path::to_path_buf), meta, written: Vec::new() })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            self.written.push(path);
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&Stamped { meta: &self.meta, result: value })?;
        text.push('\n');
        self.write(name, &text)
    }

    /// `body` starts with its column header.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!("{}\n{body}", self.meta.stamp());
        self.write(name, &text)
    }

    pub fn ppm(&mut self, name: &str, img: &Ppm) -> Result<()> {
        let p3 = img.to_p3();
        let body = p3.strip_prefix("P3\n").expect("P3 header");
        let text = format!("P3\n{}\n{body}", self.meta.stamp());
        self.write(name, &text)
    }
}
