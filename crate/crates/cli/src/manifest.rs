//! Run manifests written as the header line of every output file.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub config: Value,
    pub inputs: Vec<FileDigest>,
    /// Digest of the record lines that follow the header.
    pub body_sha256: Option<String>,
    pub nodes: Option<u64>,
    pub wall_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: Value) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            config,
            inputs: Vec::new(),
            body_sha256: None,
            nodes: None,
            wall_secs: 0.0,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> std::io::Result<()> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: file_sha256(path)?,
        });
        Ok(())
    }

    /// Records the digest of `records` serialized one per line.
    pub fn digest_body<T: Serialize>(&mut self, records: &[T]) -> serde_json::Result<()> {
        let mut h = Sha256::new();
        for r in records {
            h.update(serde_json::to_string(r)?.as_bytes());
            h.update(b"\n");
        }
        self.body_sha256 = Some(hex::encode(h.finalize()));
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("manifest serializes")
    }
}

pub fn file_sha256(path: &Path) -> std::io::Result<String> {
    let mut r = BufReader::new(File::open(path)?);
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let k = r.read(&mut buf)?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Digest of everything after the first line, matching `body_sha256`.
pub fn body_sha256(path: &Path) -> std::io::Result<String> {
    let text = std::fs::read_to_string(path)?;
    let body = text.split_once('\n').map_or("", |x| x.1);
    Ok(hex::encode(Sha256::digest(body.as_bytes())))
}
