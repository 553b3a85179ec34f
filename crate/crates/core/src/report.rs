//! Run manifests and deterministic report files.
//!
//! A report is a JSON document `{ "manifest": ..., "body": ... }` plus an optional TSV
//! table. Maps are ordered and floats use the shortest round-trip representation, so
//! identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<InputRecord>,
    /// Every effective option, defaults included.
    pub config: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            tool: "symvqe".into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            inputs: Vec::new(),
            config: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    /// Record an input whose bytes were already read.
    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(InputRecord { path: path.display().to_string(), sha256: sha256_hex(bytes) });
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.into(), value.to_string());
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    manifest: &'a RunManifest,
    body: &'a T,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(manifest: &RunManifest, body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Document { manifest, body })?;
    s.push('\n');
    Ok(s)
}

/// Tab-separated table with a header row.
pub fn tsv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

/// Write `<stem>.json` and, when given, `<stem>.tsv` under `dir`. The manifest lists
/// both output paths before it is serialized; the TSV carries the manifest as
/// leading `#` comment lines.
pub fn write_report<T: Serialize>(
    dir: &Path,
    stem: &str,
    manifest: &mut RunManifest,
    body: &T,
    table: Option<&str>,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let json_path = dir.join(format!("{stem}.json"));
    let tsv_path = dir.join(format!("{stem}.tsv"));
    manifest.outputs.push(json_path.display().to_string());
    if table.is_some() {
        manifest.outputs.push(tsv_path.display().to_string());
    }
    std::fs::write(&json_path, to_json(manifest, body)?)?;
    let mut written = vec![json_path];
    if let Some(table) = table {
        let mut text = String::new();
        for line in serde_json::to_string(manifest)?.lines() {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(table);
        std::fs::write(&tsv_path, text)?;
        written.push(tsv_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn json_is_stable() {
        let mut m = RunManifest::new("pool-report");
        m.set("filter", "abelian");
        m.set("epsilon", 1e-8);
        let a = to_json(&m, &vec![0.1_f64, 2.0]).unwrap();
        let b = to_json(&m, &vec![0.1_f64, 2.0]).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"epsilon\": \"0.00000001\""));
        assert!(a.find("epsilon").unwrap() < a.find("filter").unwrap());
    }

    #[test]
    fn tsv_rows() {
        assert_eq!(tsv(&["a", "b"], &[vec!["1".into(), "2".into()]]), "a\tb\n1\t2\n");
    }
}
