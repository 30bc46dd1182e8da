//! Output files. CSV and SVG files open with a comment line, JSON files with a
//! `meta` object; both carry the artifact version and the config hash.
//! JSON keys come out sorted, so the files are byte-stable.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::AppError;
use crate::svg::LinePlot;

pub const ARTIFACT_VERSION: &str = concat!("kwc ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone)]
pub struct ArtifactWriter {
    dir: PathBuf,
    prefix: String,
    config_hash: String,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, prefix: &str, config_hash: &str) -> Result<Self, AppError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), prefix: prefix.to_string(), config_hash: config_hash.to_string(), written: Vec::new() })
    }

    pub fn header(&self) -> String {
        format!("{ARTIFACT_VERSION} config-sha256={}", self.config_hash)
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}_{suffix}", self.prefix))
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, path: PathBuf, bytes: &[u8]) -> Result<PathBuf, AppError> {
        std::fs::write(&path, bytes)?;
        log::info!("wrote {}", path.display());
        self.written.push(path.clone());
        Ok(path)
    }

    /// One serialized record per row, header row from the field names.
    pub fn csv<R: Serialize>(&mut self, suffix: &str, rows: impl IntoIterator<Item = R>) -> Result<PathBuf, AppError> {
        let mut buf = format!("# {}\n", self.header()).into_bytes();
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        self.put(self.path(suffix), &buf)
    }

    /// Pretty JSON of `payload` plus a `meta` object.
    pub fn json<T: Serialize>(&mut self, suffix: &str, payload: &T) -> Result<PathBuf, AppError> {
        let path = self.path(suffix);
        let bytes = self.json_bytes(payload)?;
        self.put(path, &bytes)
    }

    pub fn json_bytes<T: Serialize>(&self, payload: &T) -> Result<Vec<u8>, AppError> {
        let body = serde_json::to_value(payload).map_err(std::io::Error::other)?;
        let mut doc = serde_json::Map::new();
        doc.insert("meta".into(), json!({ "version": ARTIFACT_VERSION, "configHash": self.config_hash }));
        match body {
            Value::Object(m) => doc.extend(m),
            other => {
                doc.insert("value".into(), other);
            }
        }
        let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(std::io::Error::other)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn svg(&mut self, suffix: &str, plot: &LinePlot) -> Result<PathBuf, AppError> {
        let text = plot.render(Some(&self.header()));
        self.put(self.path(suffix), text.as_bytes())
    }

    /// `error.json` sits next to the other outputs without the prefix.
    pub fn error_json<T: Serialize>(&mut self, payload: &T) -> Result<PathBuf, AppError> {
        let bytes = self.json_bytes(payload)?;
        self.put(self.dir.join("error.json"), &bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        t: f64,
        #[serde(rename = "relaxedTotal")]
        relaxed_total: f64,
    }

    #[test]
    fn csv_has_header_comment_and_unix_newlines() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path(), "x", "abc").unwrap();
        let p = w.csv("energy.csv", [Row { t: 0.1, relaxed_total: 1.5e-7 }, Row { t: 0.2, relaxed_total: 2.0 }]).unwrap();
        let text = std::fs::read_to_string(p).unwrap();
        let expect = format!("# {ARTIFACT_VERSION} config-sha256=abc\nt,relaxedTotal\n0.1,1.5e-7\n0.2,2.0\n");
        assert_eq!(text, expect);
    }

    #[test]
    fn json_carries_meta() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path(), "x", "abc").unwrap();
        let p = w.json("t.json", &json!({"rho1": 3.5})).unwrap();
        let v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        assert_eq!(v["meta"]["configHash"], "abc");
        assert_eq!(v["rho1"], 3.5);
    }
}
