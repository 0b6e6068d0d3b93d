//! CSV and JSON emission with atomic writes.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Key/value pairs describing a run, rendered as the first CSV line and as
/// the `meta` object of the JSON mirror.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub fields: Vec<(String, String)>,
}

impl RunMeta {
    pub fn new(config_bytes: &[u8], seed: Option<u64>) -> Self {
        let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        RunMeta {
            fields: vec![
                ("tool".into(), TOOL.into()),
                ("version".into(), VERSION.into()),
                ("config_sha256".into(), sha256_hex(config_bytes)),
                ("seed".into(), seed),
            ],
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    pub fn header_line(&self) -> String {
        let body: Vec<String> = self.fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# {}\n", body.join(" "))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map = self
            .fields
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Renders a metadata line followed by a header row and data rows.
pub fn render_csv(meta: &RunMeta, header: &[String], rows: &[Vec<String>]) -> io::Result<Vec<u8>> {
    let mut buf = meta.header_line().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

pub fn render_json(meta: &RunMeta, key: &str, payload: serde_json::Value) -> io::Result<Vec<u8>> {
    let mut doc = serde_json::Map::new();
    doc.insert("meta".into(), meta.to_json());
    doc.insert(key.into(), payload);
    let mut out = serde_json::to_vec_pretty(&serde_json::Value::Object(doc))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_starts_with_metadata() {
        let meta = RunMeta::new(b"{}", Some(5)).with("w", 0.0);
        let out = render_csv(&meta, &["a".into(), "b".into()], &[vec!["1".into(), "".into()]])
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        let first = lines.next().unwrap();
        assert!(first.starts_with("# tool=dmqkd version="));
        assert!(first.ends_with("seed=5 w=0"));
        assert_eq!(num(2f64.powi(-48)), "3.552713678800501e-15");
        assert_eq!(lines.next(), Some("a,b"));
        assert_eq!(lines.next(), Some("1,"));
    }
}
