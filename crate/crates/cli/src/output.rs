//! Artifact emission. Every file starts with a provenance record naming the
//! tool version and the configuration hash.

use crate::config::RunConfig;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TOOL: &str = "cuspsum";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: String,
}

impl Provenance {
    pub fn of(cfg: &RunConfig) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config: cfg.hash(),
        }
    }

    /// Comment line heading CSV and zero-table files.
    pub fn comment(&self) -> String {
        format!("# {} {} config={}\n", self.tool, self.version, self.config)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    payload: &'a T,
}

/// Pretty JSON with the provenance record as the first key.
pub fn json_document<T: Serialize>(prov: &Provenance, payload: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { provenance: prov, payload })?;
    s.push('\n');
    Ok(s)
}

/// A CSV or zero-table body with the provenance comment prepended.
pub fn text_document(prov: &Provenance, body: &[u8]) -> Vec<u8> {
    let mut out = prov.comment().into_bytes();
    out.extend_from_slice(body);
    out
}

/// Writes to `path` under the output directory, or to stdout. Returns the
/// path written.
pub fn emit(cfg: &RunConfig, path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<Option<PathBuf>> {
    match path {
        Some(p) => {
            let full = cfg.out_path(p);
            if let Some(dir) = full.parent() {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&full, bytes)?;
            Ok(Some(full))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[derive(Serialize)]
    struct Payload {
        zeta: u32,
        alpha: u32,
    }

    #[test]
    fn provenance_leads_json_and_keeps_field_order() {
        let prov = Provenance::of(&RunConfig::default());
        let doc = json_document(&prov, &Payload { zeta: 1, alpha: 2 }).unwrap();
        let first_key = doc.lines().nth(1).unwrap().trim();
        assert!(first_key.starts_with("\"provenance\""));
        assert!(doc.find("zeta").unwrap() < doc.find("alpha").unwrap());
        let v: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["provenance"]["config"], prov.config);
    }

    #[test]
    fn csv_header_line() {
        let prov = Provenance::of(&RunConfig::default());
        let doc = text_document(&prov, b"n,a\n1,1\n");
        let text = String::from_utf8(doc).unwrap();
        assert!(text.starts_with("# cuspsum "));
        assert_eq!(text.lines().nth(1), Some("n,a"));
    }
}
