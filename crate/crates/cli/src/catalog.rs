//! Append-only JSONL results catalog.
//!
//! One self-contained JSON record per line; records wrap each command's
//! payload with schema/version/timestamp bookkeeping. The file is only ever
//! appended to.

use anyhow::Context;
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable naming the default catalog path.
pub const CATALOG_ENV: &str = "MORTAL_CATALOG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Rys,
    Shortest,
    Construct,
    Verify,
}

#[derive(Debug, Serialize)]
pub struct CatalogRecord {
    pub schema_version: u32,
    pub kind: RecordKind,
    pub q: u64,
    pub n: usize,
    pub elapsed_ms: u64,
    pub tool_version: &'static str,
    /// UTC, RFC 3339.
    pub timestamp: String,
    pub payload: serde_json::Value,
}

impl CatalogRecord {
    pub fn new(
        kind: RecordKind,
        q: u64,
        n: usize,
        elapsed_ms: u64,
        payload: serde_json::Value,
    ) -> CatalogRecord {
        CatalogRecord {
            schema_version: mortal_core::CATALOG_SCHEMA_VERSION,
            kind,
            q,
            n,
            elapsed_ms,
            tool_version: mortal_core::VERSION,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            payload,
        }
    }
}

/// Resolves the catalog path: explicit flag first, then the environment.
pub fn resolve_path(flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone().or_else(|| std::env::var_os(CATALOG_ENV).map(PathBuf::from))
}

/// Appends one record as a single JSON line.
pub fn append(path: &Path, record: &CatalogRecord) -> anyhow::Result<()> {
    let line = serde_json::to_string(record).expect("records serialize");
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening catalog {}", path.display()))?;
    writeln!(file, "{line}").with_context(|| format!("appending to {}", path.display()))?;
    Ok(())
}
