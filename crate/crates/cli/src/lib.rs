//! Case files, the analysis pipeline and table regeneration on top of
//! `iwasawa-cyc-core`.

pub mod pipeline;
pub mod schema;
pub mod tables;
pub mod validate;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

pub use pipeline::{analyze, classify, Analysis, PipelineError};
pub use schema::CaseFile;
pub use validate::{validate, Options, Violation};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Parse(String, #[source] serde_json::Error),
}

pub fn load_case(path: &Path) -> Result<CaseFile, LoadError> {
    let text = fs::read_to_string(path).map_err(|e| LoadError::Io(path.display().to_string(), e))?;
    CaseFile::from_json(&text).map_err(|e| LoadError::Parse(path.display().to_string(), e))
}

/// Plain-text report of one analysis.
pub fn render_analysis(a: &Analysis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "d = {}, p = {}", a.d, a.p);
    for line in &a.trace {
        let _ = writeln!(out, "  {line}");
    }
    let v = &a.verdict;
    let _ = write!(out, "verdict: {}", v.cyclic);
    if let Some(c) = &v.fired_case {
        let _ = write!(out, " ({c})");
    }
    if let Some(n) = v.generator_count {
        let _ = write!(out, ", generators: {n}");
    }
    out.push('\n');
    if !v.needs.is_empty() {
        let _ = writeln!(out, "would settle it: {}", v.needs.join("; "));
    }
    out
}
