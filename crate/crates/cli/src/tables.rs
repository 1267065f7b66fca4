//! Regenerates the verdict tables from a corpus directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::pipeline::{analyze, Analysis};
use crate::schema::CaseFile;
use crate::validate::Options;
use crate::{load_case, LoadError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowValues {
    pub ord_diff: Option<u32>,
    pub k: Option<u32>,
    pub m: Option<u32>,
    pub layer: Option<u32>,
    pub kind: Option<String>,
    pub a0: Vec<u64>,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub file: String,
    pub table: Option<String>,
    pub d: u64,
    pub computed: Option<RowValues>,
    pub expected: Option<RowValues>,
    pub mismatches: Vec<String>,
    pub error: Option<String>,
    /// The polynomial or field data the row was computed from.
    pub inputs: Vec<String>,
}

impl TableRow {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.mismatches.is_empty()
    }
}

fn row_values(case: &CaseFile, a: &Analysis) -> RowValues {
    RowValues {
        ord_diff: a.splitting.as_ref().map(|s| s.ord_diff),
        k: a.k,
        m: a.splitting.as_ref().map(|s| s.m),
        layer: a.tower.n1,
        kind: a.splitting.as_ref().map(|s| s.kind.clone()),
        a0: case.class_group_k.iter().map(|&e| case.p.pow(e)).collect(),
        verdict: a.verdict.cyclic.clone(),
    }
}

fn compare(computed: &RowValues, expected: &RowValues) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |name: &str, c: String, e: String, stated: bool| {
        if stated && c != e {
            out.push(format!("{name}: computed {c}, expected {e}"));
        }
    };
    let show = |x: Option<u32>| x.map_or("-".to_string(), |v| v.to_string());
    check("ord_diff", show(computed.ord_diff), show(expected.ord_diff), expected.ord_diff.is_some());
    check("k", show(computed.k), show(expected.k), expected.k.is_some());
    check("m", show(computed.m), show(expected.m), expected.m.is_some());
    check("layer", show(computed.layer), show(expected.layer), expected.layer.is_some());
    check(
        "kind",
        computed.kind.clone().unwrap_or_default(),
        expected.kind.clone().unwrap_or_default(),
        expected.kind.is_some(),
    );
    let mut ca = computed.a0.clone();
    let mut ea = expected.a0.clone();
    ca.sort_unstable();
    ea.sort_unstable();
    check("A0", format!("{ca:?}"), format!("{ea:?}"), !expected.a0.is_empty());
    check("verdict", computed.verdict.clone(), expected.verdict.clone(), true);
    out
}

fn inputs(case: &CaseFile) -> Vec<String> {
    let mut v = Vec::new();
    if let Some(f) = &case.iwasawa_poly {
        v.push(format!("f = S^2 + {}S + {} mod {}^{}", f.c1.0, f.c0.0, case.p, f.precision));
    }
    if let Some(f) = &case.extended_poly {
        v.push(format!("f = S^2 + {}S + {} mod {}^{}", f.c1.0, f.c0.0, case.p, f.precision));
    }
    if let Some(g) = &case.layer_defining_poly {
        v.push(format!("K_1^an: {g}"));
    }
    v
}

pub fn table_row(file: &Path, opts: &Options) -> TableRow {
    let name = file.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let case = match load_case(file) {
        Ok(c) => c,
        Err(e) => {
            return TableRow {
                file: name,
                table: None,
                d: 0,
                computed: None,
                expected: None,
                mismatches: Vec::new(),
                error: Some(e.to_string()),
                inputs: Vec::new(),
            }
        }
    };
    let expected = case.expected.as_ref().map(|e| RowValues {
        ord_diff: e.ord_diff,
        k: e.k,
        m: e.m,
        layer: e.layer,
        kind: e.kind.clone(),
        a0: e.a0.clone(),
        verdict: e.verdict.clone(),
    });
    let mut row = TableRow {
        file: name,
        table: case.expected.as_ref().and_then(|e| e.table.clone()),
        d: case.d,
        computed: None,
        expected,
        mismatches: Vec::new(),
        error: None,
        inputs: inputs(&case),
    };
    match analyze(&case, opts) {
        Ok(a) => {
            let c = row_values(&case, &a);
            if let Some(e) = &row.expected {
                row.mismatches = compare(&c, e);
            }
            row.computed = Some(c);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub fn case_files(dir: &Path) -> Result<Vec<PathBuf>, LoadError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| LoadError::Io(dir.display().to_string(), e))? {
        let path = entry.map_err(|e| LoadError::Io(dir.display().to_string(), e))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// All rows, in table order and then by `d`.
pub fn regenerate_tables(dir: &Path, opts: &Options) -> Result<Vec<TableRow>, LoadError> {
    let files = case_files(dir)?;
    let mut rows: Vec<TableRow> = files.par_iter().map(|f| table_row(f, opts)).collect();
    rows.sort_by(|a, b| (a.table.is_none(), &a.table, a.d, &a.file).cmp(&(b.table.is_none(), &b.table, b.d, &b.file)));
    Ok(rows)
}

fn cell(x: Option<u32>) -> String {
    x.map_or("?".into(), |v| v.to_string())
}

pub fn render(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let mut current: Option<Option<String>> = None;
    for row in rows {
        if current.as_ref() != Some(&row.table) {
            let title = row.table.as_deref().map_or("Examples".to_string(), |t| format!("Table {t}"));
            let _ = writeln!(out, "\n{title}");
            let _ = writeln!(out, "{:>7}  {:>8}  {:>2}  {:>2}  {:>8}  {:>10}  {:>8}  {:<12}  status", "d", "ord_diff", "k", "m", "L cap K~", "E/Q_p", "A0", "X");
            current = Some(row.table.clone());
        }
        match (&row.computed, &row.error) {
            (Some(c), _) => {
                let a0 = c.a0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                let _ = writeln!(
                    out,
                    "{:>7}  {:>8}  {:>2}  {:>2}  {:>8}  {:>10}  {:>8}  {:<12}  {}",
                    row.d,
                    cell(c.ord_diff),
                    cell(c.k),
                    cell(c.m),
                    c.layer.map_or("?".into(), |n| if n == 0 { "K".into() } else { format!("K_{n}^an") }),
                    c.kind.as_deref().unwrap_or("?"),
                    format!("({a0})"),
                    c.verdict,
                    if row.mismatches.is_empty() { "ok".into() } else { format!("MISMATCH {}", row.mismatches.join("; ")) }
                );
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "{:>7}  ERROR {e}", row.d);
            }
            (None, None) => {}
        }
        for i in &row.inputs {
            let _ = writeln!(out, "{:>7}    {i}", "");
        }
    }
    out
}
