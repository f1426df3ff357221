//! Competency-question files and the suite runner.
//!
//! A `.cq` file has three parts:
//!
//! ```text
//! id: 1(e)
//! question: What is the production (batch size) of a specific extruder model?
//! ---
//! SELECT ?value WHERE { ... }
//! --- expected
//! [{ "value": 500 }]
//! ```
//!
//! Expected rows are matched against the result as a multiset. A cell is
//! matched by its JSON form: `"<iri>"` or a CURIE with a known prefix is an
//! IRI, `"_:"` any blank node, a number compares numerically, a boolean
//! compares with `xsd:boolean`, `null` means unbound, and any other string
//! is a literal's lexical form.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use extrucat_core::rdf::{Graph, PrefixMap, Term};
use extrucat_core::sparql::{evaluate, parse_query, Query, Row};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum CqError {
    #[error("{file}: {message}")]
    Malformed { file: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct CqFile {
    pub file: String,
    pub id: String,
    pub question: String,
    pub query_text: String,
    pub query: Query,
    pub expected: Vec<BTreeMap<String, Value>>,
}

fn malformed(file: &str, message: impl Into<String>) -> CqError {
    CqError::Malformed {
        file: file.to_owned(),
        message: message.into(),
    }
}

pub fn parse_cq(file: &str, text: &str) -> Result<CqFile, CqError> {
    let text = text.replace("\r\n", "\n");
    let (front, rest) =
        split_line(&text, "---").ok_or_else(|| malformed(file, "missing '---' after the front matter"))?;
    let (query_text, expected) =
        split_line(rest, "--- expected").ok_or_else(|| malformed(file, "missing '--- expected' section"))?;

    let mut fields = BTreeMap::new();
    for line in front
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| malformed(file, format!("front matter line without a key: {line}")))?;
        fields.insert(k.trim().to_owned(), v.trim().to_owned());
    }
    let id = fields
        .remove("id")
        .ok_or_else(|| malformed(file, "front matter needs 'id'"))?;
    let question = fields
        .remove("question")
        .ok_or_else(|| malformed(file, "front matter needs 'question'"))?;
    if let Some(key) = fields.keys().next() {
        return Err(malformed(file, format!("unknown front matter key '{key}'")));
    }

    let query = parse_query(query_text).map_err(|e| malformed(file, format!("query: {e}")))?;
    let rows: Vec<BTreeMap<String, Value>> =
        serde_json::from_str(expected).map_err(|e| malformed(file, format!("expected rows: {e}")))?;
    Ok(CqFile {
        file: file.to_owned(),
        id,
        question,
        query_text: query_text.trim().to_owned(),
        query,
        expected: rows,
    })
}

/// Splits at the first line equal to `marker`.
fn split_line<'a>(text: &'a str, marker: &str) -> Option<(&'a str, &'a str)> {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.trim_end() == marker {
            return Some((&text[..offset], &text[offset + line.len()..]));
        }
        offset += line.len();
    }
    None
}

/// Every `*.cq` file in `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<CqFile>, CqError> {
    let io = |source| CqError::Io {
        path: dir.to_owned(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cq"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|source| CqError::Io {
                path: p.clone(),
                source,
            })?;
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            parse_cq(&name, &text)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Iri(String),
    AnyBlank,
    Number(f64),
    Bool(bool),
    Lexical(String),
    Unbound,
}

impl Cell {
    fn from_json(value: &Value, prefixes: &PrefixMap) -> Cell {
        match value {
            Value::Null => Cell::Unbound,
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => Cell::Number(n.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) if s.starts_with('<') && s.ends_with('>') => Cell::Iri(s[1..s.len() - 1].to_owned()),
            Value::String(s) if s.starts_with("_:") => Cell::AnyBlank,
            Value::String(s) => match prefixes.expand_curie(s).filter(|_| !s.contains(' ')) {
                Some(iri) => Cell::Iri(iri),
                None => Cell::Lexical(s.clone()),
            },
            other => Cell::Lexical(other.to_string()),
        }
    }

    fn matches(&self, term: Option<&Term>) -> bool {
        match (self, term) {
            (Cell::Unbound, None) => true,
            (_, None) | (Cell::Unbound, Some(_)) => false,
            (Cell::Iri(i), Some(t)) => t.as_iri() == Some(i),
            (Cell::AnyBlank, Some(t)) => t.is_blank(),
            (Cell::Number(n), Some(t)) => {
                t.is_literal() && t.as_f64().is_some_and(|v| (v - n).abs() <= 1e-9 * n.abs().max(1.0))
            }
            (Cell::Bool(b), Some(t)) => t.is_literal() && t.as_bool() == Some(*b),
            (Cell::Lexical(s), Some(t)) => t.is_literal() && t.value_str() == s,
        }
    }
}

fn render(term: Option<&Term>) -> String {
    match term {
        None => "unbound".into(),
        Some(t) if t.is_iri() => format!("<{}>", t.value_str()),
        Some(t) if t.is_blank() => format!("_:{}", t.value_str()),
        Some(t) => format!("{:?}", t.value_str()),
    }
}

fn render_row(vars: &[String], row: &Row) -> String {
    let cells: Vec<String> = vars.iter().map(|v| format!("{v}={}", render(row.get(v)))).collect();
    format!("{{{}}}", cells.join(", "))
}

#[derive(Debug, Clone)]
pub struct CqOutcome {
    pub id: String,
    pub file: String,
    pub question: String,
    pub elapsed: Duration,
    /// `+` lines are unexpected rows, `-` lines missing ones.
    pub diff: Vec<String>,
}

impl CqOutcome {
    pub fn passed(&self) -> bool {
        self.diff.is_empty()
    }
}

/// Runs one question and diffs its rows against the expected ones.
pub fn run_cq(graph: &Graph, cq: &CqFile) -> CqOutcome {
    let started = Instant::now();
    let solution = evaluate(graph, &cq.query);
    let elapsed = started.elapsed();

    let mut prefixes = PrefixMap::catalogue_defaults();
    for (p, ns) in cq.query.prefixes.iter() {
        prefixes.insert(p, ns);
    }
    let vars = solution.vars.clone();
    let expected: Vec<Vec<(String, Cell)>> = cq
        .expected
        .iter()
        .map(|row| {
            vars.iter()
                .map(|v| {
                    (
                        v.clone(),
                        row.get(v).map_or(Cell::Unbound, |j| Cell::from_json(j, &prefixes)),
                    )
                })
                .collect()
        })
        .collect();

    let mut diff = Vec::new();
    for row in &cq.expected {
        for key in row.keys().filter(|k| !vars.contains(k)) {
            diff.push(format!("! expected column ?{key} is not selected"));
        }
    }
    // Each cell names one value or "any blank node", so greedy matching
    // finds a full matching whenever one exists.
    let mut unmatched: Vec<&Row> = solution.rows.iter().collect();
    for (i, want) in expected.iter().enumerate() {
        let hit = unmatched
            .iter()
            .position(|row| want.iter().all(|(v, cell)| cell.matches(row.get(v))));
        match hit {
            Some(pos) => {
                unmatched.swap_remove(pos);
            }
            None => diff.push(format!(
                "- {}",
                serde_json::to_string(&cq.expected[i]).unwrap_or_default()
            )),
        }
    }
    for row in unmatched {
        diff.push(format!("+ {}", render_row(&vars, row)));
    }
    CqOutcome {
        id: cq.id.clone(),
        file: cq.file.clone(),
        question: cq.question.clone(),
        elapsed,
        diff,
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub outcomes: Vec<CqOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CqOutcome::passed)
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed()).count()
    }
}

pub fn run_suite(graph: &Graph, files: &[CqFile]) -> SuiteReport {
    SuiteReport {
        outcomes: files.iter().map(|cq| run_cq(graph, cq)).collect(),
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.outcomes.iter().map(|o| o.id.len()).max().unwrap_or(0);
        for o in &self.outcomes {
            let status = if o.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status} CQ {:<width$} {:>8.2} ms  {}",
                o.id,
                o.elapsed.as_secs_f64() * 1000.0,
                o.question
            )?;
            for line in &o.diff {
                writeln!(f, "       {line}")?;
            }
        }
        write!(f, "{} questions, {} failed", self.outcomes.len(), self.failures())
    }
}
