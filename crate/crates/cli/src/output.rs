use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::ConfigError;

/// A real number with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// What a suite produced: its tables and the verdict, if it asserts anything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub pass: Option<bool>,
    /// One-line human summary.
    pub summary: String,
}

/// One line of the cache file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub key: String,
    pub suite: String,
    pub input: Value,
    pub outcome: Outcome,
    pub wall_time_s: f64,
    pub node_evaluations: u64,
}

/// Content hash of the suite name and its resolved input.
pub fn input_key(suite: &str, input: &Value) -> String {
    let canonical = serde_json::to_string(&serde_json::json!({"suite": suite, "input": input})).expect("json");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn cache_lookup(path: &Path, key: &str) -> anyhow::Result<Option<ResultRecord>> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e).with_context(|| format!("opening cache {}", path.display())),
    };
    let mut found = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResultRecord = serde_json::from_str(&line)
            .map_err(|e| ConfigError(format!("cache {} line {}: {e}", path.display(), i + 1)))?;
        if rec.key == key {
            found = Some(rec);
        }
    }
    Ok(found)
}

pub fn cache_append(path: &Path, rec: &ResultRecord) -> anyhow::Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening cache {}", path.display()))?;
    writeln!(f, "{}", serde_json::to_string(rec)?)?;
    Ok(())
}

/// Writes the tables to stdout, or to `dir` with a manifest.
pub fn emit(rec: &ResultRecord, cache_hit: bool, nodes_this_run: u64, dir: Option<&Path>) -> anyhow::Result<()> {
    match dir {
        None => {
            let mut out = std::io::stdout().lock();
            for (i, t) in rec.outcome.tables.iter().enumerate() {
                if i > 0 {
                    writeln!(out, "\n# {}", t.name)?;
                }
                out.write_all(t.to_csv().as_bytes())?;
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for t in &rec.outcome.tables {
                fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
            }
            let manifest = serde_json::json!({
                "suite": rec.suite,
                "key": rec.key,
                "input": rec.input,
                "pass": rec.outcome.pass,
                "summary": rec.outcome.summary,
                "tables": rec.outcome.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
                "cache_hit": cache_hit,
                "node_evaluations": nodes_this_run,
                "wall_time_s": rec.wall_time_s,
            });
            fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
        }
    }
    Ok(())
}
