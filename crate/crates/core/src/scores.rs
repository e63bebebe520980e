//! Score dump text format.
//!
//! One `node_id score` line per node in ascending id order. Scores use the
//! shortest representation that parses back to the same `f64`. Lines starting
//! with `#` are comments; `# key=value` comments carry provenance and are
//! returned by [`parse_dump`].

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreDump {
    /// Indexed by dense node id.
    pub scores: Vec<f64>,
    pub header: Vec<(String, String)>,
}

impl ScoreDump {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn format_dump(scores: &[f64], header: &[(&str, String)]) -> String {
    let mut out = String::with_capacity(scores.len() * 24);
    for (key, value) in header {
        let _ = writeln!(out, "# {key}={value}");
    }
    for (id, score) in scores.iter().enumerate() {
        let _ = writeln!(out, "{id} {score:?}");
    }
    out
}

/// Parses a dump whose ids form exactly `0..n`, in any order.
pub fn parse_dump(text: &str) -> Result<ScoreDump> {
    let mut header = Vec::new();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                if !k.contains(char::is_whitespace) {
                    header.push((k.to_string(), v.trim().to_string()));
                }
            }
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(id), Some(score), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::parse(lineno, "expected `node_id score`"));
        };
        let id: usize = id
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid node id `{id}`")))?;
        let score: f64 = score
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid score `{score}`")))?;
        entries.push((id, score));
    }
    entries.sort_by_key(|&(id, _)| id);
    for (expected, &(id, _)) in entries.iter().enumerate() {
        if id != expected {
            return Err(Error::parse(
                0,
                format!(
                    "node ids must cover 0..{} exactly; found {id} at position {expected}",
                    entries.len()
                ),
            ));
        }
    }
    Ok(ScoreDump {
        scores: entries.into_iter().map(|(_, s)| s).collect(),
        header,
    })
}
