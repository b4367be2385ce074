//! Line-oriented helpers for the ASCII formats.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Writes reals in shortest round-trip form separated by spaces.
pub fn push_reals(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v:?}");
    }
    out.push('\n');
}

pub struct LineReader<'a> {
    lines: Vec<&'a str>,
    at: usize,
    path: PathBuf,
}

impl<'a> LineReader<'a> {
    pub fn new(text: &'a str, path: &Path) -> Self {
        LineReader { lines: text.lines().collect(), at: 0, path: path.to_path_buf() }
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::Format { path: self.path.clone(), line: self.at, msg: msg.into() }
    }

    pub fn line_number(&self) -> usize {
        self.at
    }

    pub fn next_line(&mut self) -> Result<&'a str> {
        let l = self.lines.get(self.at).copied().ok_or_else(|| {
            Error::Format { path: self.path.clone(), line: self.at + 1, msg: "unexpected end of file".into() }
        })?;
        self.at += 1;
        Ok(l)
    }

    /// Next line split as `keyword rest...`; fails if the keyword differs.
    pub fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self.next_line()?;
        let mut it = line.split_whitespace();
        match it.next() {
            Some(k) if k == key => Ok(it.collect()),
            _ => Err(self.error(format!("expected `{key}`, found `{line}`"))),
        }
    }

    pub fn reals(&self, tokens: &[&str], n: usize) -> Result<Vec<f64>> {
        if tokens.len() != n {
            return Err(self.error(format!("expected {n} values, found {}", tokens.len())));
        }
        tokens.iter().map(|t| t.parse::<f64>().map_err(|_| self.error(format!("bad number `{t}`")))).collect()
    }

    pub fn real_line(&mut self, n: usize) -> Result<Vec<f64>> {
        let line = self.next_line()?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        self.reals(&tokens, n)
    }

    pub fn count(&self, tokens: &[&str]) -> Result<usize> {
        match tokens {
            [t] => t.parse().map_err(|_| self.error(format!("bad count `{t}`"))),
            _ => Err(self.error("expected a single count")),
        }
    }

    /// Collects raw lines up to (not including) `end`.
    pub fn until(&mut self, end: &str) -> Result<Vec<&'a str>> {
        let mut out = Vec::new();
        loop {
            let l = self.next_line()?;
            if l.trim() == end {
                return Ok(out);
            }
            out.push(l);
        }
    }
}
