//! Bug-fixing commit (BFC) labeling from commit messages.
//!
//! A message is a fix when any of its tokens starts with one of the keyword
//! stems. Tokens are maximal runs of alphanumeric characters after
//! lowercasing, so `fix-crash` yields `fix` and `crash`, and `prefix` never
//! matches the stem `fix`.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Stems whose word derivatives mark a commit as bug-fixing.
pub const DEFAULT_STEMS: [&str; 29] = [
    "bug",
    "fix",
    "issu",
    "error",
    "correct",
    "proper",
    "deprecat",
    "broke",
    "optimize",
    "patch",
    "solve",
    "slow",
    "obsolete",
    "vulnerab",
    "debug",
    "perf",
    "memory",
    "minor",
    "wart",
    "better",
    "complex",
    "break",
    "investigat",
    "compile",
    "defect",
    "inconsist",
    "crash",
    "problem",
    "resol",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordSet {
    stems: Vec<String>,
}

impl Default for KeywordSet {
    fn default() -> Self {
        KeywordSet {
            stems: DEFAULT_STEMS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl KeywordSet {
    /// Builds a set from arbitrary stems. Each stem must be nonempty,
    /// lowercase and free of whitespace; duplicates are dropped keeping the
    /// first occurrence.
    pub fn new<I, S>(stems: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for stem in stems {
            let stem = stem.as_ref();
            if stem.is_empty() {
                return Err(Error::config("keywords", "empty stem"));
            }
            if stem.chars().any(char::is_whitespace) {
                return Err(Error::config(
                    "keywords",
                    format!("stem {stem:?} contains whitespace"),
                ));
            }
            if stem.to_lowercase() != stem {
                return Err(Error::config(
                    "keywords",
                    format!("stem {stem:?} is not lowercase"),
                ));
            }
            if !out.iter().any(|s| s == stem) {
                out.push(stem.to_string());
            }
        }
        if out.is_empty() {
            return Err(Error::config("keywords", "keyword set is empty"));
        }
        Ok(KeywordSet { stems: out })
    }

    /// Reads a keyword file, one stem per line. Blank lines and lines
    /// starting with `#` are ignored; stems are lowercased. With `extend`
    /// the stems are appended to the defaults instead of replacing them.
    pub fn from_file(path: &Path, extend: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file_stems = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase);
        if extend {
            let defaults = DEFAULT_STEMS.iter().map(|s| s.to_string());
            KeywordSet::new(defaults.chain(file_stems))
        } else {
            KeywordSet::new(file_stems)
        }
    }

    pub fn stems(&self) -> &[String] {
        &self.stems
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub is_bug_fix: bool,
    /// Matched stems in lexicographic order.
    pub matched: Vec<String>,
}

pub fn tokenize(message: &str) -> impl Iterator<Item = String> + '_ {
    message
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

pub fn classify_message(message: &str, keywords: &KeywordSet) -> Classification {
    let mut matched = BTreeSet::new();
    for token in tokenize(message) {
        for stem in &keywords.stems {
            if token.starts_with(stem.as_str()) {
                matched.insert(stem.clone());
            }
        }
    }
    Classification {
        is_bug_fix: !matched.is_empty(),
        matched: matched.into_iter().collect(),
    }
}

pub fn is_bug_fix(message: &str, keywords: &KeywordSet) -> bool {
    let stems = &keywords.stems;
    tokenize(message).any(|t| stems.iter().any(|s| t.starts_with(s.as_str())))
}
