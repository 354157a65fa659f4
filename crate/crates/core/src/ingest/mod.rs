//! Change history extraction and project-level cleaning.

mod cache;
mod git;
mod sanity;
mod source;

use serde::{Deserialize, Serialize};

pub use cache::{read_history, read_releases, write_history, write_releases};
pub use git::{extract_history, extract_releases, ExtractOptions, History};
pub use sanity::{apply_sanity_checks, SanityRule, SanityVerdict};
pub use source::{is_source_file, SourceFilter, DEFAULT_EXTENSIONS};

/// One (commit, file) modification event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub commit_id: String,
    pub commit_time: i64,
    pub author: String,
    pub file_path: String,
    pub insertions: u64,
    pub deletions: u64,
    pub is_bug_fix: bool,
}

impl ChangeRecord {
    pub fn churn(&self) -> u64 {
        self.insertions + self.deletions
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Release {
    pub tag_name: String,
    pub release_time: i64,
    pub ordinal: usize,
}

/// Sorts tags by (time, name) and assigns 1-based ordinals. The result does
/// not depend on the input order.
pub fn order_releases(tags: impl IntoIterator<Item = (String, i64)>) -> Vec<Release> {
    let mut tags: Vec<(String, i64)> = tags.into_iter().collect();
    tags.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    tags.into_iter()
        .enumerate()
        .map(|(i, (tag_name, release_time))| Release {
            tag_name,
            release_time,
            ordinal: i + 1,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSummary {
    pub commit_count: usize,
    pub bug_fix_fraction: f64,
    pub release_count: usize,
    pub developer_count: usize,
    pub active_years: f64,
}

const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

impl ProjectSummary {
    pub fn from_history(records: &[ChangeRecord], releases: &[Release]) -> Self {
        use std::collections::{BTreeMap, BTreeSet};

        let mut commits: BTreeMap<&str, bool> = BTreeMap::new();
        let mut authors = BTreeSet::new();
        let mut first = i64::MAX;
        let mut last = i64::MIN;
        for r in records {
            *commits.entry(r.commit_id.as_str()).or_insert(false) |= r.is_bug_fix;
            authors.insert(r.author.as_str());
            first = first.min(r.commit_time);
            last = last.max(r.commit_time);
        }
        let commit_count = commits.len();
        let fixes = commits.values().filter(|f| **f).count();
        ProjectSummary {
            commit_count,
            bug_fix_fraction: if commit_count == 0 {
                0.0
            } else {
                fixes as f64 / commit_count as f64
            },
            release_count: releases.len(),
            developer_count: authors.len(),
            active_years: if commit_count == 0 {
                0.0
            } else {
                (last - first) as f64 / SECONDS_PER_YEAR
            },
        }
    }
}
