//! Per-release analysis windows.
//!
//! Release `r` (ordinal >= 2) owns the changes made after release `r-1` up to
//! and including its own tag time, and is scored against bug fixes landing in
//! the `post_days` that follow it.

use std::collections::{BTreeMap, BTreeSet};

use crate::ingest::{ChangeRecord, Release, SourceFilter};

pub const SECONDS_PER_DAY: i64 = 86_400;
pub const DEFAULT_POST_DAYS: u32 = 182;
pub const DEFAULT_MIN_FILES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ReleaseWindow {
    pub release: Release,
    /// Exclusive lower bound: the previous release's time.
    pub pre_start: i64,
    /// Inclusive upper bound: this release's time.
    pub pre_end: i64,
    pub post_end: i64,
    pub pre_records: Vec<ChangeRecord>,
    pub distinct_files: usize,
    /// The post horizon runs past the last mined commit.
    pub right_censored: bool,
}

impl ReleaseWindow {
    pub fn contains_pre(&self, t: i64) -> bool {
        self.pre_start < t && t <= self.pre_end
    }

    pub fn contains_post(&self, t: i64) -> bool {
        self.pre_end < t && t <= self.post_end
    }

    /// Distinct source files changed in the pre period, sorted.
    pub fn files(&self) -> BTreeSet<&str> {
        self.pre_records
            .iter()
            .map(|r| r.file_path.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefectCounts {
    pub per_file: BTreeMap<String, u64>,
}

impl DefectCounts {
    pub fn get(&self, file: &str) -> u64 {
        self.per_file.get(file).copied().unwrap_or(0)
    }
}

/// Builds one window per release after the first. Releases tagged at the
/// same instant as their predecessor have an empty pre period and are
/// skipped.
pub fn build_windows(
    releases: &[Release],
    records: &[ChangeRecord],
    post_days: u32,
    filter: &SourceFilter,
) -> Vec<ReleaseWindow> {
    // an empty tagged commit still shows the history reaches that far
    let history_end = records
        .iter()
        .map(|r| r.commit_time)
        .chain(releases.iter().map(|r| r.release_time))
        .max();
    let post_secs = i64::from(post_days) * SECONDS_PER_DAY;
    releases
        .windows(2)
        .filter(|pair| pair[0].release_time < pair[1].release_time)
        .map(|pair| {
            let (prev, rel) = (&pair[0], &pair[1]);
            let pre_start = prev.release_time;
            let pre_end = rel.release_time;
            let post_end = pre_end + post_secs;
            let pre_records: Vec<ChangeRecord> = records
                .iter()
                .filter(|r| pre_start < r.commit_time && r.commit_time <= pre_end)
                .filter(|r| filter.accepts(&r.file_path))
                .cloned()
                .collect();
            let distinct_files = pre_records
                .iter()
                .map(|r| r.file_path.as_str())
                .collect::<BTreeSet<_>>()
                .len();
            ReleaseWindow {
                release: rel.clone(),
                pre_start,
                pre_end,
                post_end,
                pre_records,
                distinct_files,
                right_censored: history_end.is_none_or(|t| t < post_end),
            }
        })
        .collect()
}

/// Counts bug-fix touches per file in the post horizon. Every pre-period file
/// is present, with zero when it saw no fixes.
pub fn count_post_defects(window: &ReleaseWindow, records: &[ChangeRecord]) -> DefectCounts {
    let mut per_file: BTreeMap<String, u64> = window
        .files()
        .into_iter()
        .map(|f| (f.to_string(), 0))
        .collect();
    for r in records
        .iter()
        .filter(|r| r.is_bug_fix && window.contains_post(r.commit_time))
    {
        *per_file.entry(r.file_path.clone()).or_insert(0) += 1;
    }
    DefectCounts { per_file }
}

pub fn qualify_window(window: &ReleaseWindow, min_files: usize) -> bool {
    window.distinct_files >= min_files
}
