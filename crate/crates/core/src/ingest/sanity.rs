use std::fmt;

use super::ProjectSummary;

pub const MIN_COMMITS: usize = 1000;
pub const MIN_BUG_FIX_FRACTION: f64 = 0.10;
pub const MIN_RELEASES: usize = 5;
pub const MIN_DEVELOPERS: usize = 30;
pub const MIN_ACTIVE_YEARS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SanityRule {
    TooFewCommits,
    TooFewBugFixes,
    TooFewReleases,
    TooFewDevelopers,
    TooShortActivity,
}

impl fmt::Display for SanityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SanityRule::TooFewCommits => "commits < 1000",
            SanityRule::TooFewBugFixes => "bug-fix fraction < 10%",
            SanityRule::TooFewReleases => "releases < 5",
            SanityRule::TooFewDevelopers => "developers < 30",
            SanityRule::TooShortActivity => "active years < 3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SanityVerdict {
    pub violated: Vec<SanityRule>,
}

impl SanityVerdict {
    pub fn passed(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Project-level cleaning rules; each threshold is inclusive.
pub fn apply_sanity_checks(summary: &ProjectSummary) -> SanityVerdict {
    let mut violated = Vec::new();
    if summary.commit_count < MIN_COMMITS {
        violated.push(SanityRule::TooFewCommits);
    }
    if summary.bug_fix_fraction < MIN_BUG_FIX_FRACTION {
        violated.push(SanityRule::TooFewBugFixes);
    }
    if summary.release_count < MIN_RELEASES {
        violated.push(SanityRule::TooFewReleases);
    }
    if summary.developer_count < MIN_DEVELOPERS {
        violated.push(SanityRule::TooFewDevelopers);
    }
    if summary.active_years < MIN_ACTIVE_YEARS {
        violated.push(SanityRule::TooShortActivity);
    }
    SanityVerdict { violated }
}
