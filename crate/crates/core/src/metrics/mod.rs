//! Belief metrics computed over one release window, each paired with the
//! post-release defect counts of the same entities.
//!
//! Entities are files (sorted by path) for every belief except B5, whose
//! entities are pre-release commits ordered by (time, id).

mod hcm;

use std::collections::{BTreeMap, BTreeSet};

use crate::belief::BeliefId;
use crate::windowing::{DefectCounts, ReleaseWindow};

pub use hcm::{history_complexity, HcmConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefVector {
    pub belief: BeliefId,
    pub entity_ids: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<u64>,
}

impl BeliefVector {
    fn from_files(
        belief: BeliefId,
        values: BTreeMap<&str, f64>,
        defects: &DefectCounts,
    ) -> Self {
        let mut v = BeliefVector {
            belief,
            entity_ids: Vec::with_capacity(values.len()),
            x: Vec::with_capacity(values.len()),
            y: Vec::with_capacity(values.len()),
        };
        for (file, x) in values {
            v.entity_ids.push(file.to_string());
            v.x.push(x);
            v.y.push(defects.get(file));
        }
        v
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn y_f64(&self) -> Vec<f64> {
        self.y.iter().map(|&v| v as f64).collect()
    }

    pub fn value_of(&self, entity: &str) -> Option<f64> {
        self.entity_ids
            .iter()
            .position(|e| e == entity)
            .map(|i| self.x[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChurnDirection {
    Added,
    Removed,
}

/// Minor contributors own strictly less than this share of a file's churn.
pub const MINOR_CONTRIBUTOR_SHARE: f64 = 0.05;

fn per_file<F>(window: &ReleaseWindow, mut fold: F) -> BTreeMap<&str, f64>
where
    F: FnMut(Option<f64>, &crate::ingest::ChangeRecord) -> Option<f64>,
{
    let mut out: BTreeMap<&str, f64> = BTreeMap::new();
    for r in &window.pre_records {
        let prev = out.get(r.file_path.as_str()).copied();
        match fold(prev, r) {
            Some(v) => {
                out.insert(r.file_path.as_str(), v);
            }
            None => {
                out.remove(r.file_path.as_str());
            }
        }
    }
    out
}

pub fn metric_b1_hcm(window: &ReleaseWindow, defects: &DefectCounts, cfg: &HcmConfig) -> BeliefVector {
    let values = history_complexity(window, cfg);
    let values = values.iter().map(|(f, v)| (f.as_str(), *v)).collect();
    BeliefVector::from_files(BeliefId::B1, values, defects)
}

pub fn metric_b2_developers(window: &ReleaseWindow, defects: &DefectCounts) -> BeliefVector {
    let mut authors: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in &window.pre_records {
        authors
            .entry(r.file_path.as_str())
            .or_default()
            .insert(r.author.as_str());
    }
    let values = authors
        .into_iter()
        .map(|(f, a)| (f, a.len() as f64))
        .collect();
    BeliefVector::from_files(BeliefId::B2, values, defects)
}

/// Lines added (B3) or removed (B9) per file.
pub fn metric_churn(
    window: &ReleaseWindow,
    defects: &DefectCounts,
    direction: ChurnDirection,
) -> BeliefVector {
    let belief = match direction {
        ChurnDirection::Added => BeliefId::B3,
        ChurnDirection::Removed => BeliefId::B9,
    };
    let values = per_file(window, |acc, r| {
        let lines = match direction {
            ChurnDirection::Added => r.insertions,
            ChurnDirection::Removed => r.deletions,
        };
        Some(acc.unwrap_or(0.0) + lines as f64)
    });
    BeliefVector::from_files(belief, values, defects)
}

/// Latest change time per file (B4), or latest bug-fix time (B6). Files
/// never fixed in the pre period are left out of B6.
pub fn metric_recency(window: &ReleaseWindow, defects: &DefectCounts, fixes_only: bool) -> BeliefVector {
    let belief = if fixes_only { BeliefId::B6 } else { BeliefId::B4 };
    let mut latest: BTreeMap<&str, f64> = BTreeMap::new();
    for r in window
        .pre_records
        .iter()
        .filter(|r| !fixes_only || r.is_bug_fix)
    {
        let t = r.commit_time as f64;
        latest
            .entry(r.file_path.as_str())
            .and_modify(|v| *v = v.max(t))
            .or_insert(t);
    }
    BeliefVector::from_files(belief, latest, defects)
}

/// Per commit: total churn of its source files against the summed defect
/// counts of those files. A file shared by two commits counts for both.
pub fn metric_b5_commit_churn(window: &ReleaseWindow, defects: &DefectCounts) -> BeliefVector {
    let mut commits: BTreeMap<(i64, &str), (u64, u64)> = BTreeMap::new();
    for r in &window.pre_records {
        let e = commits
            .entry((r.commit_time, r.commit_id.as_str()))
            .or_insert((0, 0));
        e.0 += r.churn();
        e.1 += defects.get(&r.file_path);
    }
    let mut v = BeliefVector {
        belief: BeliefId::B5,
        entity_ids: Vec::with_capacity(commits.len()),
        x: Vec::with_capacity(commits.len()),
        y: Vec::with_capacity(commits.len()),
    };
    for ((_, id), (churn, fd)) in commits {
        v.entity_ids.push(id.to_string());
        v.x.push(churn as f64);
        v.y.push(fd);
    }
    v
}

/// Bug-fix touches (B7) or all touches (B8) per file. Zero fixes is a value.
pub fn metric_counts(window: &ReleaseWindow, defects: &DefectCounts, fixes_only: bool) -> BeliefVector {
    let belief = if fixes_only { BeliefId::B7 } else { BeliefId::B8 };
    let values = per_file(window, |acc, r| {
        let hit = if !fixes_only || r.is_bug_fix { 1.0 } else { 0.0 };
        Some(acc.unwrap_or(0.0) + hit)
    });
    BeliefVector::from_files(belief, values, defects)
}

/// Percentage of a file's contributors whose churn share is below 5%.
pub fn metric_b10_minor_share(window: &ReleaseWindow, defects: &DefectCounts) -> BeliefVector {
    let mut churn: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for r in &window.pre_records {
        *churn
            .entry(r.file_path.as_str())
            .or_default()
            .entry(r.author.as_str())
            .or_insert(0) += r.churn();
    }
    let values = churn
        .into_iter()
        .map(|(file, by_author)| {
            let total: u64 = by_author.values().sum();
            if total == 0 {
                return (file, 0.0);
            }
            // share < 5%  <=>  20 * author_churn < total, kept in integers
            let minors = by_author.values().filter(|&&c| 20 * c < total).count();
            (file, 100.0 * minors as f64 / by_author.len() as f64)
        })
        .collect();
    BeliefVector::from_files(BeliefId::B10, values, defects)
}

pub fn compute(
    belief: BeliefId,
    window: &ReleaseWindow,
    defects: &DefectCounts,
    hcm: &HcmConfig,
) -> BeliefVector {
    match belief {
        BeliefId::B1 => metric_b1_hcm(window, defects, hcm),
        BeliefId::B2 => metric_b2_developers(window, defects),
        BeliefId::B3 => metric_churn(window, defects, ChurnDirection::Added),
        BeliefId::B4 => metric_recency(window, defects, false),
        BeliefId::B5 => metric_b5_commit_churn(window, defects),
        BeliefId::B6 => metric_recency(window, defects, true),
        BeliefId::B7 => metric_counts(window, defects, true),
        BeliefId::B8 => metric_counts(window, defects, false),
        BeliefId::B9 => metric_churn(window, defects, ChurnDirection::Removed),
        BeliefId::B10 => metric_b10_minor_share(window, defects),
    }
}

/// All ten vectors, in belief order.
pub fn compute_all(window: &ReleaseWindow, defects: &DefectCounts, hcm: &HcmConfig) -> Vec<BeliefVector> {
    BeliefId::ALL
        .iter()
        .map(|&b| compute(b, window, defects, hcm))
        .collect()
}
