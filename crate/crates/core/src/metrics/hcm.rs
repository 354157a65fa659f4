//! History complexity: decayed sum of normalized change entropies.

use std::collections::BTreeMap;

use crate::windowing::{ReleaseWindow, SECONDS_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcmConfig {
    pub period_days: u32,
    /// Exponential decay per period of age; ln 2 halves the weight each step.
    pub decay_rate: f64,
}

impl Default for HcmConfig {
    fn default() -> Self {
        HcmConfig {
            period_days: 14,
            decay_rate: std::f64::consts::LN_2,
        }
    }
}

/// Splits `(start, end]` into fixed-width periods, or two equal halves when
/// the span is shorter than one period. Returns the period count and a
/// mapping from timestamp to 1-based period index (1 = oldest).
fn periods(start: i64, end: i64, period_secs: i64) -> (usize, impl Fn(i64) -> usize) {
    let len = end - start;
    let halves = len < period_secs;
    let count = if halves {
        2
    } else {
        ((len + period_secs - 1) / period_secs) as usize
    };
    let index = move |t: i64| {
        let offset = t - start;
        if halves {
            if 2 * offset <= len {
                1
            } else {
                2
            }
        } else {
            ((offset + period_secs - 1) / period_secs) as usize
        }
    };
    (count, index)
}

/// Shannon entropy (base 2) of the change distribution, divided by
/// log2 of the number of files. A single file gives zero.
pub(crate) fn normalized_entropy<'a>(counts: impl IntoIterator<Item = &'a u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().copied().filter(|&c| c > 0).collect();
    if counts.len() <= 1 {
        return 0.0;
    }
    let total: u64 = counts.iter().sum();
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    h / (counts.len() as f64).log2()
}

pub fn history_complexity(window: &ReleaseWindow, cfg: &HcmConfig) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    if window.pre_records.is_empty() {
        return out;
    }
    let period_secs = i64::from(cfg.period_days.max(1)) * SECONDS_PER_DAY;
    let (count, index) = periods(window.pre_start, window.pre_end, period_secs);

    let mut changes: Vec<BTreeMap<&str, u64>> = vec![BTreeMap::new(); count];
    for r in &window.pre_records {
        let j = index(r.commit_time);
        *changes[j - 1].entry(r.file_path.as_str()).or_insert(0) += 1;
    }
    for (j0, period) in changes.iter().enumerate() {
        if period.is_empty() {
            continue;
        }
        let entropy = normalized_entropy(period.values());
        let age = (count - 1 - j0) as f64;
        let weight = (-cfg.decay_rate * age).exp();
        for file in period.keys() {
            *out.entry(file.to_string()).or_insert(0.0) += weight * entropy;
        }
    }
    out
}
