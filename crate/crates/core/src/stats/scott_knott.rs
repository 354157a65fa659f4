//! Scott-Knott ranking with a bootstrap + A12 split test.
//!
//! Treatments are sorted by median, then the list is split recursively at
//! the cut that maximizes the expected change in mean,
//!
//! ```text
//! E = |m|/|l| * (mean(m) - mean(l))^2 + |n|/|l| * (mean(n) - mean(l))^2
//! ```
//!
//! computed over the pooled measurements on each side. A cut is kept only if
//! the two sides differ under the bootstrap test and their A12 effect is at
//! least the configured threshold in either direction.

use super::{a12, bootstrap_different, iqr, median};

#[derive(Debug, Clone, PartialEq)]
pub struct Treatment {
    pub label: String,
    pub measurements: Vec<f64>,
}

impl Treatment {
    pub fn new(label: impl Into<String>, measurements: Vec<f64>) -> Self {
        Treatment {
            label: label.into(),
            measurements,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedTreatment {
    pub label: String,
    pub median: f64,
    pub iqr: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedGroup {
    /// 1 holds the lowest medians.
    pub rank: usize,
    pub treatments: Vec<RankedTreatment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScottKnottConfig {
    pub bootstrap_iterations: usize,
    pub a12_threshold: f64,
    pub seed: u64,
}

impl Default for ScottKnottConfig {
    fn default() -> Self {
        ScottKnottConfig {
            bootstrap_iterations: 512,
            a12_threshold: 0.56,
            seed: 0,
        }
    }
}

/// Bootstrap seed for the sublist `[lo, hi)` of the median-sorted order, so
/// that any evaluation of the same sublist draws the same replicates.
fn derive_seed(seed: u64, lo: usize, hi: usize) -> u64 {
    let mut z = seed ^ ((lo as u64) << 32 | hi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Split acceptance for the sublist `[lo, hi)` with pooled sides
/// `left`/`right`.
pub fn keep_split(cfg: &ScottKnottConfig, lo: usize, hi: usize, left: &[f64], right: &[f64]) -> bool {
    let a = a12(right, left);
    let effect = a.max(1.0 - a);
    effect >= cfg.a12_threshold
        && bootstrap_different(left, right, cfg.bootstrap_iterations, derive_seed(cfg.seed, lo, hi))
}

/// Expected change in mean for a cut, from side sizes and sums.
pub fn split_gain(left_n: f64, left_sum: f64, right_n: f64, right_sum: f64) -> f64 {
    let total_n = left_n + right_n;
    let mu = (left_sum + right_sum) / total_n;
    let mu_l = left_sum / left_n;
    let mu_r = right_sum / right_n;
    left_n / total_n * (mu_l - mu).powi(2) + right_n / total_n * (mu_r - mu).powi(2)
}

/// Index of the first cut whose gain is within a relative 1e-9 of the best,
/// so near-ties resolve the same way regardless of summation order.
pub(crate) fn best_cut(gains: &[(usize, f64)]) -> Option<usize> {
    let best = gains.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * best.abs().max(f64::MIN_POSITIVE);
    gains.iter().find(|g| g.1 >= best - tol).map(|g| g.0)
}

struct Sorted<'a> {
    items: Vec<&'a Treatment>,
    /// prefix[i] = (count, sum) over items[..i]
    prefix: Vec<(f64, f64)>,
}

impl<'a> Sorted<'a> {
    fn new(treatments: &'a [Treatment]) -> Self {
        let mut keyed: Vec<(f64, &Treatment)> = treatments
            .iter()
            .filter(|t| !t.measurements.is_empty())
            .map(|t| (median(&t.measurements), t))
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.label.cmp(&b.1.label)));
        let items: Vec<&Treatment> = keyed.into_iter().map(|(_, t)| t).collect();
        let mut prefix = vec![(0.0, 0.0)];
        for t in &items {
            let (c, s) = *prefix.last().unwrap();
            prefix.push((
                c + t.measurements.len() as f64,
                s + t.measurements.iter().sum::<f64>(),
            ));
        }
        Sorted { items, prefix }
    }

    fn pooled(&self, lo: usize, hi: usize) -> Vec<f64> {
        self.items[lo..hi]
            .iter()
            .flat_map(|t| t.measurements.iter().copied())
            .collect()
    }

    fn split(&self, cfg: &ScottKnottConfig, lo: usize, hi: usize, groups: &mut Vec<(usize, usize)>) {
        if hi - lo >= 2 {
            let range = |a: usize, b: usize| {
                (self.prefix[b].0 - self.prefix[a].0, self.prefix[b].1 - self.prefix[a].1)
            };
            let gains: Vec<(usize, f64)> = (lo + 1..hi)
                .map(|cut| {
                    let (ln, ls) = range(lo, cut);
                    let (rn, rs) = range(cut, hi);
                    (cut, split_gain(ln, ls, rn, rs))
                })
                .collect();
            let cut = best_cut(&gains).expect("at least one cut");
            if keep_split(cfg, lo, hi, &self.pooled(lo, cut), &self.pooled(cut, hi)) {
                self.split(cfg, lo, cut, groups);
                self.split(cfg, cut, hi, groups);
                return;
            }
        }
        groups.push((lo, hi));
    }
}

/// Ranks treatments into statistically distinct groups. Treatments without
/// measurements are ignored.
pub fn scott_knott(treatments: &[Treatment], cfg: &ScottKnottConfig) -> Vec<RankedGroup> {
    let sorted = Sorted::new(treatments);
    if sorted.items.is_empty() {
        return Vec::new();
    }
    let mut spans = Vec::new();
    sorted.split(cfg, 0, sorted.items.len(), &mut spans);
    spans
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi))| RankedGroup {
            rank: i + 1,
            treatments: sorted.items[lo..hi]
                .iter()
                .map(|t| RankedTreatment {
                    label: t.label.clone(),
                    median: median(&t.measurements),
                    iqr: iqr(&t.measurements),
                    n: t.measurements.len(),
                })
                .collect(),
        })
        .collect()
}
