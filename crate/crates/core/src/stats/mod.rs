//! Nonparametric statistics: rank correlation, effect size, bootstrap
//! testing and Scott-Knott ranking.

mod correlation;
mod effect;
mod scott_knott;

pub use correlation::{rank_with_ties, spearman, Correlation, EXACT_P_MAX_N};
pub use effect::{a12, bootstrap_different, BOOTSTRAP_ALPHA};
pub use scott_knott::{
    keep_split, scott_knott, split_gain, RankedGroup, RankedTreatment, ScottKnottConfig, Treatment,
};

/// Linear-interpolation quantile of sorted data (the common "type 7" rule).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(values: &[f64]) -> f64 {
    quantile_sorted(&sorted(values), 0.5)
}

/// Q3 - Q1.
pub fn iqr(values: &[f64]) -> f64 {
    let s = sorted(values);
    quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
