use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Largest sample for which the permutation p-value is enumerated.
pub const EXACT_P_MAX_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn rank_with_ties(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson's coefficient over average ranks.
///
/// A constant input yields rho = 0 and p = 1. With `exact_p` and
/// n <= [`EXACT_P_MAX_N`] the two-sided p-value comes from enumerating all
/// n! pairings; otherwise from the t distribution with n - 2 degrees of
/// freedom.
pub fn spearman(x: &[f64], y: &[f64], exact_p: bool) -> Result<Correlation> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::Contract(format!(
            "spearman needs equal lengths, got {} and {}",
            n,
            y.len()
        )));
    }
    if n < 2 {
        return Err(Error::Contract(format!(
            "spearman needs at least 2 observations, got {n}"
        )));
    }
    let rx = rank_with_ties(x);
    let ry = rank_with_ties(y);
    let Some(rho) = pearson(&rx, &ry) else {
        return Ok(Correlation {
            rho: 0.0,
            p_value: 1.0,
            n,
        });
    };
    let p_value = if exact_p && n <= EXACT_P_MAX_N {
        permutation_p(&rx, &ry)
    } else {
        t_approx_p(rho, n)
    };
    Ok(Correlation { rho, p_value, n })
}

fn t_approx_p(rho: f64, n: usize) -> f64 {
    if n <= 2 {
        return 1.0;
    }
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

/// Share of the n! pairings of the ranks whose |rho| is at least the
/// observed one. Doubled average ranks are integers, so the comparison is
/// done exactly on the centered cross-product.
fn permutation_p(rx: &[f64], ry: &[f64]) -> f64 {
    let n = rx.len();
    let a: Vec<i64> = rx.iter().map(|r| (2.0 * r).round() as i64).collect();
    let mut b: Vec<i64> = ry.iter().map(|r| (2.0 * r).round() as i64).collect();
    let n_i = n as i64;
    let offset = n_i * (n_i + 1) * (n_i + 1);
    let centered = |b: &[i64]| -> i64 {
        let s: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (s - offset).abs()
    };
    let observed = centered(&b);

    // Heap's algorithm, iterative form
    let mut hits: u64 = u64::from(centered(&b) >= observed);
    let mut total: u64 = 1;
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                b.swap(0, i);
            } else {
                b.swap(c[i], i);
            }
            total += 1;
            if centered(&b) >= observed {
                hits += 1;
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}
