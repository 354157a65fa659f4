use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mean;

pub const BOOTSTRAP_ALPHA: f64 = 0.05;

/// Vargha-Delaney A12: the probability that a value drawn from `m` exceeds
/// one drawn from `n`, counting ties as half.
pub fn a12(m: &[f64], n: &[f64]) -> f64 {
    assert!(!m.is_empty() && !n.is_empty(), "a12 needs nonempty samples");
    let mut greater: u64 = 0;
    let mut ties: u64 = 0;
    for x in m {
        for y in n {
            if x > y {
                greater += 1;
            } else if x == y {
                ties += 1;
            }
        }
    }
    // (greater + ties/2) / (|m||n|) with an integer numerator
    (2 * greater + ties) as f64 / (2 * m.len() * n.len()) as f64
}

fn resampled_mean(rng: &mut ChaCha8Rng, data: &[f64]) -> f64 {
    let total: f64 = (0..data.len())
        .map(|_| data[rng.random_range(0..data.len())])
        .sum();
    total / data.len() as f64
}

/// Bootstrap test on the difference of means.
///
/// Both samples are shifted onto the pooled mean so the null hypothesis
/// holds, then resampled `iterations` times. The samples differ when
/// replicates at least as extreme as the observed |mean difference| make up
/// less than [`BOOTSTRAP_ALPHA`] of the draws.
pub fn bootstrap_different(m: &[f64], n: &[f64], iterations: usize, seed: u64) -> bool {
    assert!(!m.is_empty() && !n.is_empty(), "bootstrap needs nonempty samples");
    let (mu_m, mu_n) = (mean(m), mean(n));
    let pooled = (m.iter().sum::<f64>() + n.iter().sum::<f64>()) / (m.len() + n.len()) as f64;
    let observed = (mu_m - mu_n).abs();
    let m0: Vec<f64> = m.iter().map(|v| v - mu_m + pooled).collect();
    let n0: Vec<f64> = n.iter().map(|v| v - mu_n + pooled).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0usize;
    for _ in 0..iterations {
        let d = (resampled_mean(&mut rng, &m0) - resampled_mean(&mut rng, &n0)).abs();
        if d >= observed {
            extreme += 1;
        }
    }
    (extreme as f64) < BOOTSTRAP_ALPHA * iterations as f64
}
