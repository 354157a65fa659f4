//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines show up in `cargo test` output.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use belief_miner::analysis::{
    assess_project, filter_score, score_windows, support_label, AssessConfig, Rejection, SupportLabel,
    SupportScore,
};
use belief_miner::ingest::{extract_history, extract_releases, ChangeRecord, ExtractOptions, Release};
use belief_miner::metrics::{compute_all, history_complexity, HcmConfig};
use belief_miner::stats::{a12, keep_split, scott_knott, spearman, split_gain, ScottKnottConfig, Treatment};
use belief_miner::synthgen::{generate, ScenarioSpec};
use belief_miner::windowing::{DefectCounts, ReleaseWindow, SECONDS_PER_DAY};
use belief_miner::BeliefId;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

// ---------------------------------------------------------------- oracles

/// Average ranks by counting: rank = #less + (#equal + 1) / 2.
fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|a| {
            let less = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Raw Pearson with the textbook formula; None on zero variance.
fn oracle_pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let saa: f64 = a.iter().map(|x| x * x).sum();
    let sbb: f64 = b.iter().map(|y| y * y).sum();
    let num = n * sab - sa * sb;
    let den = ((n * saa - sa * sa) * (n * sbb - sb * sb)).sqrt();
    (den > 0.0).then(|| num / den)
}

fn oracle_rho(x: &[f64], y: &[f64]) -> f64 {
    oracle_pearson(&oracle_ranks(x), &oracle_ranks(y)).unwrap_or(0.0)
}

/// Two-sided permutation p by recursive enumeration of every pairing, with
/// rho recomputed in floating point for each.
fn oracle_enumerated_p(x: &[f64], y: &[f64]) -> f64 {
    fn walk(rx: &[f64], ry: &mut Vec<f64>, k: usize, observed: f64, hits: &mut u64, total: &mut u64) {
        if k == ry.len() {
            *total += 1;
            let r = oracle_pearson(rx, ry).unwrap_or(0.0);
            if r.abs() >= observed - 1e-9 {
                *hits += 1;
            }
            return;
        }
        for i in k..ry.len() {
            ry.swap(k, i);
            walk(rx, ry, k + 1, observed, hits, total);
            ry.swap(k, i);
        }
    }
    let rx = oracle_ranks(x);
    let mut ry = oracle_ranks(y);
    let Some(observed) = oracle_pearson(&rx, &ry) else {
        return 1.0;
    };
    let (mut hits, mut total) = (0, 0);
    walk(&rx, &mut ry, 0, observed.abs(), &mut hits, &mut total);
    hits as f64 / total as f64
}

/// Exact two-sided permutation p from the distribution of the doubled-rank
/// cross product, built by dynamic programming over subsets of y positions.
fn oracle_subset_dp_p(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let doubled = |v: &[f64]| -> Vec<i64> { oracle_ranks(v).iter().map(|r| (2.0 * r) as i64).collect() };
    let (a, b) = (doubled(x), doubled(y));
    if a.iter().all(|&v| v == a[0]) || b.iter().all(|&v| v == b[0]) {
        return 1.0;
    }
    let mean = (n * (n + 1) * (n + 1)) as i64;
    let observed = (a.iter().zip(&b).map(|(p, q)| p * q).sum::<i64>() - mean).abs();

    let mut layer: HashMap<u32, HashMap<i64, u64>> = HashMap::from([(0, HashMap::from([(0, 1)]))]);
    for &ai in &a {
        let mut next: HashMap<u32, HashMap<i64, u64>> = HashMap::new();
        for (mask, dist) in &layer {
            for (j, &bj) in b.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let slot = next.entry(mask | (1 << j)).or_default();
                for (&s, &c) in dist {
                    *slot.entry(s + ai * bj).or_insert(0) += c;
                }
            }
        }
        layer = next;
    }
    let dist = &layer[&((1u32 << n) - 1)];
    let total: u64 = dist.values().sum();
    let hits: u64 = dist
        .iter()
        .filter(|(s, _)| (**s - mean).abs() >= observed)
        .map(|(_, c)| c)
        .sum();
    hits as f64 / total as f64
}

fn oracle_a12(m: &[f64], n: &[f64]) -> f64 {
    let mut score = 0.0;
    for x in m {
        for y in n {
            if x > y {
                score += 1.0;
            } else if x == y {
                score += 0.5;
            }
        }
    }
    score / (m.len() * n.len()) as f64
}

fn oracle_median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let h = s.len() / 2;
    if s.len() % 2 == 1 {
        s[h]
    } else {
        (s[h - 1] + s[h]) / 2.0
    }
}

/// Scott-Knott by trying every contiguous cut of each sublist and scoring it
/// from the pooled measurements directly.
fn oracle_scott_knott(treatments: &[Treatment], cfg: &ScottKnottConfig) -> Vec<Vec<String>> {
    let mut items: Vec<&Treatment> = treatments.iter().filter(|t| !t.measurements.is_empty()).collect();
    items.sort_by(|a, b| {
        oracle_median(&a.measurements)
            .total_cmp(&oracle_median(&b.measurements))
            .then_with(|| a.label.cmp(&b.label))
    });
    let pooled = |lo: usize, hi: usize| -> Vec<f64> {
        items[lo..hi].iter().flat_map(|t| t.measurements.clone()).collect()
    };
    let mut groups = Vec::new();
    let mut stack = vec![(0, items.len())];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo >= 2 {
            let gains: Vec<(usize, f64)> = (lo + 1..hi)
                .map(|cut| {
                    let (l, r) = (pooled(lo, cut), pooled(cut, hi));
                    let gain = split_gain(l.len() as f64, l.iter().sum(), r.len() as f64, r.iter().sum());
                    (cut, gain)
                })
                .collect();
            let best = gains.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-9 * best.abs().max(f64::MIN_POSITIVE);
            let cut = gains.iter().find(|g| g.1 >= best - tol).unwrap().0;
            if keep_split(cfg, lo, hi, &pooled(lo, cut), &pooled(cut, hi)) {
                // right pushed first so the left half is emitted first
                stack.push((cut, hi));
                stack.push((lo, cut));
                continue;
            }
        }
        groups.push(items[lo..hi].iter().map(|t| t.label.clone()).collect());
    }
    groups
}

// ---------------------------------------------------------------- helpers

fn random_pair(rng: &mut ChaCha8Rng, n: usize, levels: u32) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..levels))).collect();
    let slope = rng.random_range(-1.0..1.0);
    let y: Vec<f64> = x
        .iter()
        .map(|v| (slope * v + rng.random_range(0.0..f64::from(levels))).round())
        .collect();
    (x, y)
}

fn record(id: usize, time: i64, author: &str, file: &str, ins: u64, del: u64, fix: bool) -> ChangeRecord {
    ChangeRecord {
        commit_id: format!("{id:040x}"),
        commit_time: time,
        author: author.to_string(),
        file_path: file.to_string(),
        insertions: ins,
        deletions: del,
        is_bug_fix: fix,
    }
}

fn window(pre_start: i64, pre_end: i64, pre_records: Vec<ChangeRecord>) -> ReleaseWindow {
    let distinct_files = pre_records
        .iter()
        .map(|r| r.file_path.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    ReleaseWindow {
        release: Release {
            tag_name: "v2".to_string(),
            release_time: pre_end,
            ordinal: 2,
        },
        pre_start,
        pre_end,
        post_end: pre_end + 182 * SECONDS_PER_DAY,
        pre_records,
        distinct_files,
        right_censored: false,
    }
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

// ---------------------------------------------------------------- criteria

fn spearman_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let n = rng.random_range(4..=50);
        // few levels so duplicates are common
        let levels = rng.random_range(2..=n as u32);
        let (x, y) = random_pair(&mut rng, n, levels);
        let got = spearman(&x, &y, false).map_err(|e| e.to_string())?.rho;
        let diff = (got - oracle_rho(&x, &y)).abs();
        worst = worst.max(diff);
        check(diff <= 1e-12, || format!("pair {i} (n={n}): |diff| = {diff:e}"))?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("1000 pairs, max |diff| {worst:.1e}, {:.2?}", start.elapsed()))
}

fn exact_p_values() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_exact: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=7 {
        for _ in 0..40 {
            let levels = rng.random_range(2..=10);
            let (x, y) = random_pair(&mut rng, n, levels);
            let got = spearman(&x, &y, true).map_err(|e| e.to_string())?.p_value;
            let want = oracle_enumerated_p(&x, &y);
            let diff = (got - want).abs();
            worst_exact = worst_exact.max(diff);
            check(diff <= 1e-9, || format!("n={n} x={x:?} y={y:?}: exact {got} vs oracle {want}"))?;
            cases += 1;
        }
    }
    // the two independent exact routes must agree where both are cheap
    for _ in 0..20 {
        let (x, y) = random_pair(&mut rng, 7, 6);
        let (e, d) = (oracle_enumerated_p(&x, &y), oracle_subset_dp_p(&x, &y));
        check((e - d).abs() <= 1e-12, || format!("oracles disagree on {x:?} {y:?}: {e} vs {d}"))?;
    }
    let mut worst_t: f64 = 0.0;
    for i in 0..200 {
        let n = rng.random_range(8..=12);
        let (x, y) = random_pair(&mut rng, n, 1000);
        let t = spearman(&x, &y, false).map_err(|e| e.to_string())?.p_value;
        let exact = oracle_subset_dp_p(&x, &y);
        let diff = (t - exact).abs();
        worst_t = worst_t.max(diff);
        check(diff <= 0.05, || format!("pair {i} (n={n}): t-approx {t:.4} vs exact {exact:.4}"))?;
    }
    Ok(format!(
        "{cases} exact cases max |diff| {worst_exact:.1e}; 200 t-approx pairs max |diff| {worst_t:.4}"
    ))
}

fn a12_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..500 {
        let (lm, ln) = (rng.random_range(1..=30), rng.random_range(1..=30));
        let levels = rng.random_range(1..=20);
        let m: Vec<f64> = (0..lm).map(|_| f64::from(rng.random_range(0..levels))).collect();
        let n: Vec<f64> = (0..ln).map(|_| f64::from(rng.random_range(0..levels))).collect();
        let (got, want) = (a12(&m, &n), oracle_a12(&m, &n));
        check(got == want, || format!("pair {i}: a12 {got} vs oracle {want}"))?;
        let sum = a12(&m, &n) + a12(&n, &m);
        check(sum == 1.0, || format!("pair {i}: a12(m,n) + a12(n,m) = {sum}"))?;
    }
    Ok("500 pairs exact, symmetry exact".to_string())
}

fn scott_knott_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut splits = 0;
    for i in 0..200 {
        let k = rng.random_range(1..=5);
        let treatments: Vec<Treatment> = (0..k)
            .map(|t| {
                let len = rng.random_range(1..=20);
                let shift = f64::from(rng.random_range(0..4)) * 0.3;
                let m = (0..len).map(|_| (shift + rng.random_range(0.0..1.0) * 100.0).round() / 100.0).collect();
                Treatment::new(format!("T{t}"), m)
            })
            .collect();
        let cfg = ScottKnottConfig {
            seed: i,
            ..ScottKnottConfig::default()
        };
        let got: Vec<Vec<String>> = scott_knott(&treatments, &cfg)
            .iter()
            .map(|g| g.treatments.iter().map(|t| t.label.clone()).collect())
            .collect();
        let want = oracle_scott_knott(&treatments, &cfg);
        check(got == want, || format!("instance {i}: {got:?} vs oracle {want:?}"))?;
        splits += want.len() - 1;
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("200 instances identical ({splits} kept splits), {:.2?}", start.elapsed()))
}

fn planted_recovery() -> Outcome {
    let start = Instant::now();
    let cfg = AssessConfig::default();
    let window_rhos = |spec: &ScenarioSpec| -> Result<Vec<Vec<(f64, f64)>>, String> {
        let s = generate(spec).map_err(|e| e.to_string())?;
        let (_, scored) = score_windows(&s.records, &s.releases, &cfg);
        Ok(scored
            .iter()
            .map(|sw| {
                sw.vectors
                    .iter()
                    .map(|v| match spearman(&v.x, &v.y_f64(), cfg.exact_p) {
                        Ok(c) => (c.rho, c.p_value),
                        Err(_) => (0.0, 1.0),
                    })
                    .collect()
            })
            .collect())
    };

    let planted = ScenarioSpec {
        releases: 101,
        planted_belief: Some(BeliefId::B3),
        planted_strength: 0.7,
        noise_seed: 5,
        ..ScenarioSpec::default()
    };
    let per_window = window_rhos(&planted)?;
    check(per_window.len() == 100, || format!("{} planted windows, expected 100", per_window.len()))?;
    let b3: Vec<f64> = per_window.iter().map(|w| w[BeliefId::B3.index()].0).collect();
    let med = oracle_median(&b3);
    check((0.6..=0.8).contains(&med), || format!("planted B3 median rho {med:.3}"))?;

    let null = ScenarioSpec {
        releases: 201,
        noise_seed: 6,
        ..ScenarioSpec::default()
    };
    let per_window = window_rhos(&null)?;
    check(per_window.len() == 200, || format!("{} null windows, expected 200", per_window.len()))?;
    let mut shares = Vec::new();
    for b in BeliefId::ALL {
        let sig = per_window.iter().filter(|w| w[b.index()].1 < 0.01).count();
        let share = sig as f64 / per_window.len() as f64;
        check(share <= 0.08, || format!("null {b}: {sig}/200 significant"))?;
        shares.push(format!("{b} {:.1}%", 100.0 * share));
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "planted B3 median rho {med:.3}; null significant shares {}; {:.2?}",
        shares.join(", "),
        start.elapsed()
    ))
}

fn filter_fidelity() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let repo = common::build_fixture(&tmp.path().join("repo"));
    let history = extract_history(&repo, &ExtractOptions::default()).map_err(|e| e.to_string())?;
    let releases = extract_releases(&repo).map_err(|e| e.to_string())?;
    let cfg = AssessConfig::default();
    let (a, scored) = assess_project("fixture", &history.records, &releases, &cfg);

    // windows with fewer than 3 distinct files are never scored
    let sizes: Vec<(usize, bool)> = a.windows.iter().map(|w| (w.distinct_files, w.qualified)).collect();
    check(sizes == [(3, true), (4, true), (1, false), (2, false)], || format!("window sizes {sizes:?}"))?;
    check(scored.len() == 2, || format!("{} scored windows", scored.len()))?;

    for pop in &a.populations {
        check(pop.scores.is_empty(), || format!("{} kept a score", pop.belief))?;
        let e = pop.exclusions;
        check(e.not_qualified == 2, || format!("{}: {e:?}", pop.belief))?;
        // every scored vector either has n < 4 or a p-value of at least 0.01
        for sw in &scored {
            let v = &sw.vectors[pop.belief.index()];
            if v.len() >= 4 {
                let p = spearman(&v.x, &v.y_f64(), true).map_err(|e| e.to_string())?.p_value;
                check(p >= 0.01, || format!("{} window {} p {p}", pop.belief, sw.info.release_ordinal))?;
            }
        }
        check(e.too_few_observations + e.not_significant == 2, || format!("{}: {e:?}", pop.belief))?;
    }
    let b3 = &a.populations[BeliefId::B3.index()].exclusions;
    check(b3.too_few_observations == 1 && b3.not_significant == 1, || format!("B3 {b3:?}"))?;

    let score = |n: usize, p: f64| SupportScore {
        belief: BeliefId::B3,
        release_ordinal: 2,
        release_time: 1,
        distinct_files: n,
        rho: 0.9,
        p_value: p,
        n,
    };
    check(filter_score(score(3, 0.0), 0.01, 4) == Err(Rejection::TooFew), || "n = 3 kept".into())?;
    check(filter_score(score(4, 0.0099), 0.01, 4).is_ok(), || "n = 4, p = 0.0099 dropped".into())?;
    check(
        filter_score(score(4, 0.01), 0.01, 4) == Err(Rejection::NotSignificant),
        || "p = 0.01 kept".into(),
    )?;
    Ok("D_F 1, 2 excluded; n = 3 excluded; p >= 0.01 excluded".to_string())
}

fn label_boundaries() -> Outcome {
    use SupportLabel::*;
    let probes = [
        (0.39, NoSupport),
        (0.40, Weak),
        (0.49, Weak),
        (0.50, Support),
        (0.59, Support),
        (0.60, Strong),
        (0.69, Strong),
        (0.70, VeryStrong),
    ];
    for (rho, want) in probes {
        for signed in [rho, -rho] {
            let got = support_label(signed);
            check(got == want, || format!("{signed}: {got} vs {want}"))?;
        }
    }
    Ok("8 probes, both signs".to_string())
}

fn hcm_cases() -> Outcome {
    let day = SECONDS_PER_DAY;
    let cfg = HcmConfig::default();
    let t0 = 1_000_000_000;
    let files = ["a.py", "b.py", "c.py", "d.py"];

    let single = window(t0, t0 + 14 * day, vec![
        record(1, t0 + day, "x", "a.py", 3, 0, false),
        record(2, t0 + 2 * day, "x", "a.py", 1, 1, false),
    ]);
    let uniform: Vec<ChangeRecord> =
        files.iter().enumerate().map(|(i, f)| record(i, t0 + day, "x", f, 1, 0, false)).collect();
    let current = window(t0, t0 + 14 * day, uniform.clone());
    // same changes, then one empty period before the release
    let aged = window(t0, t0 + 28 * day, uniform);

    let cases: [(&str, &ReleaseWindow, &[&str], f64); 3] = [
        ("single file", &single, &["a.py"], 0.0),
        ("uniform 4 files", &current, &files, 1.0),
        ("one period old", &aged, &files, 0.5),
    ];
    for (name, w, expect_files, want) in cases {
        let h = history_complexity(w, &cfg);
        check(h.len() == expect_files.len(), || format!("{name}: {h:?}"))?;
        for f in expect_files {
            let got = h[*f];
            check((got - want).abs() <= 1e-12, || format!("{name}: {f} = {got}, expected {want}"))?;
        }
    }
    Ok("0, 1, 0.5 within 1e-12".to_string())
}

fn metric_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let day = SECONDS_PER_DAY;
    let hcm = HcmConfig::default();
    let authors = ["ann", "ben", "cy", "dee", "eve"];
    let mut checked = 0usize;
    for i in 0..1000 {
        let pre_start = 1_000_000_000 + i64::from(rng.random_range(0..1000)) * day;
        let len = i64::from(rng.random_range(1..=120)) * day;
        let n_files = rng.random_range(1..=12);
        let commits = rng.random_range(1..=40);
        let mut records = Vec::new();
        for c in 0..commits {
            let t = pre_start + rng.random_range(1..=len);
            let author = authors[rng.random_range(0..authors.len())];
            let fix = rng.random_bool(0.3);
            let touched = rng.random_range(1..=n_files.min(4));
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..touched {
                let f = rng.random_range(0..n_files);
                if seen.insert(f) {
                    let ins = rng.random_range(0..200);
                    let del = rng.random_range(0..100);
                    records.push(record(c, t, author, &format!("src/f{f}.py"), ins, del, fix));
                }
            }
        }
        let w = window(pre_start, pre_start + len, records);
        let defects = DefectCounts {
            per_file: w.files().into_iter().map(|f| (f.to_string(), rng.random_range(0..5))).collect(),
        };
        let v = compute_all(&w, &defects, &hcm);
        let get = |b: BeliefId, f: &str| v[b.index()].value_of(f);
        for f in w.files() {
            let churn: u64 = w.pre_records.iter().filter(|r| r.file_path == f).map(|r| r.churn()).sum();
            let b7 = get(BeliefId::B7, f).unwrap_or(0.0);
            let b8 = get(BeliefId::B8, f).ok_or_else(|| format!("window {i}: no B8 for {f}"))?;
            check(b7 <= b8, || format!("window {i} {f}: B7 {b7} > B8 {b8}"))?;
            if let (Some(b4), Some(b6)) = (get(BeliefId::B4, f), get(BeliefId::B6, f)) {
                check(b4 >= b6, || format!("window {i} {f}: B4 {b4} < B6 {b6}"))?;
            }
            let b3 = get(BeliefId::B3, f).unwrap_or(0.0);
            let b9 = get(BeliefId::B9, f).unwrap_or(0.0);
            check(b3 + b9 == churn as f64, || format!("window {i} {f}: B3 {b3} + B9 {b9} != {churn}"))?;
            let b10 = get(BeliefId::B10, f).ok_or_else(|| format!("window {i}: no B10 for {f}"))?;
            check((0.0..=100.0).contains(&b10), || format!("window {i} {f}: B10 {b10}"))?;
            checked += 1;
        }
    }
    Ok(format!("1000 windows, {checked} files"))
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_belief-miner");
    let run_once = |root: &Path| -> Result<(), String> {
        let repo = common::build_fixture(&root.join("repo"));
        let out = root.join("out");
        let steps: [Vec<String>; 3] = [
            ["mine", &repo.to_string_lossy(), "--out", &out.join("cache/fixture").to_string_lossy(), "--force"]
                .map(String::from)
                .to_vec(),
            ["assess", &out.join("cache").to_string_lossy(), "--out", &out.join("assess").to_string_lossy(), "--vectors"]
                .map(String::from)
                .to_vec(),
            ["report", &out.join("assess").to_string_lossy(), "--out", &out.join("report").to_string_lossy()]
                .map(String::from)
                .to_vec(),
        ];
        for args in steps {
            let o = Command::new(bin).args(&args).args(["--seed", "0"]).output().map_err(|e| e.to_string())?;
            check(o.status.success(), || {
                format!("{} failed: {}", args[0], String::from_utf8_lossy(&o.stderr))
            })?;
        }
        Ok(())
    };
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_once(&a)?;
    run_once(&b)?;
    let (ta, tb) = (tree(&a.join("out")), tree(&b.join("out")));
    check(ta == tb, || {
        let differing: Vec<&String> = ta.keys().filter(|k| ta.get(*k) != tb.get(*k)).collect();
        format!("runs differ in {differing:?}")
    })?;

    let mut golden = tree(&common::golden("fixture_run"));
    golden.insert("cache/fixture/history.jsonl".into(), fs::read(common::golden("fixture_history.jsonl")).unwrap());
    golden.insert("cache/fixture/releases.jsonl".into(), fs::read(common::golden("fixture_releases.jsonl")).unwrap());
    let mismatched: Vec<&String> = golden.keys().chain(ta.keys()).filter(|k| golden.get(*k) != ta.get(*k)).collect();
    check(mismatched.is_empty(), || format!("golden mismatch in {mismatched:?}"))?;
    within(Duration::from_secs(10), start)?;
    Ok(format!("{} files byte-identical across runs and goldens, {:.2?}", ta.len(), start.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("spearman matches rank-then-pearson oracle", spearman_oracle),
        ("exact and t-approximate p-values", exact_p_values),
        ("a12 matches pairwise count", a12_oracle),
        ("scott-knott matches exhaustive split oracle", scott_knott_oracle),
        ("planted effect recovery and null rate", planted_recovery),
        ("window, size and significance filters", filter_fidelity),
        ("support label boundaries", label_boundaries),
        ("hcm analytic cases", hcm_cases),
        ("metric consistency invariants", metric_invariants),
        ("end-to-end determinism and goldens", end_to_end),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
