//! Synthetic change histories with a planted coupling between one belief
//! metric and post-release fixes.
//!
//! Releases are spaced `post_days + dev_days` apart. Development commits for
//! release r land in the last `dev_days` before its tag; the fixes planted
//! for release r land inside its post horizon, which ends before the next
//! development stretch starts. Fix counts are drawn after the window's
//! metric is measured, so the coupling holds against exactly what the
//! pipeline will compute.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::belief::BeliefId;
use crate::error::{Error, Result};
use crate::ingest::{ChangeRecord, Release, SourceFilter};
use crate::labeling::{is_bug_fix, KeywordSet, DEFAULT_STEMS};
use crate::metrics::{compute, HcmConfig};
use crate::stats::{median, rank_with_ties, spearman};
use crate::windowing::{build_windows, count_post_defects, DefectCounts, ReleaseWindow, SECONDS_PER_DAY};

pub const SUPPORTED_BELIEFS: [BeliefId; 4] = [BeliefId::B2, BeliefId::B3, BeliefId::B8, BeliefId::B9];

const BASE_TIME: i64 = 1_500_000_000;
const EXTENSIONS: [&str; 5] = ["py", "java", "c", "go", "rb"];
const NEUTRAL: [&str; 5] = ["Add feature to", "Update", "Extend api of", "Tidy", "Rename helpers in"];
const PROBE_RELEASES: usize = 41;
const CALIBRATION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub releases: usize,
    pub files_min: usize,
    pub files_max: usize,
    pub planted_belief: Option<BeliefId>,
    pub planted_strength: f64,
    pub noise_seed: u64,
    pub bug_fix_rate: f64,
    pub post_days: u32,
    pub dev_days: u32,
    pub developers: usize,
    pub max_defects: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            releases: 21,
            files_min: 10,
            files_max: 30,
            planted_belief: None,
            planted_strength: 0.0,
            noise_seed: 0,
            bug_fix_rate: 0.2,
            post_days: crate::windowing::DEFAULT_POST_DAYS,
            dev_days: 60,
            developers: 8,
            max_defects: 7,
        }
    }
}

fn parse_value<T: FromStr>(field: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(field, format!("cannot parse {value:?}")))
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.releases < 2 {
            return Err(Error::config("releases", "must be at least 2"));
        }
        if self.files_min < 3 {
            return Err(Error::config("files_min", "must be at least 3"));
        }
        if self.files_max < self.files_min {
            return Err(Error::config("files_max", "must be at least files_min"));
        }
        if !(0.0..=1.0).contains(&self.planted_strength) {
            return Err(Error::config("planted_strength", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.bug_fix_rate) {
            return Err(Error::config("bug_fix_rate", "must lie in [0, 1]"));
        }
        if let Some(b) = self.planted_belief {
            if !SUPPORTED_BELIEFS.contains(&b) {
                return Err(unsupported(&b.to_string()));
            }
        }
        if self.post_days == 0 || self.dev_days == 0 {
            return Err(Error::config("post_days", "post_days and dev_days must be positive"));
        }
        if self.developers == 0 {
            return Err(Error::config("developers", "must be positive"));
        }
        if self.max_defects == 0 {
            return Err(Error::config("max_defects", "must be positive"));
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment line. Missing keys
    /// keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ScenarioSpec::default();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "releases" => spec.releases = parse_value(key, value)?,
                "files_min" => spec.files_min = parse_value(key, value)?,
                "files_max" => spec.files_max = parse_value(key, value)?,
                "planted_belief" => {
                    spec.planted_belief = if value.eq_ignore_ascii_case("none") {
                        None
                    } else {
                        Some(value.parse().map_err(|_| unsupported(value))?)
                    }
                }
                "planted_strength" => spec.planted_strength = parse_value(key, value)?,
                "noise_seed" => spec.noise_seed = parse_value(key, value)?,
                "bug_fix_rate" => spec.bug_fix_rate = parse_value(key, value)?,
                "post_days" => spec.post_days = parse_value(key, value)?,
                "dev_days" => spec.dev_days = parse_value(key, value)?,
                "developers" => spec.developers = parse_value(key, value)?,
                "max_defects" => spec.max_defects = parse_value(key, value)?,
                other => return Err(Error::config(other, "unknown key")),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ScenarioSpec::parse(&text)
    }

    fn is_null(&self) -> bool {
        self.planted_belief.is_none() || self.planted_strength == 0.0
    }
}

fn unsupported(value: &str) -> Error {
    let ids: Vec<String> = SUPPORTED_BELIEFS.iter().map(|b| b.to_string()).collect();
    Error::config(
        "planted_belief",
        format!("unsupported {value:?}; supported: {}, none", ids.join(", ")),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub records: Vec<ChangeRecord>,
    pub releases: Vec<Release>,
    /// Latent noise scale chosen by calibration, for strengths in (0, 1).
    pub noise_sigma: Option<f64>,
    /// Median realized rho on the calibration probe.
    pub probe_rho: Option<f64>,
}

fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Generator<'a> {
    spec: &'a ScenarioSpec,
    sigma: f64,
    dev_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    fix_rng: ChaCha8Rng,
    keywords: KeywordSet,
    filter: SourceFilter,
    records: Vec<ChangeRecord>,
    releases: Vec<Release>,
    commits: u64,
}

impl<'a> Generator<'a> {
    fn new(spec: &'a ScenarioSpec, sigma: f64) -> Self {
        Generator {
            spec,
            sigma,
            dev_rng: ChaCha8Rng::seed_from_u64(mix(spec.noise_seed, 1)),
            noise_rng: ChaCha8Rng::seed_from_u64(mix(spec.noise_seed, 2)),
            fix_rng: ChaCha8Rng::seed_from_u64(mix(spec.noise_seed, 3)),
            keywords: KeywordSet::default(),
            filter: SourceFilter::default(),
            records: Vec::new(),
            releases: Vec::new(),
            commits: 0,
        }
    }

    fn file_name(i: usize) -> String {
        format!("src/m{i:03}.{}", EXTENSIONS[i % EXTENSIONS.len()])
    }

    fn commit(&mut self, time: i64, author: usize, message: &str, changes: &[(String, u64, u64)]) {
        self.commits += 1;
        let id = format!("{:016x}{:016x}", mix(self.spec.noise_seed, self.commits), self.commits);
        let fix = is_bug_fix(message, &self.keywords);
        for (path, ins, del) in changes {
            self.records.push(ChangeRecord {
                commit_id: id.clone(),
                commit_time: time,
                author: format!("dev{author:02}@example.org"),
                file_path: path.clone(),
                insertions: *ins,
                deletions: *del,
                is_bug_fix: fix,
            });
        }
    }

    fn develop(&mut self, start: i64, end: i64) {
        let spec = self.spec;
        let rng = &mut self.dev_rng;
        let k = rng.random_range(spec.files_min..=spec.files_max);
        let pool = spec.files_max * 2;
        let files: Vec<usize> = sample(rng, pool, k).into_vec();
        let n_commits = k + rng.random_range(0..=k / 2);
        let mut planned = Vec::with_capacity(n_commits);
        for j in 0..n_commits {
            let rng = &mut self.dev_rng;
            let primary = if j < k { files[j] } else { files[rng.random_range(0..k)] };
            let mut touched = vec![primary];
            if rng.random_bool(0.3) {
                let extra = files[rng.random_range(0..k)];
                if extra != primary {
                    touched.push(extra);
                }
            }
            let changes: Vec<(String, u64, u64)> = touched
                .into_iter()
                .map(|f| {
                    let ins = rng.random_range(1..=200u64);
                    let del = rng.random_range(0..=ins);
                    (Self::file_name(f), ins, del)
                })
                .collect();
            let time = rng.random_range(start + 1..=end);
            let author = rng.random_range(0..spec.developers);
            let target = &changes[0].0;
            let message = if rng.random_bool(spec.bug_fix_rate) {
                let stem = DEFAULT_STEMS[rng.random_range(0..DEFAULT_STEMS.len())];
                format!("{stem} in {target}")
            } else {
                format!("{} {target}", NEUTRAL[rng.random_range(0..NEUTRAL.len())])
            };
            planned.push((time, author, message, changes));
        }
        for (time, author, message, changes) in planned {
            self.commit(time, author, &message, &changes);
        }
    }

    /// Post-release fix counts for every file of the window.
    fn couple(&mut self, window: &ReleaseWindow) -> BTreeMap<String, u64> {
        let spec = self.spec;
        let files: Vec<String> = window.files().into_iter().map(str::to_string).collect();
        let levels = spec.max_defects + 1;
        let belief = match spec.planted_belief {
            Some(b) if !spec.is_null() => b,
            _ => {
                return files
                    .into_iter()
                    .map(|f| (f, self.noise_rng.random_range(0..levels)))
                    .collect();
            }
        };
        let v = compute(belief, window, &DefectCounts::default(), &HcmConfig::default());
        let n = v.len();
        let ranks = rank_with_ties(&v.x);
        if spec.planted_strength >= 1.0 {
            let mut distinct: Vec<f64> = ranks.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            return v
                .entity_ids
                .into_iter()
                .zip(&ranks)
                .map(|(f, r)| {
                    let dense = distinct.iter().position(|d| d == r).unwrap() as u64;
                    (f, dense)
                })
                .collect();
        }
        let mean = ranks.iter().sum::<f64>() / n as f64;
        let sd = (ranks.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let latent: Vec<f64> = ranks
            .iter()
            .map(|r| {
                let score = if sd > 0.0 { (r - mean) / sd } else { 0.0 };
                let eps: f64 = self.noise_rng.sample(StandardNormal);
                score + self.sigma * eps
            })
            .collect();
        let latent_ranks = rank_with_ties(&latent);
        v.entity_ids
            .into_iter()
            .zip(latent_ranks)
            .map(|(f, r)| {
                let level = ((r - 1.0) * levels as f64 / n as f64).floor() as u64;
                (f, level.min(spec.max_defects))
            })
            .collect()
    }

    fn plant_fixes(&mut self, release_time: i64, counts: &BTreeMap<String, u64>) {
        let horizon = i64::from(self.spec.post_days) * SECONDS_PER_DAY;
        let mut planned = Vec::new();
        for (file, &count) in counts {
            for _ in 0..count {
                let rng = &mut self.fix_rng;
                let time = rng.random_range(release_time + 1..=release_time + horizon);
                let stem = DEFAULT_STEMS[rng.random_range(0..DEFAULT_STEMS.len())];
                let author = rng.random_range(0..self.spec.developers);
                let ins = rng.random_range(1..=10u64);
                let del = rng.random_range(1..=5u64);
                planned.push((time, author, format!("{stem} in {file}"), vec![(file.clone(), ins, del)]));
            }
        }
        for (time, author, message, changes) in planned {
            self.commit(time, author, &message, &changes);
        }
    }

    fn run(mut self) -> (Vec<ChangeRecord>, Vec<Release>) {
        let day = SECONDS_PER_DAY;
        let step = i64::from(self.spec.post_days + self.spec.dev_days) * day;
        let dev = i64::from(self.spec.dev_days) * day;
        for r in 1..=self.spec.releases {
            let t = BASE_TIME + r as i64 * step;
            self.develop(t - dev, t);
            self.releases.push(Release {
                tag_name: format!("v{r}"),
                release_time: t,
                ordinal: r,
            });
            if r >= 2 {
                let pair = &self.releases[r - 2..];
                let window = build_windows(pair, &self.records, self.spec.post_days, &self.filter)
                    .pop()
                    .expect("distinct release times");
                let counts = self.couple(&window);
                self.plant_fixes(t, &counts);
            }
        }
        let mut records = self.records;
        records.sort_by(|a, b| {
            (a.commit_time, &a.commit_id, &a.file_path).cmp(&(b.commit_time, &b.commit_id, &b.file_path))
        });
        (records, self.releases)
    }
}

/// Per-window Spearman rho between `belief` and post-release fixes.
pub fn realized_rhos(records: &[ChangeRecord], releases: &[Release], belief: BeliefId, post_days: u32) -> Vec<f64> {
    build_windows(releases, records, post_days, &SourceFilter::default())
        .iter()
        .filter_map(|w| {
            let d = count_post_defects(w, records);
            let v = compute(belief, w, &d, &HcmConfig::default());
            spearman(&v.x, &v.y_f64(), false).ok().map(|c| c.rho)
        })
        .collect()
}

fn probe(spec: &ScenarioSpec, sigma: f64) -> f64 {
    let probe_spec = ScenarioSpec {
        releases: PROBE_RELEASES,
        noise_seed: mix(spec.noise_seed, 0xCA11),
        ..spec.clone()
    };
    let (records, releases) = Generator::new(&probe_spec, sigma).run();
    let belief = spec.planted_belief.expect("planted scenario");
    median(&realized_rhos(&records, &releases, belief, spec.post_days))
}

/// Bisects the latent noise scale until the probe's median rho is within
/// tolerance of the target. Larger sigma means weaker coupling.
fn calibrate(spec: &ScenarioSpec) -> Result<(f64, f64)> {
    let target = spec.planted_strength;
    let mut best = (0.0, probe(spec, 0.0));
    let consider = |sigma: f64, rho: f64, best: &mut (f64, f64)| {
        if (rho - target).abs() < (best.1 - target).abs() {
            *best = (sigma, rho);
        }
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    loop {
        let rho = probe(spec, hi);
        consider(hi, rho, &mut best);
        if rho <= target || hi > 64.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..30 {
        if (best.1 - target).abs() < 0.01 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let rho = probe(spec, mid);
        consider(mid, rho, &mut best);
        if rho > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1 - target).abs() > CALIBRATION_TOLERANCE {
        return Err(Error::config(
            "planted_strength",
            format!(
                "calibration reached median rho {:.3}, not within {CALIBRATION_TOLERANCE} of {target}",
                best.1
            ),
        ));
    }
    Ok(best)
}

/// Builds a scenario. Identical specs give identical output.
pub fn generate(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let calibrated = if !spec.is_null() && spec.planted_strength < 1.0 {
        Some(calibrate(spec)?)
    } else {
        None
    };
    let sigma = calibrated.map_or(0.0, |c| c.0);
    let (records, releases) = Generator::new(spec, sigma).run();
    Ok(Scenario {
        records,
        releases,
        noise_sigma: calibrated.map(|c| c.0),
        probe_rho: calibrated.map(|c| c.1),
    })
}
