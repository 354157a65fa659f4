//! Support populations per belief and the cross-project analyses built on
//! them: belief ranking, coverage, prevalence, release-size strata and
//! growth/decay trends.

use std::collections::BTreeMap;
use std::fmt;

use crate::belief::BeliefId;
use crate::ingest::{ChangeRecord, ProjectSummary, Release, SourceFilter};
use crate::metrics::{compute_all, BeliefVector, HcmConfig};
use crate::stats::{self, scott_knott, spearman, RankedGroup, ScottKnottConfig, Treatment};
use crate::windowing::{build_windows, count_post_defects, qualify_window};

/// Windows and populations are built with these settings.
#[derive(Debug, Clone)]
pub struct AssessConfig {
    pub filter: SourceFilter,
    pub post_days: u32,
    pub min_files: usize,
    pub hcm: HcmConfig,
    pub alpha: f64,
    pub min_observations: usize,
    pub exact_p: bool,
}

impl Default for AssessConfig {
    fn default() -> Self {
        AssessConfig {
            filter: SourceFilter::default(),
            post_days: crate::windowing::DEFAULT_POST_DAYS,
            min_files: crate::windowing::DEFAULT_MIN_FILES,
            hcm: HcmConfig::default(),
            alpha: 0.01,
            min_observations: 4,
            exact_p: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowInfo {
    pub release_ordinal: usize,
    pub tag_name: String,
    pub release_time: i64,
    pub distinct_files: usize,
    pub qualified: bool,
    pub right_censored: bool,
}

/// One Spearman result for one belief in one release.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportScore {
    pub belief: BeliefId,
    pub release_ordinal: usize,
    pub release_time: i64,
    pub distinct_files: usize,
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

impl SupportScore {
    pub fn strength(&self) -> f64 {
        self.rho.abs()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Exclusions {
    pub windows_total: usize,
    pub not_qualified: usize,
    pub too_few_observations: usize,
    pub not_significant: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefPopulation {
    pub project: String,
    pub belief: BeliefId,
    /// Significant scores only.
    pub scores: Vec<SupportScore>,
    pub releases_total: usize,
    pub exclusions: Exclusions,
}

impl BeliefPopulation {
    pub fn releases_used(&self) -> usize {
        self.scores.len()
    }

    pub fn strengths(&self) -> Vec<f64> {
        self.scores.iter().map(SupportScore::strength).collect()
    }

    pub fn median_strength(&self) -> Option<f64> {
        (!self.scores.is_empty()).then(|| stats::median(&self.strengths()))
    }
}

/// A qualified window with its ten belief vectors.
#[derive(Debug, Clone)]
pub struct ScoredWindow {
    pub info: WindowInfo,
    pub vectors: Vec<BeliefVector>,
}

#[derive(Debug, Clone)]
pub struct ProjectAssessment {
    pub project: String,
    pub summary: ProjectSummary,
    pub windows: Vec<WindowInfo>,
    /// Ten populations in belief order.
    pub populations: Vec<BeliefPopulation>,
}

/// Builds windows, computes all metrics per qualified window and returns the
/// scored windows alongside every window's metadata.
pub fn score_windows(
    records: &[ChangeRecord],
    releases: &[Release],
    cfg: &AssessConfig,
) -> (Vec<WindowInfo>, Vec<ScoredWindow>) {
    let mut infos = Vec::new();
    let mut scored = Vec::new();
    for w in build_windows(releases, records, cfg.post_days, &cfg.filter) {
        let info = WindowInfo {
            release_ordinal: w.release.ordinal,
            tag_name: w.release.tag_name.clone(),
            release_time: w.release.release_time,
            distinct_files: w.distinct_files,
            qualified: qualify_window(&w, cfg.min_files),
            right_censored: w.right_censored,
        };
        if info.qualified {
            let defects = count_post_defects(&w, records);
            scored.push(ScoredWindow {
                info: info.clone(),
                vectors: compute_all(&w, &defects, &cfg.hcm),
            });
        }
        infos.push(info);
    }
    (infos, scored)
}

/// Correlates one belief in every scored window and keeps the scores with
/// p < alpha and at least `min_observations` entities.
pub fn belief_population(
    project: &str,
    belief: BeliefId,
    releases_total: usize,
    windows: &[WindowInfo],
    scored: &[ScoredWindow],
    cfg: &AssessConfig,
) -> BeliefPopulation {
    let mut exclusions = Exclusions {
        windows_total: windows.len(),
        not_qualified: windows.iter().filter(|w| !w.qualified).count(),
        ..Exclusions::default()
    };
    let mut scores = Vec::new();
    for sw in scored {
        let v = &sw.vectors[belief.index()];
        if v.len() < cfg.min_observations.max(2) {
            exclusions.too_few_observations += 1;
            continue;
        }
        let c = spearman(&v.x, &v.y_f64(), cfg.exact_p).expect("lengths checked above");
        let score = SupportScore {
            belief,
            release_ordinal: sw.info.release_ordinal,
            release_time: sw.info.release_time,
            distinct_files: sw.info.distinct_files,
            rho: c.rho,
            p_value: c.p_value,
            n: c.n,
        };
        match filter_score(score, cfg.alpha, cfg.min_observations) {
            Ok(s) => scores.push(s),
            Err(Rejection::TooFew) => exclusions.too_few_observations += 1,
            Err(Rejection::NotSignificant) => exclusions.not_significant += 1,
        }
    }
    BeliefPopulation {
        project: project.to_string(),
        belief,
        scores,
        releases_total,
        exclusions,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    TooFew,
    NotSignificant,
}

/// The double filter every population member passes.
pub fn filter_score(score: SupportScore, alpha: f64, min_n: usize) -> Result<SupportScore, Rejection> {
    if score.n < min_n {
        Err(Rejection::TooFew)
    } else if score.p_value >= alpha {
        Err(Rejection::NotSignificant)
    } else {
        Ok(score)
    }
}

pub fn assess_project(
    project: &str,
    records: &[ChangeRecord],
    releases: &[Release],
    cfg: &AssessConfig,
) -> (ProjectAssessment, Vec<ScoredWindow>) {
    let (windows, scored) = score_windows(records, releases, cfg);
    let populations = BeliefId::ALL
        .iter()
        .map(|&b| belief_population(project, b, releases.len(), &windows, &scored, cfg))
        .collect();
    let assessment = ProjectAssessment {
        project: project.to_string(),
        summary: ProjectSummary::from_history(records, releases),
        windows,
        populations,
    };
    (assessment, scored)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SupportLabel {
    NoSupport,
    Weak,
    Support,
    Strong,
    VeryStrong,
}

impl fmt::Display for SupportLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SupportLabel::NoSupport => "none",
            SupportLabel::Weak => "minimum/weak",
            SupportLabel::Support => "support",
            SupportLabel::Strong => "strong",
            SupportLabel::VeryStrong => "very strong",
        })
    }
}

/// Categorical strength of |rho|.
pub fn support_label(rho: f64) -> SupportLabel {
    let r = rho.abs();
    if r >= 0.7 {
        SupportLabel::VeryStrong
    } else if r >= 0.6 {
        SupportLabel::Strong
    } else if r >= 0.5 {
        SupportLabel::Support
    } else if r >= 0.4 {
        SupportLabel::Weak
    } else {
        SupportLabel::NoSupport
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub groups: Vec<RankedGroup>,
    /// Treatments dropped for having no scores.
    pub dropped: Vec<String>,
}

fn rank_treatments(treatments: Vec<Treatment>, cfg: &ScottKnottConfig) -> Ranking {
    let (kept, empty): (Vec<_>, Vec<_>) = treatments
        .into_iter()
        .partition(|t| !t.measurements.is_empty());
    Ranking {
        groups: scott_knott(&kept, cfg),
        dropped: empty.into_iter().map(|t| t.label).collect(),
    }
}

/// Scott-Knott over the ten beliefs, each pooling |rho| across projects.
pub fn rank_beliefs(populations: &[BeliefPopulation], cfg: &ScottKnottConfig) -> Ranking {
    let treatments = BeliefId::ALL
        .iter()
        .map(|&b| {
            let pooled = populations
                .iter()
                .filter(|p| p.belief == b)
                .flat_map(|p| p.strengths())
                .collect();
            Treatment::new(b.as_str(), pooled)
        })
        .collect();
    rank_treatments(treatments, cfg)
}

pub const SUPPORT_THRESHOLD: f64 = 0.4;

/// Beliefs whose median |rho| reaches `threshold` in this project.
pub fn coverage(project_populations: &[BeliefPopulation], threshold: f64) -> usize {
    project_populations
        .iter()
        .filter(|p| p.median_strength().is_some_and(|m| m >= threshold))
        .count()
}

/// Percentage of the project's pooled scores with |rho| >= `threshold`;
/// `None` for an empty pool.
pub fn prevalence(project_populations: &[BeliefPopulation], threshold: f64) -> Option<f64> {
    let pool: Vec<f64> = project_populations.iter().flat_map(|p| p.strengths()).collect();
    if pool.is_empty() {
        return None;
    }
    let hits = pool.iter().filter(|&&r| r >= threshold).count();
    Some(100.0 * hits as f64 / pool.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeBucket {
    Small,
    Medium,
    Large,
    Unbucketed,
}

impl SizeBucket {
    pub fn prefix(self) -> &'static str {
        match self {
            SizeBucket::Small => "S",
            SizeBucket::Medium => "M",
            SizeBucket::Large => "L",
            SizeBucket::Unbucketed => "-",
        }
    }
}

impl fmt::Display for SizeBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeBucket::Small => "small",
            SizeBucket::Medium => "medium",
            SizeBucket::Large => "large",
            SizeBucket::Unbucketed => "unbucketed",
        })
    }
}

/// Median used for the small/medium boundary in replication mode.
pub const REPLICATION_MEDIAN_DF: f64 = 18.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeThresholds {
    pub median: f64,
    pub q3: f64,
}

impl SizeThresholds {
    /// Median and third quartile of the D_F values; `replication` pins the
    /// median to 18 files.
    pub fn from_distinct_files(values: &[usize], replication: bool) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let v: Vec<f64> = values.iter().map(|&d| d as f64).collect();
        let sorted = stats::sorted(&v);
        let median = if replication {
            REPLICATION_MEDIAN_DF
        } else {
            stats::quantile_sorted(&sorted, 0.5)
        };
        Some(SizeThresholds {
            median,
            q3: stats::quantile_sorted(&sorted, 0.75),
        })
    }

    pub fn bucket(&self, distinct_files: usize) -> SizeBucket {
        let d = distinct_files as f64;
        if distinct_files <= 3 {
            SizeBucket::Unbucketed
        } else if d >= self.q3 {
            SizeBucket::Large
        } else if d >= self.median {
            SizeBucket::Medium
        } else {
            SizeBucket::Small
        }
    }
}

/// Assigns each qualified window of the dataset to a size bucket. Keys are
/// (project, release ordinal).
pub fn bucket_windows(
    projects: &[ProjectAssessment],
    replication: bool,
) -> (Option<SizeThresholds>, BTreeMap<(String, usize), SizeBucket>) {
    let qualified: Vec<(&str, &WindowInfo)> = projects
        .iter()
        .flat_map(|p| p.windows.iter().filter(|w| w.qualified).map(move |w| (p.project.as_str(), w)))
        .collect();
    let dfs: Vec<usize> = qualified.iter().map(|(_, w)| w.distinct_files).collect();
    let Some(thresholds) = SizeThresholds::from_distinct_files(&dfs, replication) else {
        return (None, BTreeMap::new());
    };
    let buckets = qualified
        .into_iter()
        .map(|(p, w)| ((p.to_string(), w.release_ordinal), thresholds.bucket(w.distinct_files)))
        .collect();
    (Some(thresholds), buckets)
}

/// Scott-Knott over (bucket x belief) treatments labelled like `S_B3`.
pub fn rank_beliefs_by_size(
    populations: &[BeliefPopulation],
    buckets: &BTreeMap<(String, usize), SizeBucket>,
    cfg: &ScottKnottConfig,
) -> Ranking {
    let mut treatments = Vec::new();
    for bucket in [SizeBucket::Small, SizeBucket::Medium, SizeBucket::Large] {
        for b in BeliefId::ALL {
            let pooled = populations
                .iter()
                .filter(|p| p.belief == b)
                .flat_map(|p| {
                    p.scores.iter().filter(move |s| {
                        buckets.get(&(p.project.clone(), s.release_ordinal)) == Some(&bucket)
                    })
                })
                .map(SupportScore::strength)
                .collect();
            treatments.push(Treatment::new(format!("{}_{}", bucket.prefix(), b), pooled));
        }
    }
    rank_treatments(treatments, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Growth,
    Decay,
    Neither,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Growth => "growth",
            Trend::Decay => "decay",
            Trend::Neither => "neither",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendResult {
    pub project: String,
    pub belief: BeliefId,
    pub trend: Trend,
    /// `None` when the population has fewer than the minimum scores.
    pub rho_time: Option<f64>,
    pub p_value: Option<f64>,
    pub n: usize,
}

/// Correlates release dates of the scored windows with their |rho|.
pub fn growth_decay(population: &BeliefPopulation, threshold: f64, min_scores: usize) -> TrendResult {
    let n = population.scores.len();
    let mut result = TrendResult {
        project: population.project.clone(),
        belief: population.belief,
        trend: Trend::Neither,
        rho_time: None,
        p_value: None,
        n,
    };
    if n < min_scores.max(2) {
        return result;
    }
    let dates: Vec<f64> = population.scores.iter().map(|s| s.release_time as f64).collect();
    let c = spearman(&dates, &population.strengths(), true).expect("n >= 2");
    result.rho_time = Some(c.rho);
    result.p_value = Some(c.p_value);
    result.trend = if c.rho >= threshold {
        Trend::Growth
    } else if c.rho <= -threshold {
        Trend::Decay
    } else {
        Trend::Neither
    };
    result
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub support_threshold: f64,
    pub trend_threshold: f64,
    pub min_trend_scores: usize,
    pub replication_mode: bool,
    pub scott_knott: ScottKnottConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            support_threshold: SUPPORT_THRESHOLD,
            trend_threshold: 0.4,
            min_trend_scores: 4,
            replication_mode: false,
            scott_knott: ScottKnottConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectCoverage {
    pub project: String,
    pub coverage: usize,
    pub prevalence: Option<f64>,
    pub scores: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetAnalysis {
    pub ranking: Ranking,
    pub coverage: Vec<ProjectCoverage>,
    pub thresholds: Option<SizeThresholds>,
    pub buckets: BTreeMap<(String, usize), SizeBucket>,
    pub size_ranking: Ranking,
    pub trends: Vec<TrendResult>,
    pub summaries: Vec<(String, ProjectSummary)>,
}

/// Runs every cross-project analysis over the assessed projects.
pub fn analyze(projects: &[ProjectAssessment], cfg: &AnalysisConfig) -> DatasetAnalysis {
    let all_pops: Vec<BeliefPopulation> = projects
        .iter()
        .flat_map(|p| p.populations.iter().cloned())
        .collect();
    let ranking = rank_beliefs(&all_pops, &cfg.scott_knott);
    let coverage = projects
        .iter()
        .map(|p| ProjectCoverage {
            project: p.project.clone(),
            coverage: coverage(&p.populations, cfg.support_threshold),
            prevalence: prevalence(&p.populations, cfg.support_threshold),
            scores: p.populations.iter().map(|b| b.scores.len()).sum(),
        })
        .collect();
    let (thresholds, buckets) = bucket_windows(projects, cfg.replication_mode);
    let size_ranking = rank_beliefs_by_size(&all_pops, &buckets, &cfg.scott_knott);
    let trends = all_pops
        .iter()
        .map(|p| growth_decay(p, cfg.trend_threshold, cfg.min_trend_scores))
        .collect();
    DatasetAnalysis {
        ranking,
        coverage,
        thresholds,
        buckets,
        size_ranking,
        trends,
        summaries: projects
            .iter()
            .map(|p| (p.project.clone(), p.summary.clone()))
            .collect(),
    }
}
