//! Markdown and CSV rendering of a dataset analysis.
//!
//! Rendering is a pure function of its inputs; [`write_report`] only puts
//! the rendered strings on disk.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{
    support_label, DatasetAnalysis, ProjectAssessment, Ranking, SizeBucket, Trend, TrendResult,
};
use crate::belief::BeliefId;
use crate::error::{Error, Result};
use crate::export::{csv_string_with_header, population_rows, POPULATION_HEADER};
use crate::ingest::ProjectSummary;
use crate::stats::{quantile_sorted, sorted};

pub const NO_DATA: &str = "_no data_";

/// File name to contents, in name order.
pub type ReportFiles = BTreeMap<&'static str, String>;

fn pct100(v: f64) -> i64 {
    (v * 100.0).round() as i64
}

fn num(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// `B5 (57%)`, or `S_B5 (57%)` for size treatments.
pub fn annotate(label: &str) -> String {
    let belief = label.rsplit('_').next().unwrap_or(label);
    match belief.parse::<BeliefId>() {
        Ok(b) => format!("{label} ({}%)", b.practitioner_agreement()),
        Err(_) => label.to_string(),
    }
}

/// Markdown table of ranked treatments with medians and IQRs scaled by 100.
/// `negatives` counts significant scores with negative rho per treatment.
pub fn render_ranking(ranking: &Ranking, negatives: &BTreeMap<String, usize>) -> String {
    if ranking.groups.is_empty() {
        return format!("{NO_DATA}\n");
    }
    let mut out = String::from("| Rank | Treatment | Median | IQR | n | Negative |\n|---:|---|---:|---:|---:|---:|\n");
    for g in &ranking.groups {
        for t in &g.treatments {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                g.rank,
                annotate(&t.label),
                pct100(t.median),
                pct100(t.iqr),
                t.n,
                negatives.get(&t.label).copied().unwrap_or(0)
            );
        }
    }
    if !ranking.dropped.is_empty() {
        let _ = writeln!(out, "\nNo scores for: {}.", ranking.dropped.join(", "));
    }
    out
}

const QUANTITIES: [&str; 5] = ["commits", "bug_fix_percent", "releases", "developers", "active_years"];

fn quantity(s: &ProjectSummary, i: usize) -> f64 {
    match i {
        0 => s.commit_count as f64,
        1 => 100.0 * s.bug_fix_fraction,
        2 => s.release_count as f64,
        3 => s.developer_count as f64,
        _ => s.active_years,
    }
}

#[derive(Debug, Serialize)]
struct DistributionRow {
    quantity: &'static str,
    n: usize,
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
}

fn distribution_rows(summaries: &[&ProjectSummary]) -> Vec<DistributionRow> {
    if summaries.is_empty() {
        return Vec::new();
    }
    QUANTITIES
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let v = sorted(&summaries.iter().map(|s| quantity(s, i)).collect::<Vec<_>>());
            DistributionRow {
                quantity: q,
                n: v.len(),
                min: v[0],
                q1: quantile_sorted(&v, 0.25),
                median: quantile_sorted(&v, 0.5),
                q3: quantile_sorted(&v, 0.75),
                max: v[v.len() - 1],
            }
        })
        .collect()
}

/// Quartiles of the five dataset quantities across projects.
pub fn render_distribution(summaries: &[&ProjectSummary]) -> String {
    let rows = distribution_rows(summaries);
    if rows.is_empty() {
        return format!("{NO_DATA}\n");
    }
    let mut out = String::from("| Quantity | Min | Q1 | Median | Q3 | Max |\n|---|---:|---:|---:|---:|---:|\n");
    for r in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            r.quantity,
            num(r.min),
            num(r.q1),
            num(r.median),
            num(r.q3),
            num(r.max)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendShare {
    pub belief: BeliefId,
    pub projects: usize,
    pub growth: usize,
    pub decay: usize,
}

impl TrendShare {
    pub fn growth_percent(&self) -> f64 {
        percent(self.growth, self.projects)
    }

    pub fn decay_percent(&self) -> f64 {
        percent(self.decay, self.projects)
    }
}

fn percent(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * k as f64 / n as f64
    }
}

/// Per-belief shares of projects with growth and decay, sorted by decay
/// share descending, then belief order.
pub fn trend_shares(trends: &[TrendResult]) -> Vec<TrendShare> {
    let mut shares: Vec<TrendShare> = BeliefId::ALL
        .iter()
        .filter_map(|&b| {
            let of: Vec<&TrendResult> = trends.iter().filter(|t| t.belief == b).collect();
            (!of.is_empty()).then(|| TrendShare {
                belief: b,
                projects: of.len(),
                growth: of.iter().filter(|t| t.trend == Trend::Growth).count(),
                decay: of.iter().filter(|t| t.trend == Trend::Decay).count(),
            })
        })
        .collect();
    shares.sort_by(|a, b| {
        (b.decay * a.projects)
            .cmp(&(a.decay * b.projects))
            .then(a.belief.cmp(&b.belief))
    });
    shares
}

pub fn render_trends(trends: &[TrendResult]) -> String {
    let shares = trend_shares(trends);
    if shares.is_empty() {
        return format!("{NO_DATA}\n");
    }
    let mut out = String::from("| Belief | Growth % | Decay % | Projects |\n|---|---:|---:|---:|\n");
    for s in shares {
        let _ = writeln!(
            out,
            "| {} | {:.0} | {:.0} | {} |",
            annotate(s.belief.as_str()),
            s.growth_percent(),
            s.decay_percent(),
            s.projects
        );
    }
    out
}

fn negatives_by_belief(projects: &[ProjectAssessment]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for pop in projects.iter().flat_map(|p| &p.populations) {
        *out.entry(pop.belief.to_string()).or_insert(0) +=
            pop.scores.iter().filter(|s| s.rho < 0.0).count();
    }
    out
}

fn negatives_by_size(projects: &[ProjectAssessment], analysis: &DatasetAnalysis) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for pop in projects.iter().flat_map(|p| &p.populations) {
        for s in pop.scores.iter().filter(|s| s.rho < 0.0) {
            if let Some(b) = analysis.buckets.get(&(pop.project.clone(), s.release_ordinal)) {
                if *b != SizeBucket::Unbucketed {
                    *out.entry(format!("{}_{}", b.prefix(), pop.belief)).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct RankingRow<'a> {
    rank: usize,
    treatment: &'a str,
    median: f64,
    iqr: f64,
    n: usize,
    negative: usize,
    agreement: Option<u32>,
}

const RANKING_HEADER: [&str; 7] = ["rank", "treatment", "median", "iqr", "n", "negative", "agreement"];

fn ranking_csv(ranking: &Ranking, negatives: &BTreeMap<String, usize>) -> Result<String> {
    let rows: Vec<RankingRow> = ranking
        .groups
        .iter()
        .flat_map(|g| {
            g.treatments.iter().map(move |t| RankingRow {
                rank: g.rank,
                treatment: &t.label,
                median: t.median,
                iqr: t.iqr,
                n: t.n,
                negative: negatives.get(&t.label).copied().unwrap_or(0),
                agreement: t
                    .label
                    .rsplit('_')
                    .next()
                    .and_then(|b| b.parse::<BeliefId>().ok())
                    .map(BeliefId::practitioner_agreement),
            })
        })
        .collect();
    csv_string_with_header(&RANKING_HEADER, &rows)
}

#[derive(Debug, Serialize)]
struct TrendRow<'a> {
    project: &'a str,
    belief: BeliefId,
    rho_time: Option<f64>,
    trend: String,
    p_value: Option<f64>,
    n: usize,
}

#[derive(Debug, Serialize)]
struct BucketRow<'a> {
    project: &'a str,
    release_ordinal: usize,
    distinct_files: usize,
    bucket: String,
    median_df: f64,
    q3_df: f64,
}

#[derive(Debug, Serialize)]
struct CoverageRow<'a> {
    project: &'a str,
    coverage: usize,
    prevalence: Option<f64>,
    scores: usize,
}

#[derive(Debug, Serialize)]
struct LabelledPopulationRow {
    project: String,
    belief: BeliefId,
    release_ordinal: usize,
    rho: f64,
    p: f64,
    n: usize,
    label: String,
}

/// Renders every report file.
pub fn render(projects: &[ProjectAssessment], analysis: &DatasetAnalysis) -> Result<ReportFiles> {
    let mut files = ReportFiles::new();
    let neg_beliefs = negatives_by_belief(projects);
    let neg_sizes = negatives_by_size(projects, analysis);

    files.insert("ranking.csv", ranking_csv(&analysis.ranking, &neg_beliefs)?);
    files.insert("ranking_by_size.csv", ranking_csv(&analysis.size_ranking, &neg_sizes)?);

    let pops: Vec<LabelledPopulationRow> = population_rows(projects)
        .into_iter()
        .map(|r| LabelledPopulationRow {
            label: support_label(r.rho).to_string(),
            project: r.project,
            belief: r.belief,
            release_ordinal: r.release_ordinal,
            rho: r.rho,
            p: r.p,
            n: r.n,
        })
        .collect();
    let mut header = POPULATION_HEADER.to_vec();
    header.push("label");
    files.insert("populations.csv", csv_string_with_header(&header, &pops)?);

    let trends: Vec<TrendRow> = analysis
        .trends
        .iter()
        .map(|t| TrendRow {
            project: &t.project,
            belief: t.belief,
            rho_time: t.rho_time,
            trend: t.trend.to_string(),
            p_value: t.p_value,
            n: t.n,
        })
        .collect();
    files.insert(
        "trends.csv",
        csv_string_with_header(&["project", "belief", "rho_time", "trend", "p_value", "n"], &trends)?,
    );

    let windows: BTreeMap<(&str, usize), usize> = projects
        .iter()
        .flat_map(|p| p.windows.iter().map(move |w| ((p.project.as_str(), w.release_ordinal), w.distinct_files)))
        .collect();
    let buckets: Vec<BucketRow> = match analysis.thresholds {
        Some(t) => analysis
            .buckets
            .iter()
            .map(|((project, ordinal), b)| BucketRow {
                project,
                release_ordinal: *ordinal,
                distinct_files: windows.get(&(project.as_str(), *ordinal)).copied().unwrap_or(0),
                bucket: b.to_string(),
                median_df: t.median,
                q3_df: t.q3,
            })
            .collect(),
        None => Vec::new(),
    };
    files.insert(
        "buckets.csv",
        csv_string_with_header(
            &["project", "release_ordinal", "distinct_files", "bucket", "median_df", "q3_df"],
            &buckets,
        )?,
    );

    let summaries: Vec<&ProjectSummary> = analysis.summaries.iter().map(|(_, s)| s).collect();
    files.insert(
        "distribution.csv",
        csv_string_with_header(
            &["quantity", "n", "min", "q1", "median", "q3", "max"],
            &distribution_rows(&summaries),
        )?,
    );

    let coverage: Vec<CoverageRow> = analysis
        .coverage
        .iter()
        .map(|c| CoverageRow {
            project: &c.project,
            coverage: c.coverage,
            prevalence: c.prevalence,
            scores: c.scores,
        })
        .collect();
    files.insert(
        "coverage.csv",
        csv_string_with_header(&["project", "coverage", "prevalence", "scores"], &coverage)?,
    );

    files.insert("report.md", render_markdown(projects, analysis, &neg_beliefs, &neg_sizes));
    Ok(files)
}

fn render_markdown(
    projects: &[ProjectAssessment],
    analysis: &DatasetAnalysis,
    neg_beliefs: &BTreeMap<String, usize>,
    neg_sizes: &BTreeMap<String, usize>,
) -> String {
    let mut md = String::from("# Belief support report\n\n");
    let _ = writeln!(md, "Projects: {}\n", projects.len());

    md.push_str("## Dataset\n\n");
    let summaries: Vec<&ProjectSummary> = analysis.summaries.iter().map(|(_, s)| s).collect();
    md.push_str(&render_distribution(&summaries));

    md.push_str("\n## Belief ranking\n\nMedians and IQRs of |rho| x 100; agreement in parentheses.\n\n");
    md.push_str(&render_ranking(&analysis.ranking, neg_beliefs));

    md.push_str("\n## Coverage and prevalence\n\n");
    if analysis.coverage.is_empty() {
        let _ = writeln!(md, "{NO_DATA}");
    } else {
        md.push_str("| Project | Coverage | Prevalence % | Scores |\n|---|---:|---:|---:|\n");
        for c in &analysis.coverage {
            let prev = c.prevalence.map_or("n/a".to_string(), |p| format!("{p:.1}"));
            let _ = writeln!(md, "| {} | {} | {} | {} |", c.project, c.coverage, prev, c.scores);
        }
        let full = analysis.coverage.iter().filter(|c| c.coverage == BeliefId::ALL.len()).count();
        let _ = writeln!(
            md,
            "\nProjects covering all {} beliefs: {} of {}.",
            BeliefId::ALL.len(),
            full,
            analysis.coverage.len()
        );
    }

    md.push_str("\n## Release size\n\n");
    match analysis.thresholds {
        None => {
            let _ = writeln!(md, "{NO_DATA}");
        }
        Some(t) => {
            let _ = writeln!(md, "Median D_F: {}; Q3 D_F: {}.\n", num(t.median), num(t.q3));
            md.push_str("| Bucket | Windows |\n|---|---:|\n");
            for b in [SizeBucket::Small, SizeBucket::Medium, SizeBucket::Large, SizeBucket::Unbucketed] {
                let k = analysis.buckets.values().filter(|v| **v == b).count();
                let _ = writeln!(md, "| {b} | {k} |");
            }
            md.push('\n');
            md.push_str(&render_ranking(&analysis.size_ranking, neg_sizes));
        }
    }

    md.push_str("\n## Growth and decay\n\n");
    md.push_str(&render_trends(&analysis.trends));
    md
}

pub fn write_report(dir: &Path, files: &ReportFiles) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
