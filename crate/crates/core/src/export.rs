//! CSV form of per-project assessments, read back at report time.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::analysis::{BeliefPopulation, Exclusions, ProjectAssessment, ScoredWindow, SupportScore, WindowInfo};
use crate::belief::BeliefId;
use crate::error::{Error, Result};
use crate::ingest::ProjectSummary;

pub const POPULATIONS_FILE: &str = "populations.csv";
pub const WINDOWS_FILE: &str = "windows.csv";
pub const EXCLUSIONS_FILE: &str = "exclusions.csv";
pub const PROJECTS_FILE: &str = "projects.csv";

/// Renders rows to a CSV string with LF line endings.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Contract(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Header-only output for empty row sets, so every file has a header.
pub fn csv_string_with_header<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String> {
    if rows.is_empty() {
        Ok(format!("{}\n", header.join(",")))
    } else {
        csv_string(rows)
    }
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let text = csv_string_with_header(header, rows)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Contract(format!("{}: {other:?}", path.display())),
    })?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::CorruptCache {
                path: path.to_path_buf(),
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PopulationRow {
    pub project: String,
    pub belief: BeliefId,
    pub release_ordinal: usize,
    pub rho: f64,
    pub p: f64,
    pub n: usize,
}

pub const POPULATION_HEADER: [&str; 6] = ["project", "belief", "release_ordinal", "rho", "p", "n"];

#[derive(Debug, Serialize, Deserialize)]
struct WindowRow {
    project: String,
    release_ordinal: usize,
    tag_name: String,
    release_time: i64,
    distinct_files: usize,
    qualified: bool,
    right_censored: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExclusionRow {
    project: String,
    belief: BeliefId,
    releases_total: usize,
    releases_used: usize,
    windows_total: usize,
    not_qualified: usize,
    too_few_observations: usize,
    not_significant: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProjectRow {
    project: String,
    commits: usize,
    bug_fix_fraction: f64,
    releases: usize,
    developers: usize,
    active_years: f64,
}

pub fn population_rows(projects: &[ProjectAssessment]) -> Vec<PopulationRow> {
    projects
        .iter()
        .flat_map(|p| &p.populations)
        .flat_map(|pop| {
            pop.scores.iter().map(move |s| PopulationRow {
                project: pop.project.clone(),
                belief: pop.belief,
                release_ordinal: s.release_ordinal,
                rho: s.rho,
                p: s.p_value,
                n: s.n,
            })
        })
        .collect()
}

pub fn write_assessment(dir: &Path, projects: &[ProjectAssessment]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_rows(&dir.join(POPULATIONS_FILE), &POPULATION_HEADER, &population_rows(projects))?;

    let windows: Vec<WindowRow> = projects
        .iter()
        .flat_map(|p| {
            p.windows.iter().map(move |w| WindowRow {
                project: p.project.clone(),
                release_ordinal: w.release_ordinal,
                tag_name: w.tag_name.clone(),
                release_time: w.release_time,
                distinct_files: w.distinct_files,
                qualified: w.qualified,
                right_censored: w.right_censored,
            })
        })
        .collect();
    write_rows(
        &dir.join(WINDOWS_FILE),
        &["project", "release_ordinal", "tag_name", "release_time", "distinct_files", "qualified", "right_censored"],
        &windows,
    )?;

    let exclusions: Vec<ExclusionRow> = projects
        .iter()
        .flat_map(|p| &p.populations)
        .map(|pop| ExclusionRow {
            project: pop.project.clone(),
            belief: pop.belief,
            releases_total: pop.releases_total,
            releases_used: pop.releases_used(),
            windows_total: pop.exclusions.windows_total,
            not_qualified: pop.exclusions.not_qualified,
            too_few_observations: pop.exclusions.too_few_observations,
            not_significant: pop.exclusions.not_significant,
        })
        .collect();
    write_rows(
        &dir.join(EXCLUSIONS_FILE),
        &[
            "project", "belief", "releases_total", "releases_used", "windows_total",
            "not_qualified", "too_few_observations", "not_significant",
        ],
        &exclusions,
    )?;

    let summaries: Vec<ProjectRow> = projects
        .iter()
        .map(|p| ProjectRow {
            project: p.project.clone(),
            commits: p.summary.commit_count,
            bug_fix_fraction: p.summary.bug_fix_fraction,
            releases: p.summary.release_count,
            developers: p.summary.developer_count,
            active_years: p.summary.active_years,
        })
        .collect();
    write_rows(
        &dir.join(PROJECTS_FILE),
        &["project", "commits", "bug_fix_fraction", "releases", "developers", "active_years"],
        &summaries,
    )
}

/// Rebuilds assessments from an assess directory, joining each score with
/// its window's release time and size.
pub fn read_assessment(dir: &Path) -> Result<Vec<ProjectAssessment>> {
    let projects: Vec<ProjectRow> = read_rows(&dir.join(PROJECTS_FILE))?;
    let windows: Vec<WindowRow> = read_rows(&dir.join(WINDOWS_FILE))?;
    let exclusions: Vec<ExclusionRow> = read_rows(&dir.join(EXCLUSIONS_FILE))?;
    let scores: Vec<PopulationRow> = read_rows(&dir.join(POPULATIONS_FILE))?;

    let mut by_window: BTreeMap<(String, usize), WindowInfo> = BTreeMap::new();
    let mut windows_of: BTreeMap<String, Vec<WindowInfo>> = BTreeMap::new();
    for w in windows {
        let info = WindowInfo {
            release_ordinal: w.release_ordinal,
            tag_name: w.tag_name,
            release_time: w.release_time,
            distinct_files: w.distinct_files,
            qualified: w.qualified,
            right_censored: w.right_censored,
        };
        by_window.insert((w.project.clone(), w.release_ordinal), info.clone());
        windows_of.entry(w.project).or_default().push(info);
    }

    let mut pops: BTreeMap<(String, BeliefId), BeliefPopulation> = exclusions
        .into_iter()
        .map(|e| {
            let pop = BeliefPopulation {
                project: e.project.clone(),
                belief: e.belief,
                scores: Vec::new(),
                releases_total: e.releases_total,
                exclusions: Exclusions {
                    windows_total: e.windows_total,
                    not_qualified: e.not_qualified,
                    too_few_observations: e.too_few_observations,
                    not_significant: e.not_significant,
                },
            };
            ((e.project, e.belief), pop)
        })
        .collect();
    for (i, s) in scores.into_iter().enumerate() {
        let corrupt = |message: String| Error::CorruptCache {
            path: dir.join(POPULATIONS_FILE),
            line: i + 2,
            message,
        };
        let w = by_window
            .get(&(s.project.clone(), s.release_ordinal))
            .ok_or_else(|| corrupt(format!("no window {} for {}", s.release_ordinal, s.project)))?;
        let pop = pops
            .get_mut(&(s.project.clone(), s.belief))
            .ok_or_else(|| corrupt(format!("no exclusion row for {} {}", s.project, s.belief)))?;
        pop.scores.push(SupportScore {
            belief: s.belief,
            release_ordinal: s.release_ordinal,
            release_time: w.release_time,
            distinct_files: w.distinct_files,
            rho: s.rho,
            p_value: s.p,
            n: s.n,
        });
    }

    Ok(projects
        .into_iter()
        .map(|p| {
            let populations = BeliefId::ALL
                .iter()
                .map(|&b| {
                    pops.remove(&(p.project.clone(), b)).unwrap_or_else(|| BeliefPopulation {
                        project: p.project.clone(),
                        belief: b,
                        scores: Vec::new(),
                        releases_total: p.releases,
                        exclusions: Exclusions::default(),
                    })
                })
                .collect();
            ProjectAssessment {
                windows: windows_of.remove(&p.project).unwrap_or_default(),
                summary: ProjectSummary {
                    commit_count: p.commits,
                    bug_fix_fraction: p.bug_fix_fraction,
                    release_count: p.releases,
                    developer_count: p.developers,
                    active_years: p.active_years,
                },
                project: p.project,
                populations,
            }
        })
        .collect())
}

#[derive(Debug, Serialize)]
struct VectorRow<'a> {
    belief_id: BeliefId,
    entity_id: &'a str,
    x: f64,
    y: u64,
}

/// One CSV per scored window, named by release ordinal.
pub fn write_vectors(dir: &Path, scored: &[ScoredWindow]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for sw in scored {
        let rows: Vec<VectorRow> = sw
            .vectors
            .iter()
            .flat_map(|v| {
                (0..v.len()).map(move |i| VectorRow {
                    belief_id: v.belief,
                    entity_id: &v.entity_ids[i],
                    x: v.x[i],
                    y: v.y[i],
                })
            })
            .collect();
        let path = dir.join(format!("window_{:04}.csv", sw.info.release_ordinal));
        write_rows(&path, &["belief_id", "entity_id", "x", "y"], &rows)?;
    }
    Ok(())
}
