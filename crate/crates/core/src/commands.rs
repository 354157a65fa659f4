//! The four pipeline stages behind the command-line tool.

use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{analyze, assess_project, DatasetAnalysis, ProjectAssessment};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::export::{read_assessment, write_assessment, write_vectors};
use crate::ingest::{
    apply_sanity_checks, extract_history, extract_releases, read_history, read_releases,
    write_history, write_releases, ProjectSummary, SanityVerdict,
};
use crate::reporting::{render, write_report};
use crate::synthgen::{generate, Scenario, ScenarioSpec};

pub const HISTORY_FILE: &str = "history.jsonl";
pub const RELEASES_FILE: &str = "releases.jsonl";

#[derive(Debug)]
pub struct MineOutcome {
    pub records: usize,
    pub releases: usize,
    pub summary: ProjectSummary,
    pub verdict: SanityVerdict,
    /// False when the sanity checks failed without `force`.
    pub written: bool,
    pub warnings: Vec<String>,
}

pub fn mine(repo: &Path, out: &Path, cfg: &Config, force: bool) -> Result<MineOutcome> {
    let history = extract_history(repo, &cfg.extract_options()?)?;
    let releases = extract_releases(repo)?;
    let summary = ProjectSummary::from_history(&history.records, &releases);
    let verdict = apply_sanity_checks(&summary);
    let written = verdict.passed() || force;
    if written {
        write_caches(out, &history.records, &releases)?;
    }
    Ok(MineOutcome {
        records: history.records.len(),
        releases: releases.len(),
        summary,
        verdict,
        written,
        warnings: history.warnings,
    })
}

fn write_caches(out: &Path, records: &[crate::ingest::ChangeRecord], releases: &[crate::ingest::Release]) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_history(&out.join(HISTORY_FILE), records)?;
    write_releases(&out.join(RELEASES_FILE), releases)
}

fn dir_name(dir: &Path) -> Result<String> {
    let canonical = dir.canonicalize().map_err(|e| Error::io(dir, e))?;
    Ok(canonical
        .file_name()
        .map_or_else(|| "project".to_string(), |n| n.to_string_lossy().into_owned()))
}

/// A cache directory itself, or its immediate subdirectories that hold a
/// history cache, as (project name, directory) pairs sorted by name.
pub fn project_dirs(cache_dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    if cache_dir.join(HISTORY_FILE).is_file() {
        return Ok(vec![(dir_name(cache_dir)?, cache_dir.to_path_buf())]);
    }
    let entries = fs::read_dir(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    let mut found = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(cache_dir, e))?.path();
        if path.join(HISTORY_FILE).is_file() {
            found.push((dir_name(&path)?, path));
        }
    }
    if found.is_empty() {
        return Err(Error::Contract(format!(
            "no {HISTORY_FILE} in {} or its subdirectories",
            cache_dir.display()
        )));
    }
    found.sort();
    Ok(found)
}

/// Assesses every project under `cache_dir` and writes the populations.
/// With `vectors`, per-window belief vectors go to `out/vectors/<project>`.
pub fn assess(cache_dir: &Path, out: &Path, cfg: &Config, vectors: bool) -> Result<Vec<ProjectAssessment>> {
    let assess_cfg = cfg.assess();
    let mut projects = Vec::new();
    for (name, dir) in project_dirs(cache_dir)? {
        let records = read_history(&dir.join(HISTORY_FILE))?;
        let releases = read_releases(&dir.join(RELEASES_FILE))?;
        let (assessment, scored) = assess_project(&name, &records, &releases, &assess_cfg);
        if vectors {
            write_vectors(&out.join("vectors").join(&name), &scored)?;
        }
        projects.push(assessment);
    }
    write_assessment(out, &projects)?;
    Ok(projects)
}

/// Pools the assessments of every directory and renders the report.
pub fn report(assess_dirs: &[PathBuf], out: &Path, cfg: &Config) -> Result<DatasetAnalysis> {
    let mut projects = Vec::new();
    for dir in assess_dirs {
        projects.extend(read_assessment(dir)?);
    }
    projects.sort_by(|a, b| a.project.cmp(&b.project));
    let analysis = analyze(&projects, &cfg.analysis());
    write_report(out, &render(&projects, &analysis)?)?;
    Ok(analysis)
}

pub fn synth(scenario: &Path, out: &Path, seed: Option<u64>) -> Result<Scenario> {
    let mut spec = ScenarioSpec::from_file(scenario)?;
    if let Some(s) = seed {
        spec.noise_seed = s;
    }
    let generated = generate(&spec)?;
    write_caches(out, &generated.records, &generated.releases)?;
    Ok(generated)
}
