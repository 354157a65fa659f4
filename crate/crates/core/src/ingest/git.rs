//! History and tag extraction by driving the `git` command line.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use super::{order_releases, ChangeRecord, Release};
use crate::error::{Error, Result};
use crate::labeling::{is_bug_fix, KeywordSet};

const RECORD_SEP: char = '\x1e';
const FIELD_SEP: char = '\x1f';
const HEADER_END: char = '\x1d';
const LOG_FORMAT: &str = "--format=%x1e%H%x1f%ct%x1f%an%x1f%ae%x1f%B%x1d";

#[derive(Debug, Clone)]
pub struct ExtractOptions {
    /// Walk only the first-parent chain. Merge commits never carry churn.
    pub first_parent: bool,
    /// Let git pair deletes with adds and attribute churn to the new path.
    pub follow_renames: bool,
    pub keywords: KeywordSet,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            first_parent: true,
            follow_renames: false,
            keywords: KeywordSet::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct History {
    /// Sorted by (commit_time, commit_id, file_path).
    pub records: Vec<ChangeRecord>,
    /// Log lines that could not be parsed and were skipped.
    pub warnings: Vec<String>,
    pub total_insertions: u64,
    pub total_deletions: u64,
}

fn git(repo: &Path, args: &[&str]) -> Result<std::process::Output> {
    Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(["-c", "core.quotepath=off", "-c", "log.showSignature=false"])
        .args(args)
        .output()
        .map_err(|e| Error::io(repo, e))
}

fn git_ok(repo: &Path, args: &[&str]) -> Result<String> {
    let out = git(repo, args)?;
    if !out.status.success() {
        return Err(Error::Git {
            command: args.join(" "),
            stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
        });
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn ensure_repository(repo: &Path) -> Result<()> {
    if !repo.is_dir() {
        return Err(Error::NotARepository(repo.to_path_buf()));
    }
    let out = git(repo, &["rev-parse", "--git-dir"])?;
    if !out.status.success() {
        return Err(Error::NotARepository(repo.to_path_buf()));
    }
    Ok(())
}

fn has_commits(repo: &Path) -> Result<bool> {
    Ok(git(repo, &["rev-parse", "--verify", "-q", "HEAD"])?
        .status
        .success())
}

pub fn extract_history(repo: &Path, opts: &ExtractOptions) -> Result<History> {
    ensure_repository(repo)?;
    if !has_commits(repo)? {
        return Ok(History::default());
    }
    let mut args = vec!["log", "--no-color", "--no-merges", "--numstat", LOG_FORMAT];
    if opts.first_parent {
        args.push("--first-parent");
    }
    args.push(if opts.follow_renames { "-M" } else { "--no-renames" });
    args.push("HEAD");
    let raw = git_ok(repo, &args)?;
    Ok(parse_log(&raw, &opts.keywords))
}

fn normalize_author(name: &str, email: &str) -> String {
    let email = email.trim();
    if email.is_empty() {
        name.trim().to_lowercase()
    } else {
        email.to_lowercase()
    }
}

/// Parses the output of `git log --numstat` produced with [`LOG_FORMAT`].
pub(crate) fn parse_log(raw: &str, keywords: &KeywordSet) -> History {
    let mut history = History::default();
    let mut merged: BTreeMap<(i64, String, String), ChangeRecord> = BTreeMap::new();

    for chunk in raw.split(RECORD_SEP).filter(|c| !c.trim().is_empty()) {
        let Some((header, numstat)) = chunk.split_once(HEADER_END) else {
            history
                .warnings
                .push(format!("commit block without header terminator: {:.40}", chunk));
            continue;
        };
        let fields: Vec<&str> = header.splitn(5, FIELD_SEP).collect();
        let [id, time, name, email, message] = fields[..] else {
            history
                .warnings
                .push(format!("malformed commit header: {:.60}", header));
            continue;
        };
        let Ok(commit_time) = time.trim().parse::<i64>() else {
            history
                .warnings
                .push(format!("bad commit time {time:?} in {id}"));
            continue;
        };
        let commit_id = id.trim().to_string();
        let author = normalize_author(name, email);
        let fix = is_bug_fix(message, keywords);

        for line in numstat.lines().filter(|l| !l.trim().is_empty()) {
            let Some((ins, del, path)) = parse_numstat_line(line) else {
                history
                    .warnings
                    .push(format!("unparsable numstat line in {commit_id}: {line:?}"));
                continue;
            };
            history.total_insertions += ins;
            history.total_deletions += del;
            let key = (commit_time, commit_id.clone(), path.clone());
            merged
                .entry(key)
                .and_modify(|r| {
                    r.insertions += ins;
                    r.deletions += del;
                })
                .or_insert_with(|| ChangeRecord {
                    commit_id: commit_id.clone(),
                    commit_time,
                    author: author.clone(),
                    file_path: path,
                    insertions: ins,
                    deletions: del,
                    is_bug_fix: fix,
                });
        }
    }
    history.records = merged.into_values().collect();
    history
}

fn parse_count(s: &str) -> Option<u64> {
    if s == "-" {
        Some(0)
    } else {
        s.parse().ok()
    }
}

fn parse_numstat_line(line: &str) -> Option<(u64, u64, String)> {
    let mut parts = line.splitn(3, '\t');
    let ins = parse_count(parts.next()?.trim())?;
    let del = parse_count(parts.next()?.trim())?;
    let path = parts.next()?;
    let path = resolve_rename(&unquote(path)?);
    if path.is_empty() {
        return None;
    }
    Some((ins, del, path))
}

/// Reduces git's rename notation (`old => new`, `dir/{a => b}/f`) to the new
/// path. Plain paths pass through.
fn resolve_rename(path: &str) -> String {
    if let (Some(open), Some(close)) = (path.find('{'), path.rfind('}')) {
        if open < close {
            let inner = &path[open + 1..close];
            if let Some((_, new)) = inner.split_once(" => ") {
                let joined = format!("{}{}{}", &path[..open], new, &path[close + 1..]);
                return joined.replace("//", "/");
            }
        }
    }
    match path.split_once(" => ") {
        Some((_, new)) => new.to_string(),
        None => path.to_string(),
    }
}

/// Undoes git's C-style quoting of unusual paths.
fn unquote(path: &str) -> Option<String> {
    let Some(inner) = path.strip_prefix('"').and_then(|p| p.strip_suffix('"')) else {
        return Some(path.to_string());
    };
    let mut bytes = Vec::with_capacity(inner.len());
    let mut iter = inner.bytes().peekable();
    while let Some(b) = iter.next() {
        if b != b'\\' {
            bytes.push(b);
            continue;
        }
        match iter.next()? {
            b'n' => bytes.push(b'\n'),
            b't' => bytes.push(b'\t'),
            b'\\' => bytes.push(b'\\'),
            b'"' => bytes.push(b'"'),
            d @ b'0'..=b'7' => {
                let mut v = (d - b'0') as u32;
                for _ in 0..2 {
                    let next = *iter.peek()?;
                    if !(b'0'..=b'7').contains(&next) {
                        return None;
                    }
                    v = v * 8 + (next - b'0') as u32;
                    iter.next();
                }
                bytes.push(u8::try_from(v).ok()?);
            }
            other => bytes.push(other),
        }
    }
    String::from_utf8(bytes).ok()
}

/// Lists every tag with the committer time of the commit it points to.
pub fn extract_releases(repo: &Path) -> Result<Vec<Release>> {
    ensure_repository(repo)?;
    let raw = git_ok(
        repo,
        &[
            "for-each-ref",
            "refs/tags",
            "--format=%(refname)%09%(objecttype)%09%(*objecttype)%09%(committerdate:unix)%09%(*committerdate:unix)",
        ],
    )?;
    let mut tags = Vec::new();
    for line in raw.lines().filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split('\t').collect();
        let [refname, kind, target_kind, own_time, target_time] = fields[..] else {
            continue;
        };
        let name = refname.strip_prefix("refs/tags/").unwrap_or(refname);
        let time = match (kind, target_kind) {
            ("commit", _) => own_time.parse().ok(),
            ("tag", "commit") => target_time.parse().ok(),
            _ => peel_to_commit_time(repo, refname)?,
        };
        if let Some(t) = time {
            tags.push((name.to_string(), t));
        }
    }
    Ok(order_releases(tags))
}

/// Handles tags of tags; tags of trees or blobs yield `None`.
fn peel_to_commit_time(repo: &Path, refname: &str) -> Result<Option<i64>> {
    let spec = format!("{refname}^{{commit}}");
    let out = git(repo, &["log", "-1", "--format=%ct", &spec, "--"])?;
    if !out.status.success() {
        return Ok(None);
    }
    Ok(String::from_utf8_lossy(&out.stdout).trim().parse().ok())
}
