mod common;

use std::fs;

use belief_miner::analysis::{assess_project, AssessConfig, Exclusions};
use belief_miner::config::Config;
use belief_miner::ingest::{extract_history, extract_releases, ExtractOptions, SourceFilter};
use belief_miner::metrics::{compute, HcmConfig};
use belief_miner::windowing::{build_windows, count_post_defects, qualify_window, DEFAULT_POST_DAYS};
use belief_miner::{commands, BeliefId};
use common::{build_fixture, day, golden};

fn fixture() -> (tempfile::TempDir, std::path::PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let repo = build_fixture(&tmp.path().join("repo"));
    (tmp, repo)
}

#[test]
fn mined_caches_match_golden() {
    let (tmp, repo) = fixture();
    let out = tmp.path().join("cache");
    let outcome = commands::mine(&repo, &out, &Config::default(), true).unwrap();
    assert_eq!(outcome.records, 17);
    assert_eq!(outcome.releases, 5);
    assert!(!outcome.verdict.passed());
    assert!(outcome.warnings.is_empty());
    for (name, gold) in [("history.jsonl", "fixture_history.jsonl"), ("releases.jsonl", "fixture_releases.jsonl")] {
        assert_eq!(
            fs::read_to_string(out.join(name)).unwrap(),
            fs::read_to_string(golden(gold)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn sanity_failure_without_force_writes_nothing() {
    let (tmp, repo) = fixture();
    let out = tmp.path().join("cache");
    let outcome = commands::mine(&repo, &out, &Config::default(), false).unwrap();
    assert!(!outcome.written);
    assert!(!out.join("history.jsonl").exists());
    let rules: Vec<String> = outcome.verdict.violated.iter().map(|r| r.to_string()).collect();
    assert_eq!(rules, vec!["commits < 1000", "developers < 30", "active years < 3"]);
}

#[test]
fn hand_derived_windows() {
    let (_tmp, repo) = fixture();
    let history = extract_history(&repo, &ExtractOptions::default()).unwrap();
    let releases = extract_releases(&repo).unwrap();
    let records = &history.records;
    let windows = build_windows(&releases, records, DEFAULT_POST_DAYS, &SourceFilter::default());
    assert_eq!(windows.len(), 4);
    let qualified: Vec<bool> = windows.iter().map(|w| qualify_window(w, 3)).collect();
    assert_eq!(qualified, vec![true, true, false, false]);
    assert_eq!(
        windows.iter().map(|w| w.distinct_files).collect::<Vec<_>>(),
        vec![3, 4, 1, 2]
    );
    assert!(!windows[0].right_censored);
    assert!(windows[1].right_censored);

    let hcm = HcmConfig::default();
    let w2 = &windows[0];
    let d2 = count_post_defects(w2, records);
    let v = |b, w, d| compute(b, w, d, &hcm);
    let b3 = v(BeliefId::B3, w2, &d2);
    assert_eq!(b3.entity_ids, vec!["lib/core.rb", "src/app.py", "src/util.py"]);
    assert_eq!(b3.y, vec![2, 1, 2]);
    assert_eq!(b3.x, vec![1.0, 2.0, 4.0]);
    assert_eq!(v(BeliefId::B9, w2, &d2).x, vec![1.0, 1.0, 3.0]);
    assert_eq!(v(BeliefId::B1, w2, &d2).x, vec![1.0, 0.0, 1.0]);
    let b5 = v(BeliefId::B5, w2, &d2);
    assert_eq!((b5.x, b5.y), (vec![3.0, 9.0], vec![1, 4]));

    let w3 = &windows[1];
    let d3 = count_post_defects(w3, records);
    let b3 = v(BeliefId::B3, w3, &d3);
    assert_eq!(
        b3.entity_ids,
        vec!["lib/core.rb", "src/app.py", "src/util.py", "web/index.html"]
    );
    assert_eq!(b3.y, vec![1, 1, 1, 0]);
    assert_eq!(b3.x, vec![3.0, 1.0, 2.0, 6.0]);
    assert_eq!(v(BeliefId::B9, w3, &d3).x, vec![2.0, 1.0, 2.0, 0.0]);
    let b1 = v(BeliefId::B1, w3, &d3).x;
    for (got, want) in b1.iter().zip([0.5, 0.5, 0.0, 0.5]) {
        assert!((got - want).abs() < 1e-12, "{b1:?}");
    }
    assert_eq!(v(BeliefId::B2, w3, &d3).x, vec![1.0; 4]);
    assert_eq!(v(BeliefId::B7, w3, &d3).x, vec![1.0, 0.0, 1.0, 0.0]);
    assert_eq!(v(BeliefId::B8, w3, &d3).x, vec![1.0; 4]);
    assert_eq!(
        v(BeliefId::B4, w3, &d3).x,
        vec![day(20) as f64, day(25) as f64, day(30) as f64, day(25) as f64]
    );
    let b6 = v(BeliefId::B6, w3, &d3);
    assert_eq!(b6.entity_ids, vec!["lib/core.rb", "src/util.py"]);
    assert_eq!(v(BeliefId::B10, w3, &d3).x, vec![0.0; 4]);
    let b5 = v(BeliefId::B5, w3, &d3);
    assert_eq!((b5.x, b5.y), (vec![5.0, 8.0, 4.0], vec![1, 1, 1]));
}

#[test]
fn fixture_exclusions_cover_every_filter() {
    let (_tmp, repo) = fixture();
    let history = extract_history(&repo, &ExtractOptions::default()).unwrap();
    let releases = extract_releases(&repo).unwrap();
    let (a, _) = assess_project("fixture", &history.records, &releases, &AssessConfig::default());
    for pop in &a.populations {
        assert!(pop.scores.is_empty());
        assert_eq!(pop.releases_total, 5);
        let e = pop.exclusions;
        assert_eq!((e.windows_total, e.not_qualified), (4, 2));
        let expected = match pop.belief {
            // too few entities in both qualified windows
            BeliefId::B5 | BeliefId::B6 => Exclusions { too_few_observations: 2, not_significant: 0, ..e },
            _ => Exclusions { too_few_observations: 1, not_significant: 1, ..e },
        };
        assert_eq!(e, expected, "{}", pop.belief);
    }
}

#[test]
fn first_parent_skips_side_branch_commits() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = tmp.path().join("repo");
    common::init_repo(&repo);
    common::write(&repo, "a.py", &common::lines("a", 1..=3));
    common::commit(&repo, common::ALICE, 0, "Start");
    common::git(&repo, &["checkout", "-q", "-b", "side"], common::ALICE, day(1));
    common::write(&repo, "b.py", &common::lines("b", 1..=4));
    common::commit(&repo, common::BOB, 1, "Side work");
    common::git(&repo, &["checkout", "-q", "main"], common::ALICE, day(2));
    common::write(&repo, "c.py", &common::lines("c", 1..=2));
    common::commit(&repo, common::ALICE, 2, "Main work");
    common::git(&repo, &["merge", "-q", "--no-ff", "-m", "Merge side", "side"], common::ALICE, day(3));

    let paths = |first_parent| {
        let opts = ExtractOptions { first_parent, ..ExtractOptions::default() };
        let h = extract_history(&repo, &opts).unwrap();
        h.records.into_iter().map(|r| r.file_path).collect::<Vec<_>>()
    };
    assert_eq!(paths(true), vec!["a.py", "c.py"]);
    assert_eq!(paths(false), vec!["a.py", "b.py", "c.py"]);
}
