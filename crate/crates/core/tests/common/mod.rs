#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub const T0: i64 = 1_600_000_000;
pub const DAY: i64 = 86_400;

pub fn day(d: i64) -> i64 {
    T0 + d * DAY
}

/// Runs git with user and system configuration masked out.
pub fn git(repo: &Path, args: &[&str], who: (&str, &str), time: i64) {
    let date = format!("@{time} +0000");
    let out = Command::new("git")
        .args(args)
        .current_dir(repo)
        .env("GIT_CONFIG_GLOBAL", "/dev/null")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .env("HOME", repo)
        .env("GIT_AUTHOR_NAME", who.0)
        .env("GIT_AUTHOR_EMAIL", who.1)
        .env("GIT_COMMITTER_NAME", who.0)
        .env("GIT_COMMITTER_EMAIL", who.1)
        .env("GIT_AUTHOR_DATE", &date)
        .env("GIT_COMMITTER_DATE", &date)
        .output()
        .expect("git runs");
    assert!(
        out.status.success(),
        "git {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

pub const ALICE: (&str, &str) = ("Alice", "Alice@Example.com");
pub const BOB: (&str, &str) = ("Bob", "bob@example.com");
pub const CAROL: (&str, &str) = ("Carol", "carol@example.com");

pub fn init_repo(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    git(dir, &["init", "-q", "-b", "main"], ALICE, T0);
    git(dir, &["config", "commit.gpgsign", "false"], ALICE, T0);
    git(dir, &["config", "tag.gpgsign", "false"], ALICE, T0);
    git(dir, &["config", "core.autocrlf", "false"], ALICE, T0);
}

pub fn write(dir: &Path, path: &str, lines: &[String]) {
    let p = dir.join(path);
    fs::create_dir_all(p.parent().unwrap()).unwrap();
    let mut text = lines.join("\n");
    text.push('\n');
    fs::write(p, text).unwrap();
}

pub fn lines(prefix: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

pub fn commit(dir: &Path, who: (&str, &str), d: i64, message: &str) {
    git(dir, &["add", "-A"], who, day(d));
    git(dir, &["commit", "-q", "--allow-empty", "-m", message], who, day(d));
}

/// Twelve commits over five releases. Day offsets and churn:
///
/// ```text
/// c1  d0   alice "Initial import"        src/app.py +10, src/util.py +5, README.md +3
/// c2  d2   bob   "Add core module"       lib/core.rb +20                     v0.1
/// c3  d5   alice "Fix crash in app..."   src/app.py +2/-1
/// c4  d9   carol "Add logo and tests"    assets/logo.png (binary), tests/test_app.py +8
/// c5  d12  bob   "Refactor util helpers" src/util.py +4/-3, lib/core.rb +1/-1  v0.2 (annotated)
/// c6  d20  carol "Resolve issue with..." lib/core.rb +3/-2
/// c7  d25  alice "Prefix routes..."      web/index.html +6, src/app.py +1/-1
/// c8  d30  bob   "Patch util edge case"  src/util.py +2/-2                  v0.3
/// c9  d40  carol "Update docs"           README.md +4/-1
/// c10 d45  alice "Improve app perf..."   src/app.py +5/-5                   v0.4
/// c11 d100 bob   "Fix bug in core..."    lib/core.rb +1/-1, src/util.py +1
/// c12 d200 carol "Bump version"          (empty)                            v1.0
/// ```
pub fn build_fixture(dir: &Path) -> PathBuf {
    init_repo(dir);
    let mut app = lines("a", 1..=10);
    let mut util = lines("u", 1..=5);
    let mut readme = lines("r", 1..=3);
    let mut core = lines("k", 1..=20);

    write(dir, "src/app.py", &app);
    write(dir, "src/util.py", &util);
    write(dir, "README.md", &readme);
    commit(dir, ALICE, 0, "Initial import");

    write(dir, "lib/core.rb", &core);
    commit(dir, BOB, 2, "Add core module");
    git(dir, &["tag", "v0.1"], BOB, day(2));

    app[0] = "a1 guarded".into();
    app.push("a11".into());
    write(dir, "src/app.py", &app);
    commit(dir, ALICE, 5, "Fix crash in app startup");

    let png: Vec<u8> = vec![0x89, b'P', b'N', b'G', 0, 0, 0, 13, 0, 1, 2, 3, 0, 255];
    fs::create_dir_all(dir.join("assets")).unwrap();
    fs::write(dir.join("assets/logo.png"), png).unwrap();
    write(dir, "tests/test_app.py", &lines("t", 1..=8));
    commit(dir, CAROL, 9, "Add logo and tests");

    util.splice(0..3, lines("v", 1..=4));
    write(dir, "src/util.py", &util);
    core[0] = "k1 tidy".into();
    write(dir, "lib/core.rb", &core);
    commit(dir, BOB, 12, "Refactor util helpers");
    git(dir, &["tag", "-a", "v0.2", "-m", "release 0.2"], BOB, day(12));

    core.splice(1..3, lines("p", 1..=3));
    write(dir, "lib/core.rb", &core);
    commit(dir, CAROL, 20, "Resolve issue with core parsing");

    write(dir, "web/index.html", &lines("h", 1..=6));
    app[4] = "a5 routed".into();
    write(dir, "src/app.py", &app);
    commit(dir, ALICE, 25, "Prefix routes with /api");

    util.splice(4..6, lines("w", 1..=2));
    write(dir, "src/util.py", &util);
    commit(dir, BOB, 30, "Patch util edge case");
    git(dir, &["tag", "v0.3"], BOB, day(30));

    readme.splice(0..1, lines("s", 1..=4));
    write(dir, "README.md", &readme);
    commit(dir, CAROL, 40, "Update docs");

    app.splice(5..10, lines("z", 1..=5));
    write(dir, "src/app.py", &app);
    commit(dir, ALICE, 45, "Improve app performance");
    git(dir, &["tag", "v0.4"], ALICE, day(45));

    core[10] = "k11 checked".into();
    write(dir, "lib/core.rb", &core);
    util.push("u6".into());
    write(dir, "src/util.py", &util);
    commit(dir, BOB, 100, "Fix bug in core and util");

    commit(dir, CAROL, 200, "Bump version");
    git(dir, &["tag", "v1.0"], CAROL, day(200));
    dir.to_path_buf()
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}
