use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use belief_miner::commands;
use belief_miner::config::Config;
use belief_miner::{Error, Result};

/// Measures release-by-release support for defect-prediction beliefs in a
/// git history.
#[derive(Debug, Parser)]
#[command(name = "belief-miner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract history and release caches from a local repository.
    Mine {
        repo: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Write caches even when the project fails the sanity checks.
        #[arg(long)]
        force: bool,
        /// Walk every parent, not just the first-parent chain.
        #[arg(long)]
        all_commits: bool,
        /// Attribute renamed files' churn to their new path.
        #[arg(long)]
        follow_renames: bool,
        /// Bug-fix keyword stems, one per line.
        #[arg(long, value_name = "FILE")]
        keywords: Option<PathBuf>,
        /// Add the keyword file's stems to the defaults instead of replacing them.
        #[arg(long)]
        extend: bool,
    },
    /// Compute belief populations for one cache directory or a directory of them.
    Assess {
        cache_dir: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also dump per-window belief vectors.
        #[arg(long)]
        vectors: bool,
    },
    /// Pool one or more assess directories and render the report.
    Report {
        #[arg(required = true)]
        assess_dirs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
        /// Pin the small/medium release-size boundary to 18 files.
        #[arg(long)]
        replication_mode: bool,
    },
    /// Generate synthetic caches from a scenario file.
    Synth {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Mine { repo, common, force, all_commits, follow_renames, keywords, extend } => {
            let mut cfg = load_config(&common)?;
            cfg.all_commits |= all_commits;
            cfg.follow_renames |= follow_renames;
            cfg.extend |= extend;
            if keywords.is_some() {
                cfg.keyword_file = keywords;
            }
            let outcome = commands::mine(&repo, &common.out, &cfg, force)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            println!("records: {}, releases: {}", outcome.records, outcome.releases);
            let s = &outcome.summary;
            println!(
                "commits: {}, bug-fix fraction: {:.3}, developers: {}, active years: {:.2}",
                s.commit_count, s.bug_fix_fraction, s.developer_count, s.active_years
            );
            if outcome.verdict.passed() {
                println!("sanity checks: passed");
                return Ok(ExitCode::SUCCESS);
            }
            let rules: Vec<String> = outcome.verdict.violated.iter().map(|r| r.to_string()).collect();
            if outcome.written {
                eprintln!("warning: sanity checks failed ({}); caches written because of --force", rules.join("; "));
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("sanity checks failed:");
                for r in rules {
                    eprintln!("  {r}");
                }
                Ok(ExitCode::from(2))
            }
        }
        Command::Assess { cache_dir, common, vectors } => {
            let cfg = load_config(&common)?;
            let projects = commands::assess(&cache_dir, &common.out, &cfg, vectors)?;
            for p in &projects {
                let qualified = p.windows.iter().filter(|w| w.qualified).count();
                let scores: usize = p.populations.iter().map(|b| b.scores.len()).sum();
                if qualified == 0 {
                    println!("notice: {} has no qualified release windows; populations are empty", p.project);
                }
                println!(
                    "{}: {} windows, {} qualified, {} significant scores",
                    p.project,
                    p.windows.len(),
                    qualified,
                    scores
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { assess_dirs, common, replication_mode } => {
            let mut cfg = load_config(&common)?;
            cfg.replication_mode |= replication_mode;
            let analysis = commands::report(&assess_dirs, &common.out, &cfg)?;
            if analysis.summaries.is_empty() {
                println!("notice: no projects found; report marked as no data");
            }
            println!("report written to {}", common.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth { scenario, common } => {
            let generated = commands::synth(&scenario, &common.out, common.seed)?;
            println!(
                "records: {}, releases: {}",
                generated.records.len(),
                generated.releases.len()
            );
            if let (Some(sigma), Some(rho)) = (generated.noise_sigma, generated.probe_rho) {
                println!("calibrated noise {sigma:.4}, probe median rho {rho:.3}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::NotARepository(_)) {
                eprintln!("usage: belief-miner mine <REPO> --out <DIR>");
            }
            ExitCode::from(1)
        }
    }
}
