//! `fdlab`: runs the identity suites and writes a JSON report.

mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{ConfigError, RunConfig};
use report::Report;

#[derive(Parser)]
#[command(name = "fdlab", version, about = "Numerical checks of coefficient-function identities on the ax+b group, the reduced Heisenberg group and SU(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites (all by default) and write the report.
    Verify {
        /// Suite ids or glob patterns such as `axb.*`; overrides `suites` from the config.
        suites: Vec<String>,
        /// Config file, key = value lines or JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Multiplies every tolerance.
        #[arg(long)]
        tol_scale: Option<f64>,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Report path; the report goes to standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the corpus size of every selected suite.
        #[arg(long)]
        corpus_size: Option<usize>,
        #[arg(long)]
        max_n_heis: Option<i64>,
        #[arg(long)]
        max_n_su2: Option<usize>,
        /// Print one line per failing record to standard error.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Print the suite ids.
    List,
    /// Print the identity checked by a suite, its reference and tolerances.
    Explain { id: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for s in suites::ALL {
                println!("{:<30} {}", s.id, s.statement);
            }
            ExitCode::SUCCESS
        }
        Command::Explain { id } => match suites::find(&id) {
            Some(s) => {
                println!("{}", s.id);
                println!("  identity:  {}", s.statement);
                println!("  reference: {}", s.reference);
                println!("  residual:  {}", s.residual);
                println!("  tolerance: {:e}", s.tolerance);
                for (label, t) in s.label_tolerances {
                    println!("             {label}: {t:e}");
                }
                println!("  corpus:    {} × {}", s.default_size, s.size_unit);
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("fdlab: unknown suite '{id}'");
                ExitCode::from(2)
            }
        },
        Command::Verify { suites, config, seed, tol_scale, jobs, out, corpus_size, max_n_heis, max_n_su2, verbose } => {
            let cfg = (|| -> Result<RunConfig, ConfigError> {
                let mut cfg = match &config {
                    Some(path) => {
                        let text = std::fs::read_to_string(path)
                            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
                        RunConfig::parse(&text)?
                    }
                    None => RunConfig::default(),
                };
                if !suites.is_empty() {
                    cfg.suites = suites;
                }
                if let Some(s) = seed {
                    cfg.seed = s;
                }
                if let Some(t) = tol_scale {
                    cfg.tol_scale = t;
                }
                if let Some(o) = &out {
                    cfg.out_path = Some(o.display().to_string());
                }
                if corpus_size.is_some() {
                    cfg.corpus_size = corpus_size;
                }
                if let Some(n) = max_n_heis {
                    cfg.max_n_heis = n;
                }
                if let Some(n) = max_n_su2 {
                    cfg.max_n_su2 = n;
                }
                Ok(cfg)
            })();
            let cfg = match cfg {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("fdlab: {e}");
                    return ExitCode::from(2);
                }
            };
            let ids = match cfg.validate() {
                Ok(ids) => ids,
                Err(e) => {
                    eprintln!("fdlab: {e}");
                    return ExitCode::from(2);
                }
            };
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("fdlab: {e}");
                    return ExitCode::from(2);
                }
            };
            let report = pool.install(|| run(&cfg, &ids, verbose));
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match &cfg.out_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("fdlab: cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{json}"),
            }
            eprintln!(
                "fdlab: {} records, {} passed, {} failed",
                report.summary.total, report.summary.passed, report.summary.failed
            );
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cfg: &RunConfig, ids: &[&str], verbose: bool) -> Report {
    let mut summaries = Vec::new();
    let mut records = Vec::new();
    for id in ids {
        let suite = suites::find(id).expect("validated id");
        let start = Instant::now();
        let (summary, recs) = suite.run(cfg);
        eprintln!(
            "{:<30} {:>5} passed {:>4} failed  {:>8.1} s",
            id,
            summary.passed,
            summary.failed,
            start.elapsed().as_secs_f64()
        );
        if verbose {
            for r in recs.iter().filter(|r| !r.pass) {
                match &r.error {
                    Some(e) => eprintln!("  FAIL {}: {e}", r.id),
                    None => eprintln!(
                        "  FAIL {}: residual {:?} > tolerance {:e} + slack {:e}",
                        r.id, r.residual, r.tolerance, r.tail_bound
                    ),
                }
            }
        }
        summaries.push(summary);
        records.extend(recs);
    }
    Report::new(cfg.clone(), summaries, records)
}
