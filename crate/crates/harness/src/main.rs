use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use svi_core::verify::{run_verify_suite, SuiteOptions};
use svi_harness::config::{parse_config, sec7_config, Overrides};
use svi_harness::output::read_aggregate_csv;
use svi_harness::plot::emit_default_plots;
use svi_harness::study::{run_study, StudySummary};
use svi_harness::{HarnessError, Result};

#[derive(Parser)]
#[command(name = "svi", version, about = "Stochastic VI solver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct Common {
    /// Replace the config's seeds with this one (or a run of seeds from it).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Score the iterates every this many iterations.
    #[arg(long)]
    cadence: Option<usize>,
    /// Record wall time per row (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every solver block of a config over its seeds.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the shipped zero-sum game study.
    #[command(name = "replicate-sec7")]
    Replicate {
        /// Number of seeds per solver block.
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite and print a TOML report.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render SVG plots from an aggregate CSV.
    Plot {
        aggregate: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn overrides(c: &Common) -> Overrides {
    Overrides {
        seed: c.seed,
        out: c.out.clone(),
        cadence: c.cadence,
        timing: c.timing,
    }
}

fn report(summary: &StudySummary) -> Result<()> {
    print!("{}", svi_harness::study::summary_table(&summary.blocks));
    for n in &summary.notes {
        eprintln!("note: {n}");
    }
    eprintln!("summary written to {}", summary.summary_path.display());
    if let Some(f) = &summary.files.failures {
        return Err(HarnessError::Run(format!(
            "some runs failed, see {}",
            f.display()
        )));
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, common } => {
            let cfg = parse_config(&config)?.with_overrides(&overrides(&common))?;
            report(&run_study(&cfg)?)
        }
        Command::Replicate { seeds, common } => {
            if seeds == 0 {
                return Err(HarnessError::Config("--seeds must be >= 1".into()));
            }
            let mut cfg = sec7_config();
            let first = common.seed.unwrap_or(1);
            let o = Overrides {
                seed: None,
                ..overrides(&common)
            };
            cfg.seeds = (first..first + seeds as u64).collect();
            let cfg = cfg.with_overrides(&o)?;
            report(&run_study(&cfg)?)
        }
        Command::Verify { seed } => {
            let mut opts = SuiteOptions::default();
            if let Some(s) = seed {
                opts.master_seed = s;
            }
            let reports = run_verify_suite(&opts);
            for r in &reports {
                println!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            if failed > 0 {
                return Err(HarnessError::Run(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
        Command::Plot { aggregate, out } => {
            let rows = read_aggregate_csv(&aggregate)?;
            let dir = out.unwrap_or_else(|| {
                aggregate
                    .parent()
                    .map(Path::to_path_buf)
                    .unwrap_or_default()
            });
            std::fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
            for p in emit_default_plots(&rows, &dir)? {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
