//! The zero-sum replication study: every shipped solver block over a number
//! of seeds, with CSVs, plots and a summary table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use svi_core::metrics::fit_loglog_rate;

use crate::config::{sec7_config, ExperimentConfig, MethodName, StepName};
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment_matrix, RunRecord};
use crate::output::{aggregate, format_float, write_records, AggregateRow, OutputFiles};
use crate::plot::emit_default_plots;

/// Early checkpoint the final gap is compared against.
pub const EARLY_ITER: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct BlockSummary {
    pub block: String,
    pub runs: usize,
    pub failed: usize,
    pub final_iter: usize,
    /// Seed means of `gap_invalpha`.
    pub gap_early: Option<f64>,
    pub gap_final: f64,
    /// Log-log slope of the mean `gap_invalpha` over every checkpoint.
    pub slope: Option<f64>,
    pub infeas_early: Option<[f64; 2]>,
    pub infeas_final: [f64; 2],
}

impl BlockSummary {
    pub fn gap_ratio(&self) -> Option<f64> {
        self.gap_early.map(|g| self.gap_final / g)
    }
}

#[derive(Clone, Debug)]
pub struct StudySummary {
    pub blocks: Vec<BlockSummary>,
    /// Outcomes of comparisons the study expects to hold but does not enforce.
    pub notes: Vec<String>,
    pub files: OutputFiles,
    pub plots: Vec<PathBuf>,
    pub summary_path: PathBuf,
}

pub fn summarize(records: &[RunRecord], agg: &[AggregateRow]) -> Vec<BlockSummary> {
    let mut out: Vec<BlockSummary> = Vec::new();
    for r in records {
        if out.iter().any(|b| b.block == r.block) {
            continue;
        }
        let rows: Vec<&AggregateRow> = agg.iter().filter(|a| a.block == r.block).collect();
        let total = records.iter().filter(|x| x.block == r.block).count();
        let runs = rows.first().map_or(0, |a| a.runs);
        let Some(last) = rows.last() else {
            out.push(BlockSummary {
                block: r.block.clone(),
                runs,
                failed: total,
                final_iter: 0,
                gap_early: None,
                gap_final: f64::NAN,
                slope: None,
                infeas_early: None,
                infeas_final: [f64::NAN; 2],
            });
            continue;
        };
        let early = rows.iter().find(|a| a.iter == EARLY_ITER);
        let gap = |a: &AggregateRow| a.mean_of("gap_invalpha").unwrap_or(f64::NAN);
        let infeas = |a: &AggregateRow| {
            [
                a.mean_of("infeas_p1").unwrap_or(f64::NAN),
                a.mean_of("infeas_p2").unwrap_or(f64::NAN),
            ]
        };
        let ks: Vec<usize> = rows.iter().map(|a| a.iter).collect();
        let vals: Vec<f64> = rows.iter().map(|a| gap(a)).collect();
        out.push(BlockSummary {
            block: r.block.clone(),
            runs,
            failed: total - runs,
            final_iter: last.iter,
            gap_early: early.map(|a| gap(a)),
            gap_final: gap(last),
            slope: fit_loglog_rate(&ks, &vals).ok(),
            infeas_early: early.map(|a| infeas(a)),
            infeas_final: infeas(last),
        });
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), format_float)
}

pub fn summary_table(blocks: &[BlockSummary]) -> String {
    let mut s = String::from(
        "block,runs,failed,final_iter,gap_early,gap_final,gap_ratio,gap_slope,infeas_p1_early,infeas_p1_final,infeas_p2_early,infeas_p2_final\n",
    );
    for b in blocks {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            b.block,
            b.runs,
            b.failed,
            b.final_iter,
            opt(b.gap_early),
            format_float(b.gap_final),
            opt(b.gap_ratio()),
            opt(b.slope),
            opt(b.infeas_early.map(|v| v[0])),
            format_float(b.infeas_final[0]),
            opt(b.infeas_early.map(|v| v[1])),
            format_float(b.infeas_final[1]),
        );
    }
    s
}

/// Compares the square-root and cube-root sample rules for every
/// α⁻¹-averaged Korpelevich pair that differs only in its rule.
fn rule_comparisons(cfg: &ExperimentConfig, blocks: &[BlockSummary]) -> Vec<String> {
    let mut notes = Vec::new();
    let root = |s: &crate::config::SolverBlock| match s.rule_or(cfg.feasibility.rule) {
        crate::config::RuleBlock::Root { r } => Some(r),
        _ => None,
    };
    for a in &cfg.solvers {
        if a.method != MethodName::Korpelevich || root(a) != Some(2.0) {
            continue;
        }
        for b in &cfg.solvers {
            let same = b.method == a.method
                && b.step == a.step
                && b.alpha_bar == a.alpha_bar
                && b.horizon == a.horizon;
            if !same || root(b) != Some(3.0) {
                continue;
            }
            let find = |n: &str| blocks.iter().find(|x| x.block == n);
            if let (Some(x), Some(y)) = (find(&a.name), find(&b.name)) {
                let holds = x.gap_final <= y.gap_final;
                notes.push(format!(
                    "{}: final gap with ceil(k^(1/2)) {} ceil(k^(1/3)) ({} vs {}){}",
                    step_label(a.step),
                    if holds { "<=" } else { ">" },
                    format_float(x.gap_final),
                    format_float(y.gap_final),
                    if holds { "" } else { " [expected <=]" },
                ));
            }
        }
    }
    notes
}

fn step_label(s: StepName) -> &'static str {
    match s {
        StepName::ConstantHorizon => "korpelevich constant-horizon",
        StepName::Diminishing => "korpelevich diminishing",
        StepName::ParameterFree => "korpelevich parameter-free",
    }
}

/// Runs `cfg`, writes every output into its `output_dir` and summarizes.
pub fn run_study(cfg: &ExperimentConfig) -> Result<StudySummary> {
    let records = run_experiment_matrix(cfg)?;
    let dir = cfg.output_dir.clone();
    let files = write_records(cfg, &records, &dir)?;
    let agg = aggregate(&records)?;
    let plots = if agg.is_empty() {
        Vec::new()
    } else {
        emit_default_plots(&agg, &dir)?
    };
    let blocks = summarize(&records, &agg);
    let notes = rule_comparisons(cfg, &blocks);
    let summary_path = dir.join("summary.csv");
    std::fs::write(&summary_path, summary_table(&blocks))
        .map_err(|e| HarnessError::io(&summary_path, e))?;
    Ok(StudySummary {
        blocks,
        notes,
        files,
        plots,
        summary_path,
    })
}

/// The shipped study with seeds `1..=seed_count`, written to `out_dir`.
pub fn replicate_zero_sum_study(seed_count: usize, out_dir: &Path) -> Result<StudySummary> {
    if seed_count == 0 {
        return Err(HarnessError::Config("seed count must be >= 1".into()));
    }
    let mut cfg = sec7_config();
    cfg.seeds = (1..=seed_count as u64).collect();
    cfg.output_dir = out_dir.to_path_buf();
    cfg.validate()?;
    run_study(&cfg)
}
