//! CSV output: one file per run, an aggregate across seeds, a manifest.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{Row, RunRecord};

pub const CSV_HEADER: [&str; 8] = [
    "iter",
    "gap_alpha",
    "gap_invalpha",
    "gap_uniform",
    "infeas_p1",
    "infeas_p2",
    "fresh_evals",
    "wall_ns",
];

/// Per-row metrics, in CSV order after `iter`.
pub const METRICS: [&str; 7] = [
    "gap_alpha",
    "gap_invalpha",
    "gap_uniform",
    "infeas_p1",
    "infeas_p2",
    "fresh_evals",
    "wall_ns",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Row {
    pub fn metrics(&self) -> [f64; 7] {
        [
            self.gap_alpha,
            self.gap_invalpha,
            self.gap_uniform,
            self.infeas_p1,
            self.infeas_p2,
            self.fresh_evals as f64,
            self.wall_ns as f64,
        ]
    }
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn run_file_name(block: &str, seed: u64) -> String {
    format!("{block}_seed{seed}.csv")
}

pub fn write_run_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.iter.to_string(),
            format_float(r.gap_alpha),
            format_float(r.gap_invalpha),
            format_float(r.gap_uniform),
            format_float(r.infeas_p1),
            format_float(r.infeas_p2),
            r.fresh_evals.to_string(),
            r.wall_ns.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::Reader::from_reader(file))
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec
        .get(i)
        .ok_or_else(|| csv_err(path, format!("missing column {i}")))?;
    raw.parse()
        .map_err(|e| csv_err(path, format!("column {i} `{raw}`: {e}")))
}

pub fn read_run_csv(path: &Path) -> Result<Vec<Row>> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(csv_err(path, "unexpected header"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        rows.push(Row {
            iter: field(path, &rec, 0)?,
            gap_alpha: field(path, &rec, 1)?,
            gap_invalpha: field(path, &rec, 2)?,
            gap_uniform: field(path, &rec, 3)?,
            infeas_p1: field(path, &rec, 4)?,
            infeas_p2: field(path, &rec, 5)?,
            fresh_evals: field(path, &rec, 6)?,
            wall_ns: field(path, &rec, 7)?,
        });
    }
    Ok(rows)
}

/// Seed mean and population standard deviation of every metric at one
/// iteration of one solver block.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub block: String,
    pub iter: usize,
    pub runs: usize,
    pub mean: [f64; 7],
    pub std: [f64; 7],
}

impl AggregateRow {
    pub fn mean_of(&self, metric: &str) -> Option<f64> {
        METRICS
            .iter()
            .position(|m| *m == metric)
            .map(|i| self.mean[i])
    }
}

/// Averages successful runs of each block, blocks in first-seen order.
/// Runs of one block must share their checkpoints.
pub fn aggregate(records: &[RunRecord]) -> Result<Vec<AggregateRow>> {
    let mut blocks: Vec<&str> = Vec::new();
    for r in records {
        if !blocks.contains(&r.block.as_str()) {
            blocks.push(&r.block);
        }
    }
    let mut out = Vec::new();
    for block in blocks {
        let runs: Vec<&[Row]> = records
            .iter()
            .filter(|r| r.block == block)
            .filter_map(RunRecord::rows)
            .collect();
        let Some(first) = runs.first() else { continue };
        for other in &runs[1..] {
            if other.len() != first.len() || other.iter().zip(*first).any(|(a, b)| a.iter != b.iter)
            {
                return Err(HarnessError::Run(format!(
                    "runs of `{block}` have different checkpoints"
                )));
            }
        }
        let n = runs.len() as f64;
        for (i, row) in first.iter().enumerate() {
            let mut mean = [0.0; 7];
            for run in &runs {
                for (m, v) in mean.iter_mut().zip(run[i].metrics()) {
                    *m += v;
                }
            }
            mean.iter_mut().for_each(|m| *m /= n);
            let mut std = [0.0; 7];
            for run in &runs {
                for ((s, v), m) in std.iter_mut().zip(run[i].metrics()).zip(mean) {
                    *s += (v - m) * (v - m);
                }
            }
            std.iter_mut().for_each(|s| *s = (*s / n).sqrt());
            out.push(AggregateRow {
                block: block.to_string(),
                iter: row.iter,
                runs: runs.len(),
                mean,
                std,
            });
        }
    }
    Ok(out)
}

fn aggregate_header() -> Vec<String> {
    let mut h = vec!["block".to_string(), "iter".into(), "runs".into()];
    for m in METRICS {
        h.push(format!("mean_{m}"));
        h.push(format!("std_{m}"));
    }
    h
}

pub fn write_aggregate_csv(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(aggregate_header())
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        let mut rec = vec![r.block.clone(), r.iter.to_string(), r.runs.to_string()];
        for (m, s) in r.mean.iter().zip(&r.std) {
            rec.push(format_float(*m));
            rec.push(format_float(*s));
        }
        w.write_record(rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header
        .iter()
        .ne(aggregate_header().iter().map(String::as_str))
    {
        return Err(csv_err(path, "not an aggregate file: unexpected header"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let mut mean = [0.0; 7];
        let mut std = [0.0; 7];
        for i in 0..7 {
            mean[i] = field(path, &rec, 3 + 2 * i)?;
            std[i] = field(path, &rec, 4 + 2 * i)?;
        }
        rows.push(AggregateRow {
            block: field(path, &rec, 0)?,
            iter: field(path, &rec, 1)?,
            runs: field(path, &rec, 2)?,
            mean,
            std,
        });
    }
    if rows.is_empty() {
        return Err(csv_err(path, "aggregate has no rows"));
    }
    Ok(rows)
}

/// Files written for one experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputFiles {
    pub runs: Vec<PathBuf>,
    pub aggregate: Option<PathBuf>,
    pub failures: Option<PathBuf>,
    pub manifest: PathBuf,
}

/// Writes per-run CSVs, `aggregate.csv`, `failures.txt` when any run failed,
/// and `manifest.toml` with the resolved config and its fingerprint.
pub fn write_records(
    cfg: &ExperimentConfig,
    records: &[RunRecord],
    dir: &Path,
) -> Result<OutputFiles> {
    if records.is_empty() {
        return Err(HarnessError::Run("no run records to write".into()));
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut files = OutputFiles::default();
    let mut failures = String::new();
    for r in records {
        match &r.outcome {
            Ok(rows) => {
                let path = dir.join(run_file_name(&r.block, r.seed));
                write_run_csv(&path, rows)?;
                files.runs.push(path);
            }
            Err(msg) => failures.push_str(&format!("{} seed {}: {msg}\n", r.block, r.seed)),
        }
    }
    let agg = aggregate(records)?;
    if !agg.is_empty() {
        let path = dir.join("aggregate.csv");
        write_aggregate_csv(&path, &agg)?;
        files.aggregate = Some(path);
    }
    if !failures.is_empty() {
        let path = dir.join("failures.txt");
        fs::write(&path, failures).map_err(|e| HarnessError::io(&path, e))?;
        files.failures = Some(path);
    }
    let path = dir.join("manifest.toml");
    let manifest = format!(
        "fingerprint = \"{}\"\nruns = {}\nfailed = {}\n\n[config]\n{}",
        cfg.fingerprint(),
        records.len(),
        records.iter().filter(|r| r.outcome.is_err()).count(),
        indent_config(&cfg.to_toml()),
    );
    fs::write(&path, manifest).map_err(|e| HarnessError::io(&path, e))?;
    files.manifest = path;
    Ok(files)
}

// nests the config's tables under [config]
fn indent_config(toml_text: &str) -> String {
    toml_text
        .lines()
        .map(|l| {
            if let Some(rest) = l.strip_prefix("[[") {
                format!("[[config.{rest}")
            } else if let Some(rest) = l.strip_prefix('[') {
                format!("[config.{rest}")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}
