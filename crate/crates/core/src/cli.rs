//! Command-line entry points. Experiments live in config files; flags cover
//! only paths, seeds and parallelism.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::code::{CodeFamily, CodeId, StabilizerCode};
use crate::config::{ExperimentConfig, Task};
use crate::error::{Error, Result};
use crate::io::{indexed_path, replay, write_dump_file, CsvSink};
use crate::memory::{sweep, worker_pool, SweepRow};
use crate::verify::{run_all, OracleReport};

#[derive(Debug, Parser)]
#[command(name = "singleshot", version, about = "Single-shot quantum memory simulation and oracle checks")]
pub struct Cli {
    /// Worker threads (default: SINGLESHOT_WORKERS, else all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Code construction.
    Code {
        #[command(subcommand)]
        command: CodeCommand,
    },
    /// Oracle suites.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Monte Carlo memory experiments.
    Memory {
        #[command(subcommand)]
        command: MemoryCommand,
    },
    /// Recompute a trajectory dump and compare byte for byte.
    Replay {
        dump: PathBuf,
        /// Replay under a different seed (expect mismatches).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an experiment file.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory that relative output paths resolve against.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodeCommand {
    /// Print (or write) the JSON description of a code.
    Build {
        #[arg(long)]
        family: CodeFamily,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Run every oracle; exits 1 if any fails.
    All {
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum MemoryCommand {
    /// Run the sweep of an experiment file.
    Sweep {
        config: PathBuf,
        /// CSV output (overrides the file's output.csv; stdout when neither is set).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write per-grid-point trajectory dumps here.
        #[arg(long)]
        trajectories: Option<PathBuf>,
    },
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json_pretty<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Serde(e.to_string()))
}

fn resolve(out_dir: Option<&Path>, p: &Path) -> PathBuf {
    match out_dir {
        Some(d) if p.is_relative() => d.join(p),
        _ => p.to_path_buf(),
    }
}

fn code_json(codes: &[CodeId]) -> Result<String> {
    let descs = codes.iter().map(|c| Ok(StabilizerCode::build(*c)?.describe())).collect::<Result<Vec<_>>>()?;
    if descs.len() == 1 {
        json_pretty(&descs[0])
    } else {
        json_pretty(&descs)
    }
}

fn verify(seed: u64, report: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let reports = run_all(seed)?;
    for r in &reports {
        writeln!(out, "{}", summary_line(r))?;
    }
    if let Some(p) = report {
        write_file(p, &json_pretty(&reports)?)?;
    }
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

pub fn summary_line(r: &OracleReport) -> String {
    format!(
        "{} {}: {} ({} instances, {} violations)",
        if r.pass { "PASS" } else { "FAIL" },
        r.proposition,
        r.instance,
        r.instances,
        r.violations
    )
}

struct SweepPaths {
    csv: Option<PathBuf>,
    trajectories: Option<PathBuf>,
}

fn run_sweep(
    cfg: &ExperimentConfig,
    paths: SweepPaths,
    workers: Option<usize>,
    out: &mut dyn Write,
) -> Result<Vec<SweepRow>> {
    let grid = cfg.grid()?;
    let pool = worker_pool(workers)?;
    let pf = cfg.bounds.as_ref().map(|b| b.functions()).transpose()?;
    let with_bounds = pf.is_some();
    if let Some(base) = &paths.trajectories {
        for (k, g) in grid.iter().enumerate() {
            let p = indexed_path(base, k, grid.len());
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            write_dump_file(g, &pool, &p)?;
        }
    }
    match &paths.csv {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut sink = CsvSink::create(p, with_bounds)?;
            sweep(&grid, &pool, pf.as_ref(), |row| sink.write(row))
        }
        None => {
            let mut sink = CsvSink::new(Vec::new(), with_bounds)?;
            let rows = sweep(&grid, &pool, pf.as_ref(), |row| sink.write(row))?;
            out.write_all(&sink.into_inner()?)?;
            Ok(rows)
        }
    }
}

fn run_config(
    path: &Path,
    seed: Option<u64>,
    out_dir: Option<&Path>,
    workers: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let o = cfg.output.clone();
    match cfg.task {
        Task::CodeBuild => {
            let text = code_json(&cfg.codes)?;
            match &o.code_json {
                Some(p) => write_file(&resolve(out_dir, p), &text)?,
                None => writeln!(out, "{text}")?,
            }
            Ok(0)
        }
        Task::Verify => verify(cfg.seed, o.report.as_deref().map(|p| resolve(out_dir, p)).as_deref(), out),
        Task::Sweep => {
            let paths = SweepPaths {
                csv: o.csv.as_deref().map(|p| resolve(out_dir, p)),
                trajectories: o.trajectories.as_deref().map(|p| resolve(out_dir, p)),
            };
            run_sweep(&cfg, paths, workers, out)?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// human-readable output to `out`. Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            write!(out, "{e}")?;
            return Ok(code);
        }
    };
    let workers = cli.workers;
    match cli.command {
        Command::Code { command: CodeCommand::Build { family, size, out: path } } => {
            let text = code_json(&[CodeId::new(family, size)])?;
            match path {
                Some(p) => write_file(&p, &text)?,
                None => writeln!(out, "{text}")?,
            }
            Ok(0)
        }
        Command::Verify { command: VerifyCommand::All { report, seed } } => verify(seed, report.as_deref(), out),
        Command::Memory { command: MemoryCommand::Sweep { config, out: csv, seed, trajectories } } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if cfg.task != Task::Sweep {
                return Err(Error::Config(format!("{}: task is not sweep", config.display())));
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let paths = SweepPaths {
                csv: csv.or(cfg.output.csv.clone()),
                trajectories: trajectories.or(cfg.output.trajectories.clone()),
            };
            run_sweep(&cfg, paths, workers, out)?;
            Ok(0)
        }
        Command::Replay { dump, seed } => {
            let r = replay(&dump, seed, &worker_pool(workers)?)?;
            if r.identical() {
                writeln!(out, "identical: {} trials", r.trials)?;
                Ok(0)
            } else {
                writeln!(
                    out,
                    "mismatch in {} of {} trials (first: trial {})",
                    r.mismatches.len(),
                    r.trials,
                    r.mismatches[0]
                )?;
                Ok(1)
            }
        }
        Command::Run { config, seed, out_dir } => run_config(&config, seed, out_dir.as_deref(), workers, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_build_prints_json() {
        let mut out = Vec::new();
        let code = run_cli(["singleshot", "code", "build", "--family", "repetition", "--size", "3"], &mut out).unwrap();
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["checks"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn bad_usage_exit_two() {
        let mut out = Vec::new();
        assert_eq!(run_cli(["singleshot", "frobnicate"], &mut out).unwrap(), 2);
    }
}
