//! Result tables, trajectory dumps and replay.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{run_trial, MemoryRunConfig, SweepRow, Trajectory};
use crate::VERSION;

pub const CSV_HEADER: [&str; 10] =
    ["family", "L", "lambda", "eta", "n", "trials", "fail_mean", "fail_lo", "fail_hi", "seed"];
pub const BOUND_COLUMNS: [&str; 6] = ["tau1", "tau2", "delta1", "delta2", "delta3", "bound"];
pub const DUMP_FORMAT: &str = "singleshot-trajectories";

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Streams sweep rows as CSV, flushing after every row.
pub struct CsvSink<W: Write> {
    w: csv::Writer<W>,
    with_bounds: bool,
}

impl CsvSink<File> {
    pub fn create(path: &Path, with_bounds: bool) -> Result<Self> {
        let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        CsvSink::new(f, with_bounds)
    }
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W, with_bounds: bool) -> Result<Self> {
        let mut w = csv::Writer::from_writer(inner);
        let mut header: Vec<&str> = CSV_HEADER.to_vec();
        if with_bounds {
            header.extend(BOUND_COLUMNS);
        }
        w.write_record(&header).map_err(csv_err)?;
        w.flush()?;
        Ok(CsvSink { w, with_bounds })
    }

    pub fn write(&mut self, row: &SweepRow) -> Result<()> {
        let mut rec = vec![
            row.family.clone(),
            row.l.to_string(),
            row.lambda.to_string(),
            row.eta.to_string(),
            row.n.to_string(),
            row.trials.to_string(),
            row.fail_mean.to_string(),
            row.fail_lo.to_string(),
            row.fail_hi.to_string(),
            row.seed.to_string(),
        ];
        if self.with_bounds {
            match &row.bound {
                Some((w, b)) => {
                    rec.extend([w.tau1, w.tau2, w.delta1, w.delta2, w.delta3, *b].iter().map(|v| v.to_string()))
                }
                None => rec.extend(std::iter::repeat_n(String::new(), BOUND_COLUMNS.len())),
            }
        }
        self.w.write_record(&rec).map_err(csv_err)?;
        self.w.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Rows rendered as one CSV document.
pub fn rows_to_csv(rows: &[SweepRow], with_bounds: bool) -> Result<String> {
    let mut sink = CsvSink::new(Vec::new(), with_bounds)?;
    for r in rows {
        sink.write(r)?;
    }
    String::from_utf8(sink.into_inner()?).map_err(|e| Error::Serde(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpHeader {
    pub format: String,
    pub version: String,
    pub config: MemoryRunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpLine {
    pub trial: u64,
    pub trajectory: Trajectory,
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Serde(e.to_string()))
}

/// Runs every trial of `cfg` with full round detail and writes the dump.
pub fn write_dump<W: Write>(cfg: &MemoryRunConfig, pool: &rayon::ThreadPool, out: W) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    let code = cfg.code.build()?;
    let trajs: Vec<Trajectory> = pool.install(|| {
        (0..cfg.trials as u64).into_par_iter().map(|t| run_trial(cfg, &code, t, true)).collect::<Result<_>>()
    })?;
    let mut w = BufWriter::new(out);
    let header = DumpHeader { format: DUMP_FORMAT.into(), version: VERSION.into(), config: cfg.clone() };
    writeln!(w, "{}", json(&header)?)?;
    for (t, tr) in trajs.iter().enumerate() {
        writeln!(w, "{}", json(&DumpLine { trial: t as u64, trajectory: tr.clone() })?)?;
    }
    w.flush()?;
    Ok(trajs)
}

pub fn write_dump_file(cfg: &MemoryRunConfig, pool: &rayon::ThreadPool, path: &Path) -> Result<Vec<Trajectory>> {
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_dump(cfg, pool, f)
}

pub fn read_dump(path: &Path) -> Result<(DumpHeader, Vec<DumpLine>)> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut lines = BufReader::new(f).lines();
    let first = lines.next().ok_or_else(|| Error::Serde("empty trajectory dump".into()))??;
    let header: DumpHeader = serde_json::from_str(&first).map_err(|e| Error::Serde(format!("dump header: {e}")))?;
    if header.format != DUMP_FORMAT {
        return Err(Error::Serde(format!("not a trajectory dump (format {:?})", header.format)));
    }
    if header.version != VERSION {
        return Err(Error::Version { expected: VERSION.into(), found: header.version });
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Serde(format!("dump line {}: {e}", k + 2)))?);
    }
    Ok((header, out))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayOutcome {
    pub trials: usize,
    /// Trials whose recomputed trajectory serializes differently.
    pub mismatches: Vec<u64>,
}

impl ReplayOutcome {
    pub fn identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recomputes every dumped trial, optionally under a different seed, and
/// compares the serialized trajectories byte for byte.
pub fn replay(path: &Path, seed_override: Option<u64>, pool: &rayon::ThreadPool) -> Result<ReplayOutcome> {
    let (header, lines) = read_dump(path)?;
    let mut cfg = header.config;
    if let Some(s) = seed_override {
        cfg.seed = s;
    }
    let code = cfg.code.build()?;
    let mismatches: Vec<u64> = pool
        .install(|| {
            lines
                .par_iter()
                .map(|l| {
                    let fresh = run_trial(&cfg, &code, l.trial, true)?;
                    Ok((json(&fresh)? != json(&l.trajectory)?).then_some(l.trial))
                })
                .collect::<Result<Vec<Option<u64>>>>()
        })?
        .into_iter()
        .flatten()
        .collect();
    Ok(ReplayOutcome { trials: lines.len(), mismatches })
}

/// `stem.ext` for a single grid point, `stem.k.ext` otherwise.
pub fn indexed_path(base: &Path, k: usize, total: usize) -> PathBuf {
    if total <= 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{k}"),
    };
    base.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{CodeFamily, CodeId};
    use crate::memory::worker_pool;
    use crate::noise::{FlipModelSpec, NoiseModelSpec, PauliSector};

    fn cfg() -> MemoryRunConfig {
        MemoryRunConfig {
            code: CodeId::new(CodeFamily::Toric2d, 3),
            noise: NoiseModelSpec::IidLocal { lambda: 0.05, pauli: PauliSector::X },
            flips: FlipModelSpec::Iid { eta: 0.05 },
            rounds: 4,
            trials: 6,
            seed: 5,
            initial_error: None,
        }
    }

    #[test]
    fn header_and_bound_columns() {
        let row = SweepRow {
            family: "repetition".into(),
            l: 3,
            lambda: 0.5,
            eta: 0.0,
            n: 1,
            trials: 10,
            fail_mean: 0.5,
            fail_lo: 0.2,
            fail_hi: 0.8,
            seed: 1,
            bound: None,
        };
        let s = rows_to_csv(std::slice::from_ref(&row), false).unwrap();
        assert_eq!(
            s,
            "family,L,lambda,eta,n,trials,fail_mean,fail_lo,fail_hi,seed\nrepetition,3,0.5,0,1,10,0.5,0.2,0.8,1\n"
        );
        let s = rows_to_csv(&[row], true).unwrap();
        assert!(s.lines().next().unwrap().ends_with(",seed,tau1,tau2,delta1,delta2,delta3,bound"));
        assert!(s.lines().nth(1).unwrap().ends_with(",1,,,,,,"));
    }

    #[test]
    fn dump_replays_identically_and_detects_seed_change() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        write_dump_file(&cfg(), &worker_pool(Some(2)).unwrap(), &p).unwrap();
        assert!(replay(&p, None, &worker_pool(Some(1)).unwrap()).unwrap().identical());
        assert!(replay(&p, None, &worker_pool(Some(3)).unwrap()).unwrap().identical());
        let changed = replay(&p, Some(6), &worker_pool(Some(2)).unwrap()).unwrap();
        assert!(!changed.identical());
    }

    #[test]
    fn version_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        write_dump_file(&cfg(), &worker_pool(Some(1)).unwrap(), &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap().replacen(
            &format!("\"version\":\"{VERSION}\""),
            "\"version\":\"0.0.0-old\"",
            1,
        );
        std::fs::write(&p, text).unwrap();
        assert!(matches!(read_dump(&p), Err(Error::Version { .. })));
    }

    #[test]
    fn indexed_paths() {
        assert_eq!(indexed_path(Path::new("a/t.jsonl"), 2, 1), PathBuf::from("a/t.jsonl"));
        assert_eq!(indexed_path(Path::new("a/t.jsonl"), 2, 3), PathBuf::from("a/t.2.jsonl"));
    }
}
