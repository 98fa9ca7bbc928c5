//! Monte Carlo quantum-memory engine: alternate noise accumulation and
//! single-shot recovery on a Pauli frame, then decode ideally at the end.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{lifetime_bound, wire_parameters, ParameterFunctions, Wiring};
use crate::code::{CodeId, StabilizerCode};
use crate::error::{Error, Result};
use crate::noise::{sample_data_noise, sample_measurement_flips, AdversaryState, FlipModelSpec, NoiseModelSpec};
use crate::pauli_algebra::{BitVec, PauliOp};
use crate::rng::{setup_stream, trial_streams};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "SINGLESHOT_WORKERS";

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryRunConfig {
    pub code: CodeId,
    #[serde(default)]
    pub noise: NoiseModelSpec,
    #[serde(default)]
    pub flips: FlipModelSpec,
    pub rounds: usize,
    pub trials: usize,
    pub seed: u64,
    /// Frame at the start of every trial, as a Pauli string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_error: Option<String>,
}

impl MemoryRunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.noise.validate()?;
        self.flips.validate()
    }

    fn initial_frame(&self, code: &StabilizerCode) -> Result<PauliOp> {
        match &self.initial_error {
            None => Ok(PauliOp::identity(code.n())),
            Some(s) => {
                let e: PauliOp = s.parse()?;
                crate::error::check_dim(code.n(), e.n())?;
                Ok(e)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub residual_weight: usize,
    /// `|x|`, the raw observed outcome weight.
    pub observed_weight: usize,
    /// `|r(x)|`.
    pub repaired_weight: usize,
    /// Syndrome weight of the frame after correction.
    pub residual_syndrome_weight: usize,
}

/// Everything needed to re-derive one round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundDetail {
    pub t: usize,
    pub pauli: PauliOp,
    pub flips: BitVec,
    /// Stream positions (32-bit words) before the round's draws.
    pub noise_draw: u64,
    pub flip_draw: u64,
    #[serde(flatten)]
    pub record: RoundRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<RoundRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Vec<RoundDetail>>,
    pub failed: bool,
}

/// Runs trial `trial` of `cfg` on its own seed substreams.
pub fn run_trial(cfg: &MemoryRunConfig, code: &StabilizerCode, trial: u64, detailed: bool) -> Result<Trajectory> {
    let (mut noise_rng, mut flip_rng) = trial_streams(cfg.seed, trial);
    let mut setup = setup_stream(cfg.seed, trial);
    run_trial_with(cfg, code, &mut noise_rng, &mut flip_rng, &mut setup, detailed)
}

pub fn run_trial_with<R: Rng + ?Sized>(
    cfg: &MemoryRunConfig,
    code: &StabilizerCode,
    noise_rng: &mut ChaCha8Rng,
    flip_rng: &mut ChaCha8Rng,
    setup: &mut R,
    detailed: bool,
) -> Result<Trajectory> {
    let mut state = AdversaryState::new(&cfg.noise, code, setup)?;
    let mut e = cfg.initial_frame(code)?;
    let mut records = Vec::with_capacity(cfg.rounds);
    let mut details = detailed.then(|| Vec::with_capacity(cfg.rounds));
    for t in 1..=cfg.rounds {
        let noise_draw = noise_rng.get_word_pos() as u64;
        let flip_draw = flip_rng.get_word_pos() as u64;
        let data = sample_data_noise(&cfg.noise, code, &mut state, noise_rng)?;
        e = &data * &e;
        let y = sample_measurement_flips(&cfg.flips, code, &state, flip_rng)?;
        let x = code.valid_outcome(&e)?.xor(&y);
        let sigma = code.syndrome_repair(&x)?;
        e = &code.correction(&sigma)? * &e;
        let residual = code.syndrome(&e)?;
        debug_assert_eq!(residual, code.syndrome_repair(&y)?, "frame bookkeeping diverged at round {t}");
        let record = RoundRecord {
            residual_weight: e.weight(),
            observed_weight: x.count_ones(),
            repaired_weight: sigma.count_ones(),
            residual_syndrome_weight: residual.count_ones(),
        };
        records.push(record);
        if let Some(d) = details.as_mut() {
            d.push(RoundDetail { t, pauli: data, flips: y, noise_draw, flip_draw, record });
        }
    }
    let failed = !code.is_correctable(&e)?;
    Ok(Trajectory { records, details, failed })
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureEstimate {
    pub failures: u64,
    pub trials: u64,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl FailureEstimate {
    pub fn from_counts(failures: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(failures, trials);
        FailureEstimate { failures, trials, mean: failures as f64 / trials as f64, lo, hi }
    }

    /// Binomial standard error of the mean.
    pub fn std_err(&self) -> f64 {
        (self.mean * (1.0 - self.mean) / self.trials as f64).sqrt()
    }
}

/// Builds a pool with `workers` threads, else the count in [`WORKERS_ENV`], else the default.
pub fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let count = match workers {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.trim().parse::<usize>().map_err(|_| Error::Config(format!("{WORKERS_ENV}={v:?} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(c) = count {
        b = b.num_threads(c.max(1));
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

/// All trials of `cfg`, in trial order.
pub fn run_trials(cfg: &MemoryRunConfig, code: &StabilizerCode, pool: &rayon::ThreadPool) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    pool.install(|| (0..cfg.trials as u64).into_par_iter().map(|t| run_trial(cfg, code, t, false)).collect())
}

/// Monte Carlo failure rate with its Wilson interval.
pub fn estimate_failure(cfg: &MemoryRunConfig, pool: &rayon::ThreadPool) -> Result<FailureEstimate> {
    let code = cfg.code.build()?;
    estimate_failure_on(cfg, &code, pool)
}

pub fn estimate_failure_on(
    cfg: &MemoryRunConfig,
    code: &StabilizerCode,
    pool: &rayon::ThreadPool,
) -> Result<FailureEstimate> {
    cfg.validate()?;
    let failures = pool.install(|| {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(cfg, code, t, false).map(|tr| tr.failed as u64))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    Ok(FailureEstimate::from_counts(failures, cfg.trials as u64))
}

/// Residual syndrome density across trajectories of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    /// Mean residual syndrome weight per check, round by round.
    pub per_round: Vec<f64>,
    /// Mean over trials of each trial's time-averaged density.
    pub mean: f64,
    /// Normal-approximation 95% interval of `mean`.
    pub lo: f64,
    pub hi: f64,
}

pub fn residual_syndrome_density(trajectories: &[Trajectory], num_checks: usize) -> Result<DensityProfile> {
    let Some(first) = trajectories.first() else {
        return Err(Error::Precondition("no trajectories".into()));
    };
    let rounds = first.records.len();
    if rounds == 0 || trajectories.iter().any(|t| t.records.len() != rounds) {
        return Err(Error::Precondition("trajectories must share a nonzero round count".into()));
    }
    let checks = num_checks.max(1) as f64;
    let mut per_round = vec![0.0; rounds];
    let mut per_trial = Vec::with_capacity(trajectories.len());
    for tr in trajectories {
        let mut sum = 0.0;
        for (k, r) in tr.records.iter().enumerate() {
            let d = r.residual_syndrome_weight as f64 / checks;
            per_round[k] += d;
            sum += d;
        }
        per_trial.push(sum / rounds as f64);
    }
    let t = trajectories.len() as f64;
    per_round.iter_mut().for_each(|v| *v /= t);
    let mean = per_trial.iter().sum::<f64>() / t;
    let var =
        if per_trial.len() > 1 { per_trial.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0) } else { 0.0 };
    let half = Z95 * (var / t).sqrt();
    Ok(DensityProfile { per_round, mean, lo: mean - half, hi: mean + half })
}

/// One results-table row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub lambda: f64,
    pub eta: f64,
    pub n: usize,
    pub trials: usize,
    pub fail_mean: f64,
    pub fail_lo: f64,
    pub fail_hi: f64,
    pub seed: u64,
    #[serde(skip)]
    pub bound: Option<(Wiring, f64)>,
}

/// Runs every grid point in order, handing each finished row to `sink`.
pub fn sweep(
    grid: &[MemoryRunConfig],
    pool: &rayon::ThreadPool,
    bounds: Option<&ParameterFunctions>,
    mut sink: impl FnMut(&SweepRow) -> Result<()>,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for cfg in grid {
        let code = cfg.code.build()?;
        let est = estimate_failure_on(cfg, &code, pool)?;
        let (lambda, eta) = (cfg.noise.nominal_rate(), cfg.flips.eta());
        let bound = match bounds {
            Some(pf) => {
                let w = wire_parameters(pf, lambda, eta, code.n())?;
                let b = lifetime_bound(cfg.rounds, w.delta1, w.delta2, w.delta3);
                Some((w, b))
            }
            None => None,
        };
        let row = SweepRow {
            family: cfg.code.family.to_string(),
            l: cfg.code.size,
            lambda,
            eta,
            n: cfg.rounds,
            trials: cfg.trials,
            fail_mean: est.mean,
            fail_lo: est.lo,
            fail_hi: est.hi,
            seed: cfg.seed,
            bound,
        };
        sink(&row)?;
        rows.push(row);
    }
    Ok(rows)
}
