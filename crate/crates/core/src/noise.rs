//! Fault-path samplers: iid local noise, fabrication faults, the string-walker
//! adversary on the 2D torus, and measurement-flip noise.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{CodeFamily, StabilizerCode, Torus2};
use crate::error::{Error, Result};
use crate::memory::wilson_interval;
use crate::pauli_algebra::{BitVec, PauliOp};

/// Which Pauli components iid noise applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliSector {
    #[default]
    X,
    /// X and Z each applied independently with the same rate.
    Xz,
}

/// Walker path orientation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathFamily {
    #[default]
    Horizontal,
    Vertical,
    /// Spawns alternate between horizontal and vertical paths.
    Alternating,
}

/// Per-use channel of a faulty qubit: X, Y, Z with the given probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerUse {
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModelSpec {
    #[default]
    None,
    IidLocal {
        lambda: f64,
        #[serde(default)]
        pauli: PauliSector,
    },
    Fabrication {
        q_fault: f64,
        per_use: PerUse,
    },
    MarkovWalker {
        rho_spawn: f64,
        #[serde(default)]
        path_family: PathFamily,
        #[serde(default)]
        max_active: Option<usize>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlipModelSpec {
    #[default]
    None,
    Iid {
        eta: f64,
    },
    /// Flip the outcomes that would reveal the active walkers, plus optional iid flips.
    HideWalkers {
        #[serde(default)]
        eta: f64,
    },
}

fn check_rate(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {p} is outside [0, 1]")))
    }
}

impl NoiseModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModelSpec::None => Ok(()),
            NoiseModelSpec::IidLocal { lambda, .. } => check_rate("lambda", *lambda),
            NoiseModelSpec::Fabrication { q_fault, per_use } => {
                check_rate("q_fault", *q_fault)?;
                check_rate("per_use.x", per_use.x)?;
                check_rate("per_use.y", per_use.y)?;
                check_rate("per_use.z", per_use.z)?;
                check_rate("per_use total", per_use.x + per_use.y + per_use.z)
            }
            NoiseModelSpec::MarkovWalker { rho_spawn, .. } => check_rate("rho_spawn", *rho_spawn),
        }
    }

    /// Nominal per-qubit rate, used as the `lambda` column of result tables.
    pub fn nominal_rate(&self) -> f64 {
        match self {
            NoiseModelSpec::None => 0.0,
            NoiseModelSpec::IidLocal { lambda, .. } => *lambda,
            NoiseModelSpec::Fabrication { q_fault, per_use } => q_fault * (per_use.x + per_use.y + per_use.z),
            NoiseModelSpec::MarkovWalker { rho_spawn, .. } => *rho_spawn,
        }
    }
}

impl FlipModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FlipModelSpec::None => Ok(()),
            FlipModelSpec::Iid { eta } | FlipModelSpec::HideWalkers { eta } => check_rate("eta", *eta),
        }
    }

    pub fn eta(&self) -> f64 {
        match self {
            FlipModelSpec::None => 0.0,
            FlipModelSpec::Iid { eta } | FlipModelSpec::HideWalkers { eta } => *eta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A walker on path `(orientation, row)`, having applied `pos` edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walker {
    pub orientation: Orientation,
    pub row: usize,
    pub pos: usize,
}

/// Everything the samplers remember between rounds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AdversaryState {
    pub walkers: Vec<Walker>,
    /// Orientation index of the next spawn in alternating mode.
    pub next_orientation: usize,
    /// Permanently faulty qubits (fabrication mode).
    pub faulty: Vec<usize>,
}

/// Edges of the shortest non-contractible path `(orientation, row)`, in walking order.
pub fn path_edges(torus: &Torus2, orientation: Orientation, row: usize) -> Vec<usize> {
    match orientation {
        Orientation::Horizontal => (0..torus.l).map(|x| torus.h(x, row)).collect(),
        Orientation::Vertical => (0..torus.l).map(|y| torus.v(row, y)).collect(),
    }
}

/// The X string a walker has laid down so far.
pub fn walker_string(torus: &Torus2, w: &Walker) -> PauliOp {
    PauliOp::x_on(torus.n_qubits(), path_edges(torus, w.orientation, w.row).into_iter().take(w.pos))
}

fn torus_of(code: &StabilizerCode) -> Result<Torus2> {
    match code.id() {
        Some(id) if id.family == CodeFamily::Toric2d => Ok(Torus2 { l: id.size }),
        other => Err(Error::Geometry(format!(
            "the walker model needs a toric2d code, got {}",
            other.map_or("a custom code".to_string(), |i| i.to_string())
        ))),
    }
}

impl AdversaryState {
    /// Initial state; draws the fabrication fault set from `setup` when needed.
    pub fn new<R: Rng + ?Sized>(spec: &NoiseModelSpec, code: &StabilizerCode, setup: &mut R) -> Result<Self> {
        spec.validate()?;
        let mut st = AdversaryState::default();
        match spec {
            NoiseModelSpec::Fabrication { q_fault, .. } => {
                st.faulty = (0..code.n()).filter(|_| setup.random_bool(*q_fault)).collect();
            }
            NoiseModelSpec::MarkovWalker { .. } => {
                torus_of(code)?;
            }
            _ => {}
        }
        Ok(st)
    }
}

/// One round of data noise. The state update reads only `state` and `rng`.
pub fn sample_data_noise<R: Rng + ?Sized>(
    spec: &NoiseModelSpec,
    code: &StabilizerCode,
    state: &mut AdversaryState,
    rng: &mut R,
) -> Result<PauliOp> {
    let n = code.n();
    match spec {
        NoiseModelSpec::None => Ok(PauliOp::identity(n)),
        NoiseModelSpec::IidLocal { lambda, pauli } => {
            let mut x = BitVec::zeros(n);
            let mut z = BitVec::zeros(n);
            for q in 0..n {
                if rng.random_bool(*lambda) {
                    x.set(q, true);
                }
                if *pauli == PauliSector::Xz && rng.random_bool(*lambda) {
                    z.set(q, true);
                }
            }
            PauliOp::from_masks(x, z)
        }
        NoiseModelSpec::Fabrication { per_use, .. } => {
            let mut x = BitVec::zeros(n);
            let mut z = BitVec::zeros(n);
            for &q in &state.faulty {
                let u: f64 = rng.random();
                if u < per_use.x {
                    x.set(q, true);
                } else if u < per_use.x + per_use.y {
                    x.set(q, true);
                    z.set(q, true);
                } else if u < per_use.x + per_use.y + per_use.z {
                    z.set(q, true);
                }
            }
            PauliOp::from_masks(x, z)
        }
        NoiseModelSpec::MarkovWalker { rho_spawn, path_family, max_active } => {
            let torus = torus_of(code)?;
            let l = torus.l;
            let mut hit = Vec::new();
            for w in state.walkers.iter_mut() {
                hit.push(path_edges(&torus, w.orientation, w.row)[w.pos]);
                w.pos += 1;
            }
            let room = max_active.is_none_or(|m| state.walkers.len() < m);
            if room && rng.random_bool(*rho_spawn) {
                let orientation = match path_family {
                    PathFamily::Horizontal => Orientation::Horizontal,
                    PathFamily::Vertical => Orientation::Vertical,
                    PathFamily::Alternating => {
                        [Orientation::Horizontal, Orientation::Vertical][state.next_orientation % 2]
                    }
                };
                let free: Vec<usize> = (0..l)
                    .filter(|r| !state.walkers.iter().any(|w| w.orientation == orientation && w.row == *r))
                    .collect();
                if !free.is_empty() {
                    let row = free[rng.random_range(0..free.len())];
                    hit.push(path_edges(&torus, orientation, row)[0]);
                    state.walkers.push(Walker { orientation, row, pos: 1 });
                    state.next_orientation += 1;
                }
            }
            state.walkers.retain(|w| w.pos < l);
            Ok(PauliOp::x_on(n, hit))
        }
    }
}

/// One round of measurement flips, of length `code.num_outcomes()`.
pub fn sample_measurement_flips<R: Rng + ?Sized>(
    spec: &FlipModelSpec,
    code: &StabilizerCode,
    state: &AdversaryState,
    rng: &mut R,
) -> Result<BitVec> {
    let len = code.num_outcomes();
    let mut y = BitVec::zeros(len);
    let eta = spec.eta();
    if eta > 0.0 {
        for j in 0..len {
            if rng.random_bool(eta) {
                y.set(j, true);
            }
        }
    }
    if let FlipModelSpec::HideWalkers { .. } = spec {
        if !state.walkers.is_empty() {
            let torus = torus_of(code)?;
            for w in &state.walkers {
                y.xor_assign(&code.valid_outcome(&walker_string(&torus, w))?);
            }
        }
    }
    Ok(y)
}

/// Monte Carlo estimate of the smallest `λ` with the per-round fault
/// distribution in `Λ_λ`, over subsets of size at most `max_subset`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaEstimate {
    pub lambda: f64,
    /// Same maximum taken over Wilson upper limits of the tail frequencies.
    pub lambda_upper: f64,
    /// Same maximum taken over Wilson lower limits.
    pub lambda_lower: f64,
    pub worst_subset: Vec<usize>,
    pub rounds: usize,
}

/// Runs one chain for `burn_in + rounds` rounds and measures subset tail
/// frequencies of the per-round fault supports.
pub fn estimate_lambda<R: Rng + ?Sized>(
    spec: &NoiseModelSpec,
    code: &StabilizerCode,
    rng: &mut R,
    burn_in: usize,
    rounds: usize,
    max_subset: usize,
) -> Result<LambdaEstimate> {
    let mut state = AdversaryState::new(spec, code, rng)?;
    for _ in 0..burn_in {
        sample_data_noise(spec, code, &mut state, rng)?;
    }
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for _ in 0..rounds {
        let e = sample_data_noise(spec, code, &mut state, rng)?;
        let supp: Vec<usize> = e.support().iter_ones().collect();
        for k in 1..=max_subset.min(supp.len()) {
            crate::code::for_each_combination(supp.len(), k, |idx| {
                *counts.entry(idx.iter().map(|&i| supp[i]).collect()).or_insert(0) += 1;
            });
        }
    }
    let mut est =
        LambdaEstimate { lambda: 0.0, lambda_upper: 0.0, lambda_lower: 0.0, worst_subset: Vec::new(), rounds };
    let mut keys: Vec<_> = counts.keys().cloned().collect();
    keys.sort();
    for r in keys {
        let c = counts[&r];
        let root = 1.0 / r.len() as f64;
        let (lo, hi) = wilson_interval(c, rounds as u64);
        let point = (c as f64 / rounds as f64).powf(root);
        if point > est.lambda {
            est.lambda = point;
            est.worst_subset = r.clone();
        }
        est.lambda_upper = est.lambda_upper.max(hi.powf(root));
        est.lambda_lower = est.lambda_lower.max(lo.powf(root));
    }
    Ok(est)
}
