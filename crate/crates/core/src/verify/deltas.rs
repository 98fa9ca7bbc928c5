//! Exactly computed parameter functions for small codes, for comparing the
//! lifetime bound with simulation.
//!
//! * `g4(η)`: the smallest `λ` with `eff(R) ∈ Λ_λ` for every flip distribution
//!   in `R_η`, obtained as `max_R (sup tail(R))^{1/|R|}` with one LP per qubit subset.
//! * `f3(τ)`: `sup fail` over X-type channels in `Λ_τ`, one LP.
//! * `f4 = 0`, since the `g4` inclusion is exact.

use std::sync::Arc;

use super::exact::OracleCode;
use crate::bounds::{wire_parameters, BoundsMode, FamilyConstants, ParameterFunctions, Wiring};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Sense};
use crate::pauli_algebra::{BitVec, PauliOp};

/// Qubits (for `f3`) and measurement outcomes (for `g4`) enumerated exhaustively.
pub const DELTAS_SPACE_CAP: usize = 8;

fn all_vectors(len: usize) -> Vec<BitVec> {
    (0..1u64 << len).map(|v| BitVec::from_u64(len, v)).collect()
}

fn subset_rows(vars: &[BitVec], len: usize, rate: f64) -> Vec<(Vec<f64>, Sense, f64)> {
    all_vectors(len)
        .into_iter()
        .filter(|r| !r.is_zero())
        .map(|r| {
            let row = vars.iter().map(|v| if r.is_subset_of(v) { 1.0 } else { 0.0 }).collect();
            (row, Sense::Le, rate.powi(r.count_ones() as i32))
        })
        .collect()
}

fn solve_max(objective: Vec<f64>, rows: Vec<(Vec<f64>, Sense, f64)>) -> Result<f64> {
    let k = objective.len();
    let mut lp = LinearProgram::new(objective);
    lp.add(vec![1.0; k], Sense::Eq, 1.0);
    for (r, s, b) in rows {
        lp.add(r, s, b);
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(value.clamp(0.0, 1.0)),
        other => Err(Error::Precondition(format!("parameter LP not optimal: {other:?}"))),
    }
}

fn check_space(what: &str, got: usize) -> Result<()> {
    if got > DELTAS_SPACE_CAP {
        return Err(Error::Capacity { what: what.into(), got, cap: DELTAS_SPACE_CAP });
    }
    Ok(())
}

/// `sup fail` over X-type channels in `Λ_τ`.
pub fn f3_x_sector(code: &StabilizerCode, tau: f64) -> Result<f64> {
    let n = code.n();
    check_space("qubits for the f3 program", n)?;
    let oc = OracleCode::new(code);
    let ops = all_vectors(n);
    let objective = ops
        .iter()
        .map(|s| Ok(if oc.fails(&PauliOp::x_on(n, s.iter_ones()))? { 1.0 } else { 0.0 }))
        .collect::<Result<Vec<f64>>>()?;
    if tau <= 0.0 {
        return Ok(0.0);
    }
    solve_max(objective, subset_rows(&ops, n, tau.min(1.0)))
}

/// Smallest `λ` with `eff(R_η) ⊆ Λ_λ`, syndromes repaired by the code.
pub fn g4_exact(code: &StabilizerCode, eta: f64) -> Result<f64> {
    let k = code.num_outcomes();
    check_space("measurement outcomes for the g4 program", k)?;
    if eta <= 0.0 {
        return Ok(0.0);
    }
    let oc = OracleCode::new(code);
    let flips = all_vectors(k);
    let supports =
        flips.iter().map(|y| Ok(oc.omega(&code.syndrome_repair(y)?)?.support())).collect::<Result<Vec<BitVec>>>()?;
    let rows = subset_rows(&flips, k, eta.min(1.0));
    let mut worst: f64 = 0.0;
    let subsets: std::collections::BTreeSet<BitVec> = supports
        .iter()
        .flat_map(|s| all_vectors(code.n()).into_iter().filter(move |r| !r.is_zero() && r.is_subset_of(s)))
        .collect();
    for r in subsets {
        let objective = supports.iter().map(|s| if r.is_subset_of(s) { 1.0 } else { 0.0 }).collect();
        let tail = solve_max(objective, rows.clone())?;
        worst = worst.max(tail.powf(1.0 / r.count_ones() as f64));
    }
    Ok(worst)
}

/// Local-noise parameter functions whose `g4` and `f3` are the exact values
/// for `code` and whose `f4` is zero.
pub fn exact_parameter_functions(code: &StabilizerCode) -> Result<ParameterFunctions> {
    // surface capacity errors now rather than inside the closures
    f3_x_sector(code, 0.5)?;
    g4_exact(code, 0.5)?;
    let c3 = Arc::new(code.clone());
    let c4 = Arc::clone(&c3);
    // fail ≤ 1 always, so 1 is a valid fallback for out-of-domain arguments
    Ok(ParameterFunctions::new(BoundsMode::LocalNoise, FamilyConstants::default())
        .with_f3(move |t, _| f3_x_sector(&c3, t).unwrap_or(1.0))
        .with_f4(|_, _| 0.0)
        .with_g4(move |e, _| g4_exact(&c4, e).unwrap_or(1.0)))
}

#[derive(Clone, Debug)]
pub struct ExactDeltas {
    pub lambda: f64,
    pub eta: f64,
    pub wiring: Wiring,
}

impl ExactDeltas {
    pub fn bound(&self, rounds: usize) -> f64 {
        crate::bounds::lifetime_bound(rounds, self.wiring.delta1, self.wiring.delta2, self.wiring.delta3)
    }
}

/// Exact δ's for the repetition code on three qubits under X noise.
pub fn exact_rep3_deltas(lambda: f64, eta: f64) -> Result<ExactDeltas> {
    let code = StabilizerCode::repetition(3)?;
    let pf = exact_parameter_functions(&code)?;
    let wiring = wire_parameters(&pf, lambda, eta, code.n())?;
    Ok(ExactDeltas { lambda, eta, wiring })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rep3_closed_forms() {
        let c = StabilizerCode::repetition(3).unwrap();
        for t in [0.01, 0.1, 0.3, 0.5] {
            assert!((f3_x_sector(&c, t).unwrap() - 3.0 * t * t).abs() < 1e-9, "f3({t})");
        }
        for e in [0.01, 0.1, 0.4] {
            assert!((g4_exact(&c, e).unwrap() - e).abs() < 1e-9, "g4({e})");
        }
        assert_eq!(f3_x_sector(&c, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rep3_wiring() {
        let d = exact_rep3_deltas(0.01, 0.01).unwrap();
        assert!((d.wiring.tau1 - 0.01).abs() < 1e-9);
        assert!((d.wiring.tau2 - 0.2).abs() < 1e-9);
        assert!((d.wiring.delta3 - 3e-4).abs() < 1e-9);
        assert_eq!(d.wiring.delta2, 0.0);
        assert!(d.bound(1) > 0.0 && d.bound(10) <= 1.0);
    }
}
