//! Syndrome-correction identities for Pauli pairs, and `A ≈_{fail(A)} synd(A)`.

use std::collections::HashMap;

use num_rational::BigRational;
use rand::Rng;

use super::exact::{op_key, tally, tv, OracleCode};
use super::instances::{q, random_op, random_weights};
use super::repair::describe;
use super::{cross_check, OracleReport, Relation};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli_algebra::{BitVec, PauliOp};
use crate::prob::Probability;
use crate::stochastic::{appr_fail_witness, ApproxDecomposition, StochasticChannel};

/// Exhaustive enumeration covers all `4^n` Paulis for `n` up to this.
pub const EXHAUSTIVE_QUBIT_CAP: usize = 5;

struct Cached<'a> {
    oc: OracleCode<'a>,
    omega: HashMap<BitVec, PauliOp>,
}

impl Cached<'_> {
    fn omega(&mut self, s: &BitVec) -> Result<PauliOp> {
        if let Some(w) = self.omega.get(s) {
            return Ok(w.clone());
        }
        let w = self.oc.omega(s)?;
        self.omega.insert(s.clone(), w.clone());
        Ok(w)
    }

    fn synd(&mut self, e: &PauliOp) -> Result<PauliOp> {
        let s = self.oc.syndrome(e);
        self.omega(&s)
    }

    fn fails(&mut self, e: &PauliOp) -> Result<bool> {
        let c = self.synd(e)?;
        Ok(!self.oc.in_gauge(&(&c * e)))
    }

    /// Names of the identities violated by `(E, D)`.
    fn pair(&mut self, e: &PauliOp, d: &PauliOp) -> Result<Vec<&'static str>> {
        let mut bad = Vec::new();
        let (se, sd) = (self.synd(e)?, self.synd(d)?);
        let ed = e * d;
        let sed = self.synd(&ed)?;
        if self.synd(&(&se * &sd))? != sed {
            bad.push("synd(synd E synd D) = synd(ED)");
        }
        let union = self.oc.syndrome(&se).or(&self.oc.syndrome(&sd));
        if !self.oc.syndrome(&sed).is_subset_of(&union) {
            bad.push("σ(synd(ED)) ⊆ σ(synd E) ∪ σ(synd D)");
        }
        if self.fails(&(&sed * e))? != self.fails(&(&sd * e))? {
            bad.push("fail(synd(DE) E) = fail(synd(D) E)");
        }
        Ok(bad)
    }
}

/// All Pauli pairs when `random_pairs == 0` (needs `n ≤ 5`), else that many random pairs.
pub fn check_pauli_syndrome_props<R: Rng + ?Sized>(
    code: &StabilizerCode,
    rng: &mut R,
    random_pairs: usize,
) -> Result<OracleReport> {
    let n = code.n();
    let mut c = Cached { oc: OracleCode::new(code), omega: HashMap::new() };
    let mut count = 0;
    let mut violations = 0;
    let mut notes: Vec<String> = Vec::new();
    let mut record = |bad: Vec<&'static str>, e: &PauliOp, d: &PauliOp, notes: &mut Vec<String>| {
        count += 1;
        if !bad.is_empty() {
            violations += 1;
            if notes.len() < 10 {
                notes.push(format!("E = {e}, D = {d}: {}", bad.join("; ")));
            }
        }
    };
    let instance = if random_pairs == 0 {
        if n > EXHAUSTIVE_QUBIT_CAP {
            return Err(Error::Capacity {
                what: "qubits for exhaustive Pauli pairs".into(),
                got: n,
                cap: EXHAUSTIVE_QUBIT_CAP,
            });
        }
        let all: Vec<PauliOp> = (0..1u64 << (2 * n)).map(|i| PauliOp::from_index(n, i)).collect();
        for e in &all {
            for d in &all {
                let bad = c.pair(e, d)?;
                record(bad, e, d, &mut notes);
            }
        }
        let xs = all.iter().filter(|e| e.z_mask().is_zero()).count();
        format!(
            "{}: all {} Pauli pairs (including all {} X-type pairs)",
            describe(code),
            all.len() * all.len(),
            xs * xs
        )
    } else {
        for _ in 0..random_pairs {
            let e = random_op(rng, n, n, false);
            let d = random_op(rng, n, n, false);
            let bad = c.pair(&e, &d)?;
            record(bad, &e, &d, &mut notes);
        }
        format!("{}: {random_pairs} random Pauli pairs", describe(code))
    };
    Ok(OracleReport {
        proposition: "pauli_syndrome_identities".into(),
        instance,
        relation: Relation::Eq,
        lhs: violations as f64,
        rhs: 0.0,
        pass: violations == 0,
        instances: count,
        violations,
        worst_ratio: None,
        witness: notes.first().cloned(),
        notes,
    })
}

struct ApprEval {
    distance: BigRational,
    fail: BigRational,
    /// Every witness entry is gauge-equivalent to `synd` of its source entry.
    in_synd_class: bool,
    witness: Vec<(BigRational, PauliOp)>,
}

fn appr_eval(oc: &OracleCode, ch: &[(BigRational, PauliOp)]) -> Result<ApprEval> {
    let mut fail = q(0, 1);
    let mut witness = Vec::with_capacity(ch.len());
    let mut in_synd_class = true;
    for (p, e) in ch {
        let s = oc.synd(e)?;
        let w = if oc.fails(e)? {
            fail += p.clone();
            s.clone()
        } else {
            e.clone()
        };
        if oc.gauge_key(&w) != oc.gauge_key(&s) {
            in_synd_class = false;
        }
        witness.push((p.clone(), w));
    }
    let a = tally(ch.iter().map(|(p, e)| (p.clone(), op_key(e))));
    let b = tally(witness.iter().map(|(p, e)| (p.clone(), op_key(e))));
    Ok(ApprEval { distance: tv(&a, &b), fail, in_synd_class, witness })
}

fn nonzero_keys(items: &[(BigRational, PauliOp)]) -> Vec<((BitVec, BitVec), BigRational)> {
    tally(items.iter().map(|(p, e)| (p.clone(), op_key(e)))).into_iter().filter(|(_, p)| *p != q(0, 1)).collect()
}

/// The all-correctable and logical-only channels, then `random` random channels.
pub fn check_appr_fail<R: Rng + ?Sized>(code: &StabilizerCode, rng: &mut R, random: usize) -> Result<OracleReport> {
    let oc = OracleCode::new(code);
    let n = code.n();
    let mut channels: Vec<(String, Vec<(BigRational, PauliOp)>)> = Vec::new();
    channels.push(("identity".into(), vec![(q(1, 1), PauliOp::identity(n))]));
    channels.push(("single X".into(), vec![(q(1, 2), PauliOp::identity(n)), (q(1, 2), PauliOp::x_on(n, [0]))]));
    if let Some((lx, _)) = code.logical_reps().first() {
        channels.push((format!("{{0.9 I, 0.1 {lx}}}"), vec![(q(9, 10), PauliOp::identity(n)), (q(1, 10), lx.clone())]));
    }
    for k in 0..random {
        let m = rng.random_range(1..=6);
        let ch = random_weights(rng, m).into_iter().map(|p| (p, random_op(rng, n, n, k % 2 == 0))).collect();
        channels.push((format!("random #{k}"), ch));
    }
    let mut violations = 0;
    let mut notes = Vec::new();
    let mut worst: Option<(f64, f64, String)> = None;
    let mut tight = Vec::new();
    for (label, ch) in &channels {
        let ev = appr_eval(&oc, ch)?;
        let mut ok = ev.distance <= ev.fail && ev.in_synd_class;
        let lib_ch = StochasticChannel::new(n, ch.clone())?;
        let (lib_w, lib_fail) = appr_fail_witness(&lib_ch, code)?;
        if lib_fail != ev.fail || nonzero_keys(lib_w.entries()) != nonzero_keys(&ev.witness) {
            ok = false;
            notes.push(format!("{label}: library witness differs from the oracle's"));
        }
        let dec = ApproxDecomposition::from_appr_fail(&lib_ch, code)?;
        if nonzero_keys(dec.apply(&lib_ch).entries()) != nonzero_keys(&ev.witness) || dec.weight() != ev.fail {
            ok = false;
            notes.push(format!("{label}: library decomposition differs from the oracle's"));
        }
        let fch: Vec<(f64, PauliOp)> = ch.iter().map(|(p, e)| (p.to_f64(), e.clone())).collect();
        let fl = StochasticChannel::from_parts(n, fch);
        if !cross_check(&ev.fail, fl.fail_rate(code)?) {
            ok = false;
            notes.push(format!("{label}: float fail rate disagrees"));
        }
        if !ok {
            violations += 1;
        }
        if ev.distance == ev.fail && ev.fail != q(0, 1) {
            tight.push(label.clone());
        }
        // worst = largest distance/fail among channels that can fail
        let (d, f) = (ev.distance.to_f64(), ev.fail.to_f64());
        if f > 0.0 && worst.as_ref().is_none_or(|(wd, wf, _)| d / f > wd / wf) {
            worst = Some((d, f, label.clone()));
        }
    }
    if let Some(first) = tight.first() {
        notes.push(format!(
            "tight (distance = fail > 0) in {} of {} channels, first: {first}",
            tight.len(),
            channels.len()
        ));
    }
    let (lhs, rhs, w) = worst.unwrap_or_default();
    Ok(OracleReport {
        proposition: "appr_fail".into(),
        instance: format!("{}: {} channels", describe(code), channels.len()),
        relation: Relation::Le,
        lhs,
        rhs,
        pass: violations == 0,
        instances: channels.len(),
        violations,
        worst_ratio: (rhs > 0.0).then(|| lhs / rhs),
        witness: Some(w),
        notes,
    })
}

/// Distance and failure rate of the constructed witness for one channel.
pub fn appr_fail_distance(
    code: &StabilizerCode,
    ch: &StochasticChannel<BigRational>,
) -> Result<(BigRational, BigRational)> {
    let ev = appr_eval(&OracleCode::new(code), ch.entries())?;
    Ok((ev.distance, ev.fail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn rep3_exhaustive() {
        let c = StabilizerCode::repetition(3).unwrap();
        let r = check_pauli_syndrome_props(&c, &mut substream(61, &[]), 0).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.instances, 4096);
    }

    #[test]
    fn toric2d_random_pairs() {
        let c = StabilizerCode::toric2d(2).unwrap();
        let r = check_pauli_syndrome_props(&c, &mut substream(62, &[]), 500).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn rep3_tight_case() {
        let c = StabilizerCode::repetition(3).unwrap();
        let ch = StochasticChannel::new(3, vec![(q(9, 10), PauliOp::identity(3)), (q(1, 10), "XXX".parse().unwrap())])
            .unwrap();
        assert_eq!(appr_fail_distance(&c, &ch).unwrap(), (q(1, 10), q(1, 10)));
        let r = check_appr_fail(&c, &mut substream(63, &[]), 50).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.notes.iter().any(|s| s.starts_with("tight")));
    }

    #[test]
    fn all_correctable_distance_zero() {
        let c = StabilizerCode::repetition(5).unwrap();
        let ch = StochasticChannel::new(5, vec![(q(1, 2), PauliOp::identity(5)), (q(1, 2), PauliOp::x_on(5, [1, 2]))])
            .unwrap();
        assert_eq!(appr_fail_distance(&c, &ch).unwrap(), (q(0, 1), q(0, 1)));
    }
}
