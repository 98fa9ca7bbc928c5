//! Syndrome repair commutes with errors: `r(x(E) + y) = σ(E) + r(y)`.

use rand::Rng;

use super::exact::OracleCode;
use super::instances::random_op;
use super::{OracleReport, Relation};
use crate::code::{for_each_combination, StabilizerCode};
use crate::error::Result;
use crate::pauli_algebra::{BitVec, PauliOp};

fn outcome(code: &StabilizerCode, e: &PauliOp) -> BitVec {
    let mut x = BitVec::zeros(code.num_outcomes());
    for (i, m) in code.measured_ops().iter().enumerate() {
        if m.anticommutes(e) {
            x.set(i, true);
        }
    }
    x
}

/// Every flip pattern of weight at most two, each paired with the identity and
/// with one of `errors` random Paulis; then each random Pauli with no flips.
pub fn check_repair_linearity<R: Rng + ?Sized>(
    code: &StabilizerCode,
    rng: &mut R,
    errors: usize,
) -> Result<OracleReport> {
    let oc = OracleCode::new(code);
    let n = code.n();
    let k = code.num_outcomes();
    let pool: Vec<PauliOp> = (0..errors.max(1)).map(|_| random_op(rng, n, n, false)).collect();
    let mut flips = vec![BitVec::zeros(k)];
    for w in 1..=2.min(k) {
        for_each_combination(k, w, |idx| {
            let mut y = BitVec::zeros(k);
            for &i in idx {
                y.set(i, true);
            }
            flips.push(y);
        });
    }
    let mut count = 0;
    let mut violations = 0;
    let mut witness = None;
    let mut check = |e: &PauliOp, y: &BitVec| -> Result<()> {
        count += 1;
        let lhs = code.syndrome_repair(&outcome(code, e).xor(y))?;
        let ry = code.syndrome_repair(y)?;
        let rhs = oc.syndrome(e).xor(&ry);
        // a repaired vector is always a reachable syndrome
        if lhs != rhs || !oc.syndrome_space_contains(&ry) {
            violations += 1;
            witness.get_or_insert_with(|| format!("E = {e}, y = {y}"));
        }
        Ok(())
    };
    for (i, y) in flips.iter().enumerate() {
        check(&PauliOp::identity(n), y)?;
        check(&pool[i % pool.len()], y)?;
    }
    for e in &pool {
        check(e, &BitVec::zeros(k))?;
    }
    Ok(OracleReport {
        proposition: "repair_linearity".into(),
        instance: format!(
            "{}: {} flip patterns of weight ≤ 2, {} random errors",
            describe(code),
            flips.len(),
            pool.len()
        ),
        relation: Relation::Eq,
        lhs: violations as f64,
        rhs: 0.0,
        pass: violations == 0,
        instances: count,
        violations,
        worst_ratio: None,
        witness,
        notes: Vec::new(),
    })
}

pub(crate) fn describe(code: &StabilizerCode) -> String {
    code.id().map_or_else(|| format!("custom code on {} qubits", code.n()), |id| id.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn holds_on_small_families() {
        let mut rng = substream(51, &[]);
        for code in [StabilizerCode::repetition(4).unwrap(), StabilizerCode::toric2d(2).unwrap()] {
            let r = check_repair_linearity(&code, &mut rng, 50).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
