//! Associativity of correlated composition on three-round joints.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::Rng;

use super::exact::{op_key, tally};
use super::instances::{q, random_op, random_weights};
use super::{OracleReport, Relation};
use crate::error::{Error, Result};
use crate::pauli_algebra::{BitVec, PauliOp};
use crate::stochastic::{JointFaultDistribution, StochasticChannel};

/// Largest joint support: four atoms per round over three rounds.
pub const ASSOC_SUPPORT_CAP: usize = 64;
const QUBITS: usize = 3;

type Key = (BitVec, BitVec);
type Atom = (BigRational, [PauliOp; 3]);

fn prod(ops: &[PauliOp]) -> PauliOp {
    let mut e = PauliOp::identity(ops[0].n());
    for o in ops {
        e.mul_assign(o);
    }
    e
}

fn chan_tally(ch: &StochasticChannel<BigRational>) -> BTreeMap<Key, BigRational> {
    nonzero(tally(ch.entries().iter().map(|(p, e)| (p.clone(), op_key(e)))))
}

fn nonzero(m: BTreeMap<Key, BigRational>) -> BTreeMap<Key, BigRational> {
    m.into_iter().filter(|(_, p)| *p != q(0, 1)).collect()
}

fn oracle_tally(atoms: &[Atom], f: impl Fn(&[PauliOp; 3]) -> PauliOp) -> BTreeMap<Key, BigRational> {
    nonzero(tally(atoms.iter().map(|(p, ops)| (p.clone(), op_key(&f(ops))))))
}

/// Compares both bracketings and the direct three-way form with the oracle's
/// composed channel and marginals. Returns the list of mismatches.
fn check_one(atoms: &[Atom]) -> Result<Vec<&'static str>> {
    if atoms.len() > ASSOC_SUPPORT_CAP {
        return Err(Error::Capacity {
            what: "three-round joint support".into(),
            got: atoms.len(),
            cap: ASSOC_SUPPORT_CAP,
        });
    }
    let j =
        JointFaultDistribution::from_paulis(QUBITS, atoms.iter().map(|(p, ops)| (p.clone(), ops.to_vec())).collect())?;
    let direct = oracle_tally(atoms, |o| prod(o));
    let left = j.merge_rounds(0, 2)?;
    let right = j.merge_rounds(1, 3)?;
    let mut bad = Vec::new();
    if chan_tally(&j.composed()) != direct {
        bad.push("direct composition");
    }
    if chan_tally(&left.composed()) != direct {
        bad.push("(12)3 composition");
    }
    if chan_tally(&right.composed()) != direct {
        bad.push("1(23) composition");
    }
    // the merged round is the composition of the inner two-round joint
    if chan_tally(&left.marginal(0)?) != oracle_tally(atoms, |o| prod(&o[..2])) {
        bad.push("(12) inner marginal");
    }
    if chan_tally(&right.marginal(1)?) != oracle_tally(atoms, |o| prod(&o[1..])) {
        bad.push("(23) inner marginal");
    }
    if chan_tally(&left.marginal(1)?) != oracle_tally(atoms, |o| o[2].clone())
        || chan_tally(&right.marginal(0)?) != oracle_tally(atoms, |o| o[0].clone())
    {
        bad.push("outer marginal");
    }
    for t in 0..3 {
        if chan_tally(&j.marginal(t)?) != oracle_tally(atoms, |o| o[t].clone()) {
            bad.push("round marginal");
        }
    }
    Ok(bad)
}

fn round_ops<R: Rng + ?Sized>(rng: &mut R) -> [Vec<PauliOp>; 3] {
    std::array::from_fn(|_| (0..4).map(|_| random_op(rng, QUBITS, QUBITS, false)).collect())
}

/// Point masses on every cell of a random 4×4×4 grid, a product joint, the
/// perfectly correlated joint, and `random` joints with full-grid support.
pub fn check_associativity<R: Rng + ?Sized>(rng: &mut R, random: usize) -> Result<OracleReport> {
    let mut count = 0;
    let mut violations = 0;
    let mut notes = Vec::new();
    let mut run = |label: String, atoms: Vec<Atom>, notes: &mut Vec<String>| -> Result<()> {
        count += 1;
        let bad = check_one(&atoms)?;
        if !bad.is_empty() {
            violations += 1;
            notes.push(format!("{label}: {}", bad.join(", ")));
        }
        Ok(())
    };
    let ops = round_ops(rng);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let cell = [ops[0][a].clone(), ops[1][b].clone(), ops[2][c].clone()];
                run(format!("point ({a},{b},{c})"), vec![(q(1, 1), cell)], &mut notes)?;
            }
        }
    }
    let w: [Vec<BigRational>; 3] = std::array::from_fn(|_| random_weights(rng, 4));
    let mut product = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let p = w[0][a].clone() * w[1][b].clone() * w[2][c].clone();
                product.push((p, [ops[0][a].clone(), ops[1][b].clone(), ops[2][c].clone()]));
            }
        }
    }
    run("product".into(), product, &mut notes)?;
    let diag = (0..4).map(|a| (w[0][a].clone(), [ops[0][a].clone(), ops[0][a].clone(), ops[0][a].clone()])).collect();
    run("correlated p(A,A,A)".into(), diag, &mut notes)?;
    for k in 0..random {
        let ops = round_ops(rng);
        let cells = rng.random_range(1..=ASSOC_SUPPORT_CAP);
        let atoms = random_weights(rng, cells)
            .into_iter()
            .map(|p| {
                let pick = |r: usize, rng: &mut R| ops[r][rng.random_range(0..4)].clone();
                (p, [pick(0, rng), pick(1, rng), pick(2, rng)])
            })
            .collect();
        run(format!("random #{k}"), atoms, &mut notes)?;
    }
    Ok(OracleReport {
        proposition: "associativity".into(),
        instance: format!("{count} three-round joints on {QUBITS} qubits, ≤ 4 ops per round"),
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn all_bracketings_agree() {
        let mut rng = substream(41, &[]);
        let r = check_associativity(&mut rng, 20).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.instances, 64 + 2 + 20);
    }
}
