//! Locality under composition: `Λ_α ⋄ Λ_β ⊆ Λ_{2 max(α,β)^{1/2}}` and
//! `Λ_α ∘ Λ_β ⊆ Λ_{α+β}`, plus near-tight adversarial joints.

use num_rational::BigRational;
use rand::Rng;

use super::exact::{op_key, tail_test, tally, BoundForm};
use super::instances::{local_channel, q, random_coupling};
use super::{OracleReport, Relation};
use crate::error::{Error, Result};
use crate::pauli_algebra::{BitVec, PauliOp};
use crate::stochastic::{ClassSpec, JointFaultDistribution};

pub const COMPOSITION_QUBIT_CAP: usize = 6;

fn supports(atoms: &[(BigRational, PauliOp, PauliOp)]) -> Vec<(BigRational, BitVec)> {
    atoms.iter().map(|(p, a, b)| (p.clone(), (a * b).support())).collect()
}

fn library_composed_matches(n: usize, atoms: &[(BigRational, PauliOp, PauliOp)]) -> Result<bool> {
    let j = JointFaultDistribution::from_paulis(
        n,
        atoms.iter().map(|(p, a, b)| (p.clone(), vec![a.clone(), b.clone()])).collect(),
    )?;
    let lib = tally(j.composed().entries().iter().map(|(p, e)| (p.clone(), op_key(e))));
    let ours = tally(atoms.iter().map(|(p, a, b)| (p.clone(), op_key(&(b * a)))));
    Ok(lib.into_iter().filter(|(_, p)| *p != q(0, 1)).eq(ours.into_iter().filter(|(_, p)| *p != q(0, 1))))
}

/// The joint concentrating `min(α, β)` on a pair: `A = {α X_a}`, `B = {β X_b}`, maximally coupled.
pub fn pair_concentrated(n: usize, alpha: &BigRational, beta: &BigRational) -> Vec<(BigRational, PauliOp, PauliOp)> {
    let m = if alpha <= beta { alpha.clone() } else { beta.clone() };
    let one = q(1, 1);
    let (xa, xb, id) = (PauliOp::x_on(n, [0]), PauliOp::x_on(n, [1]), PauliOp::identity(n));
    let mut v = vec![(m.clone(), xa.clone(), xb.clone())];
    if *alpha > m {
        v.push((alpha.clone() - m.clone(), xa, id.clone()));
    }
    if *beta > m {
        v.push((beta.clone() - m.clone(), id.clone(), xb));
    }
    let rest = one - alpha.clone() - beta.clone() + m;
    v.push((rest, id.clone(), id));
    v
}

/// Both single-qubit splits of a pair at once: `A = {α X_a, α X_b}`, `B = {α X_b, α X_a}`,
/// coupled crosswise so the pair receives `2α`.
pub fn crossed_pair(n: usize, alpha: &BigRational) -> Vec<(BigRational, PauliOp, PauliOp)> {
    let (xa, xb, id) = (PauliOp::x_on(n, [0]), PauliOp::x_on(n, [1]), PauliOp::identity(n));
    vec![
        (alpha.clone(), xa.clone(), xb.clone()),
        (alpha.clone(), xb, xa),
        (q(1, 1) - alpha.clone() - alpha.clone(), id.clone(), id),
    ]
}

/// Randomized and adversarial composition checks on `n` qubits.
pub fn check_composition_bounds<R: Rng + ?Sized>(
    n: usize,
    lambda: &BigRational,
    lambda_prime: &BigRational,
    trials: usize,
    rng: &mut R,
) -> Result<OracleReport> {
    if !(2..=COMPOSITION_QUBIT_CAP).contains(&n) {
        return Err(Error::Capacity {
            what: "qubits for composition checks (2..=6)".into(),
            got: n,
            cap: COMPOSITION_QUBIT_CAP,
        });
    }
    let eps = if lambda >= lambda_prime { lambda.clone() } else { lambda_prime.clone() };
    let diamond = BoundForm::ScaledRoot { c: q(2, 1), a: eps.clone() };
    let circ_param = lambda.clone() + lambda_prime.clone();
    let circ = BoundForm::Power(circ_param.clone());
    let mut violations = 0;
    let mut notes = Vec::new();
    let mut worst_random = 0.0f64;
    let mut worst = (0.0, 0.0, String::new());
    for t in 0..trials {
        let ka = rng.random_range(1..=3);
        let kb = rng.random_range(1..=3);
        let a = local_channel(rng, n, lambda, ka, 3);
        let b = local_channel(rng, n, lambda_prime, kb, 3);
        let cert_a = tail_test(
            &a.iter().map(|(p, e)| (p.clone(), e.support())).collect::<Vec<_>>(),
            &BoundForm::Power(lambda.clone()),
        )
        .0;
        let cert_b = tail_test(
            &b.iter().map(|(p, e)| (p.clone(), e.support())).collect::<Vec<_>>(),
            &BoundForm::Power(lambda_prime.clone()),
        )
        .0;
        if !cert_a || !cert_b {
            return Err(Error::Precondition(format!("trial {t}: sampled marginal not certified")));
        }
        let joint = random_coupling(rng, &a, &b);
        let (ok, w) = tail_test(&supports(&joint), &diamond);
        if let Some(w) = &w {
            worst_random = worst_random.max(w.ratio);
            if w.ratio > worst.0 {
                worst = (
                    w.ratio,
                    diamond.value_f64(w.subset.count_ones()),
                    format!("random ⋄ trial {t}, R = {}, T(R) = {}", w.subset, w.lhs),
                );
            }
        }
        if !ok {
            violations += 1;
            notes.push(format!("trial {t}: ⋄ bound violated"));
        }
        let product: Vec<_> =
            a.iter().flat_map(|(p, ea)| b.iter().map(move |(r, eb)| (p * r, ea.clone(), eb.clone()))).collect();
        let (ok, _) = tail_test(&supports(&product), &circ);
        if !ok {
            violations += 1;
            notes.push(format!("trial {t}: ∘ bound violated"));
        }
        if t % 50 == 0 {
            if !library_composed_matches(n, &joint)? {
                violations += 1;
                notes.push(format!("trial {t}: library composition differs"));
            }
            let composed = JointFaultDistribution::from_paulis(
                n,
                product.iter().map(|(p, x, y)| (p.clone(), vec![x.clone(), y.clone()])).collect(),
            )?
            .composed();
            if !ClassSpec::lambda(circ_param.clone()).member(&composed, None)?.is_member() {
                violations += 1;
                notes.push(format!("trial {t}: library membership disagrees on ∘"));
            }
        }
    }
    // adversarial, near-tight joints
    let mut adversarial = 0.0f64;
    for joint in [pair_concentrated(n, lambda, lambda_prime), crossed_pair(n, &eps)] {
        if crossed_pair_valid(&eps) || joint.len() != 3 {
            let (ok, w) = tail_test(&supports(&joint), &diamond);
            if !ok {
                violations += 1;
                notes.push("adversarial joint violates the ⋄ bound".into());
            }
            adversarial = adversarial.max(w.map_or(0.0, |w| w.ratio));
        }
    }
    notes.push(format!("max ratio to ⋄ bound: random {worst_random:.4}, adversarial {adversarial:.4}"));
    Ok(OracleReport {
        proposition: "composition_locality".into(),
        instance: format!("n = {n}, λ = {lambda}, λ' = {lambda_prime}, {trials} random joints"),
        relation: Relation::Le,
        lhs: worst.0.max(adversarial),
        rhs: 1.0,
        pass: violations == 0,
        instances: trials,
        violations,
        worst_ratio: Some(adversarial),
        witness: Some(worst.2),
        notes,
    })
}

fn crossed_pair_valid(alpha: &BigRational) -> bool {
    alpha.clone() + alpha.clone() <= q(1, 1)
}
