//! Constructive approximation witnesses.

use std::collections::HashMap;

use super::{FaultStep, JointFaultDistribution, StochasticChannel};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli_algebra::PauliOp;
use crate::prob::Probability;

/// A member `C = Σ (p_i − ε_i) A_i + Σ α_k C_k` close to a channel `Σ p_i A_i`:
/// the mass `ε_i` removed from each `A_i` and the replacement terms `α_k C_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxDecomposition<P> {
    pub removed: Vec<(PauliOp, P)>,
    pub added: Vec<(P, PauliOp)>,
}

impl<P: Probability> ApproxDecomposition<P> {
    /// `Σ_k α_k`, an upper bound on the distance between the channel and `C`.
    pub fn weight(&self) -> P {
        self.added.iter().fold(P::zero(), |a, (p, _)| a + p.clone())
    }

    /// The decomposition behind `A ≈ synd(A)`: every uncorrectable `E` is moved to `synd(E)`.
    pub fn from_appr_fail(ch: &StochasticChannel<P>, code: &StabilizerCode) -> Result<Self> {
        let mut removed = Vec::new();
        let mut added = Vec::new();
        for (p, e) in ch.merge_identical().entries() {
            if !code.is_correctable(e)? {
                removed.push((e.clone(), p.clone()));
                added.push((p.clone(), code.synd(e)?));
            }
        }
        Ok(ApproxDecomposition { removed, added })
    }

    /// The approximating channel `C`.
    pub fn apply(&self, ch: &StochasticChannel<P>) -> StochasticChannel<P> {
        let eps: HashMap<&PauliOp, &P> = self.removed.iter().map(|(e, p)| (e, p)).collect();
        let mut entries: Vec<(P, PauliOp)> = ch
            .merge_identical()
            .entries()
            .iter()
            .map(|(p, e)| (eps.get(e).map_or(p.clone(), |x| p.clone() - (*x).clone()), e.clone()))
            .collect();
        entries.extend(self.added.iter().cloned());
        StochasticChannel::from_parts(ch.n(), entries).merge_identical()
    }
}

/// `Σ_i p_i synd(E_i)` restricted to the uncorrectable terms, with correctable
/// terms kept as they are; within `fail(ch)` of `ch` and in `synd(ch)` up to gauge.
pub fn appr_fail_witness<P: Probability>(
    ch: &StochasticChannel<P>,
    code: &StabilizerCode,
) -> Result<(StochasticChannel<P>, P)> {
    let mut entries = Vec::with_capacity(ch.len());
    for (p, e) in ch.entries() {
        if code.is_correctable(e)? {
            entries.push((p.clone(), e.clone()));
        } else {
            entries.push((p.clone(), code.synd(e)?));
        }
    }
    Ok((StochasticChannel::from_parts(ch.n(), entries), ch.fail_rate(code)?))
}

/// Given `E = Σ p_ij A_i B_j` and a decomposition of its first marginal, builds
///
/// `E' = Σ p_ij (1 − ε_i/p_i) A_i B_j + Σ q_kj C_k B_j`,
/// `q_kj = Σ_i p_ij ε_i α_k / (p_i α)`,
///
/// whose first marginal is `C`, whose second marginal equals that of `E`, and
/// whose distance from `E` is at most `α = Σ α_k`.
pub fn compose_witness<P: Probability>(
    joint: &JointFaultDistribution<P>,
    dec: &ApproxDecomposition<P>,
) -> Result<JointFaultDistribution<P>> {
    if joint.rounds() != 2 {
        return Err(Error::Precondition(format!("compose_witness needs a 2-round joint, got {}", joint.rounds())));
    }
    let mut marginal: HashMap<&PauliOp, P> = HashMap::new();
    for (p, path) in joint.atoms() {
        let e = marginal.entry(&path[0].pauli).or_insert_with(P::zero);
        *e = e.clone() + p.clone();
    }
    let eps: HashMap<&PauliOp, &P> = dec.removed.iter().map(|(e, p)| (e, p)).collect();
    let alpha = dec.weight();
    let mut atoms: Vec<(P, Vec<FaultStep>)> = Vec::new();
    // mass leaving each B_j, to be redistributed over the C_k
    let mut leaving: Vec<(FaultStep, P)> = Vec::new();
    for (p, path) in joint.atoms() {
        let a = &path[0].pauli;
        let pi = marginal[a].clone();
        let frac = match eps.get(a) {
            Some(e) if pi != P::zero() => (*e).clone() * p.clone() / pi,
            _ => P::zero(),
        };
        atoms.push((p.clone() - frac.clone(), path.clone()));
        if frac != P::zero() {
            leaving.push((path[1].clone(), frac));
        }
    }
    if alpha != P::zero() {
        for (b, mass) in &leaving {
            for (ak, ck) in &dec.added {
                let q = mass.clone() * ak.clone() / alpha.clone();
                let first = FaultStep { pauli: ck.clone(), flips: crate::pauli_algebra::BitVec::zeros(b.flips.len()) };
                atoms.push((q, vec![first, b.clone()]));
            }
        }
    }
    JointFaultDistribution::new(joint.n(), joint.flip_len(), atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::ratio(a, b)
    }

    #[test]
    fn appr_fail_tight_case() {
        let c = StabilizerCode::repetition(3).unwrap();
        let ch = StochasticChannel::two_point(p("XXX"), r(1, 10));
        let (w, f) = appr_fail_witness(&ch, &c).unwrap();
        assert_eq!(f, r(1, 10));
        assert_eq!(ch.distance_mod_gauge(&w, &c), r(1, 10));
        assert_eq!(w.coalesce(&c), StochasticChannel::identity(3));
    }

    #[test]
    fn compose_witness_marginals_and_distance() {
        let c = StabilizerCode::repetition(3).unwrap();
        let j = JointFaultDistribution::from_paulis(
            3,
            vec![
                (r(1, 10), vec![p("XXX"), p("XII")]),
                (r(1, 5), vec![p("XXX"), p("III")]),
                (r(7, 10), vec![p("III"), p("IXI")]),
            ],
        )
        .unwrap();
        let m0 = j.marginal(0).unwrap();
        let dec = ApproxDecomposition::from_appr_fail(&m0, &c).unwrap();
        assert_eq!(dec.weight(), r(3, 10));
        let w = compose_witness(&j, &dec).unwrap();
        assert_eq!(w.marginal(0).unwrap(), dec.apply(&m0));
        assert_eq!(w.marginal(1).unwrap(), j.marginal(1).unwrap());
        let dist = j.composed().distance(&w.composed());
        assert!(dist <= dec.weight());
    }
}
