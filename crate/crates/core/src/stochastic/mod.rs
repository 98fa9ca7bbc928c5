//! Stochastic channels over Pauli operations and recovery maps, their
//! composition, distances, failure rates, locality classes and the
//! constructive approximation witnesses.

mod channel;
mod class;
mod joint;
mod recovery;
mod witness;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pauli_algebra::BitVec;
use crate::prob::Probability;

pub use channel::{ChannelEntry, StochasticChannel};
pub use class::{ClassKind, ClassSpec};
pub use joint::{FaultStep, JointAtom, JointFaultDistribution};
pub use recovery::{FlipDistribution, RecoveryChannel};
pub use witness::{appr_fail_witness, compose_witness, ApproxDecomposition};

/// Largest set size whose subsets are enumerated by the tail checks.
pub const SUBSET_CAP: usize = 20;

/// Result of a class-membership test.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership<P> {
    Member,
    /// The worst violated subset, with `lhs > rhs`.
    Violation {
        subset: Vec<usize>,
        lhs: P,
        rhs: P,
    },
}

impl<P> Membership<P> {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

/// Superset sums `Σ_{i : R ⊆ F_i} p_i` for every nonempty `R` contained in some `F_i`.
pub fn superset_sums<P: Probability>(items: &[(P, BitVec)]) -> Result<HashMap<BitVec, P>> {
    let mut sums: HashMap<BitVec, P> = HashMap::new();
    for (p, set) in items {
        if *p == P::zero() {
            continue;
        }
        let elems: Vec<usize> = set.iter_ones().collect();
        if elems.len() > SUBSET_CAP {
            return Err(Error::Capacity {
                what: "set size for subset enumeration".into(),
                got: elems.len(),
                cap: SUBSET_CAP,
            });
        }
        for mask in 1u64..(1u64 << elems.len()) {
            let r = BitVec::from_indices(
                set.len(),
                elems.iter().enumerate().filter(|(k, _)| (mask >> k) & 1 == 1).map(|(_, &e)| e),
            );
            match sums.get_mut(&r) {
                Some(s) => *s = s.clone() + p.clone(),
                None => {
                    sums.insert(r, p.clone());
                }
            }
        }
    }
    Ok(sums)
}

/// Checks `Σ_{i : R ⊆ F_i} p_i ≤ bound(|R|)` for every `R`; subsets outside
/// all `F_i` have zero left-hand side and are skipped. A failure reports the
/// worst subset by `lhs/rhs`, ties going to the smaller subset.
pub fn tail_check<P: Probability>(items: &[(P, BitVec)], bound: impl Fn(usize) -> P) -> Result<Membership<P>> {
    let sums = superset_sums(items)?;
    let mut keys: Vec<&BitVec> = sums.keys().collect();
    keys.sort_by(|a, b| a.count_ones().cmp(&b.count_ones()).then_with(|| a.cmp(b)));
    let mut worst: Option<(&BitVec, P, P)> = None;
    for r in keys {
        let lhs = &sums[r];
        let rhs = bound(r.count_ones());
        if lhs.le_tol(&rhs) {
            continue;
        }
        let replace = match &worst {
            None => true,
            Some((_, wl, wr)) => lhs.clone() * wr.clone() > wl.clone() * rhs.clone(),
        };
        if replace {
            worst = Some((r, lhs.clone(), rhs));
        }
    }
    Ok(match worst {
        None => Membership::Member,
        Some((r, lhs, rhs)) => Membership::Violation { subset: r.iter_ones().collect(), lhs, rhs },
    })
}

/// Checks the tail condition against `ε^{|R|}`.
pub fn tail_check_power<P: Probability>(items: &[(P, BitVec)], eps: &P) -> Result<Membership<P>> {
    tail_check(items, |k| eps.pow_n(k))
}

/// Groups `(p, item)` pairs by `key`, keeping the first item of each group and
/// summing probabilities. Groups come out in first-seen order.
pub(crate) fn merge_by<P: Probability, T, K: std::hash::Hash + Eq>(
    entries: impl IntoIterator<Item = (P, T)>,
    key: impl Fn(&T) -> K,
) -> Vec<(P, T)> {
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut out: Vec<(P, T)> = Vec::new();
    for (p, t) in entries {
        let k = key(&t);
        match index.get(&k) {
            Some(&i) => out[i].0 = out[i].0.clone() + p,
            None => {
                index.insert(k, out.len());
                out.push((p, t));
            }
        }
    }
    out
}

/// Half the L1 distance between two distributions already keyed consistently.
pub(crate) fn half_l1<P: Probability, K: std::hash::Hash + Eq + Clone>(a: &[(P, K)], b: &[(P, K)]) -> P {
    let mut diff: HashMap<K, P> = HashMap::new();
    for (p, k) in a {
        let e = diff.entry(k.clone()).or_insert_with(P::zero);
        *e = e.clone() + p.clone();
    }
    for (p, k) in b {
        let e = diff.entry(k.clone()).or_insert_with(P::zero);
        *e = e.clone() - p.clone();
    }
    let mut total = P::zero();
    for v in diff.into_values() {
        total = total + v.magnitude();
    }
    total.half()
}

pub(crate) fn check_normalized<P: Probability>(probs: impl Iterator<Item = P>) -> Result<()> {
    let mut total = P::zero();
    for p in probs {
        if p.is_negative() {
            return Err(Error::NotNormalized(p.to_f64()));
        }
        total = total + p;
    }
    if !total.approx_eq(&P::one()) {
        return Err(Error::NotNormalized(total.to_f64()));
    }
    Ok(())
}
