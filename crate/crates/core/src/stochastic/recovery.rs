use super::{check_normalized, merge_by, tail_check_power, Membership, StochasticChannel};
use crate::code::StabilizerCode;
use crate::error::{check_dim, Result};
use crate::pauli_algebra::BitVec;
use crate::prob::Probability;

fn bit_order(a: &BitVec, b: &BitVec) -> std::cmp::Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| a.cmp(b))
}

/// A distribution over measurement-flip vectors `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipDistribution<P = f64> {
    len: usize,
    entries: Vec<(P, BitVec)>,
}

impl<P: Probability> FlipDistribution<P> {
    pub fn new(len: usize, entries: Vec<(P, BitVec)>) -> Result<Self> {
        for (_, y) in &entries {
            check_dim(len, y.len())?;
        }
        check_normalized(entries.iter().map(|(p, _)| p.clone()))?;
        Ok(FlipDistribution { len, entries })
    }

    pub fn deterministic(y: BitVec) -> Self {
        FlipDistribution { len: y.len(), entries: vec![(P::one(), y)] }
    }

    /// Independent flips with probability `eta`, enumerated exactly.
    pub fn iid(len: usize, eta: P) -> Self {
        assert!(len <= super::SUBSET_CAP);
        let q = P::one() - eta.clone();
        let entries = (0u64..(1 << len))
            .map(|mask| {
                let k = mask.count_ones() as usize;
                (eta.pow_n(k) * q.pow_n(len - k), BitVec::from_u64(len, mask))
            })
            .collect();
        FlipDistribution { len, entries }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(P, BitVec)] {
        &self.entries
    }

    /// Checks `Σ_{y ⊇ x} p_y ≤ η^{|x|}` for every `x`.
    pub fn member(&self, eta: &P) -> Result<Membership<P>> {
        tail_check_power(&self.entries, eta)
    }
}

/// `Σ q_σ R_σ`, recovery maps labelled by their repaired syndrome.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryChannel<P = f64> {
    n_checks: usize,
    entries: Vec<(P, BitVec)>,
}

impl<P: Probability> RecoveryChannel<P> {
    /// Validates normalization and that every label is a reachable syndrome.
    pub fn new(code: &StabilizerCode, entries: Vec<(P, BitVec)>) -> Result<Self> {
        for (_, s) in &entries {
            check_dim(code.num_checks(), s.len())?;
            if !code.is_valid_syndrome(s) {
                return Err(crate::error::Error::MissingEntry(s.to_string()));
            }
        }
        check_normalized(entries.iter().map(|(p, _)| p.clone()))?;
        Ok(RecoveryChannel { n_checks: code.num_checks(), entries }.merged())
    }

    pub fn noiseless(code: &StabilizerCode) -> Self {
        RecoveryChannel { n_checks: code.num_checks(), entries: vec![(P::one(), BitVec::zeros(code.num_checks()))] }
    }

    /// `Σ_y p_y R_{r(y)}`, merged by label.
    pub fn from_flips(flips: &FlipDistribution<P>, code: &StabilizerCode) -> Result<Self> {
        check_dim(code.num_outcomes(), flips.len())?;
        let entries = flips.entries.iter().map(|(p, y)| (p.clone(), code.syndrome_repair_unchecked(y))).collect();
        Ok(RecoveryChannel { n_checks: code.num_checks(), entries }.merged())
    }

    fn merged(self) -> Self {
        let mut v = self.entries;
        v.sort_by(|a, b| bit_order(&a.1, &b.1));
        let entries = merge_by(v, |s| s.clone()).into_iter().filter(|(p, _)| *p != P::zero()).collect();
        RecoveryChannel { n_checks: self.n_checks, entries }
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn entries(&self) -> &[(P, BitVec)] {
        &self.entries
    }

    /// `eff(R) = Σ q_σ ω_σ`, coalesced.
    pub fn eff(&self, code: &StabilizerCode) -> Result<StochasticChannel<P>> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (q, s) in &self.entries {
            entries.push((q.clone(), code.correction(s)?));
        }
        Ok(StochasticChannel::from_parts(code.n(), entries).coalesce(code))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli_algebra::PauliOp;
    use num_rational::BigRational;

    fn b(s: &str) -> BitVec {
        BitVec::parse(s).unwrap()
    }

    fn r(a: i64, d: i64) -> BigRational {
        BigRational::ratio(a, d)
    }

    #[test]
    fn from_flips_examples() {
        let c = StabilizerCode::repetition(3).unwrap();
        let rc = RecoveryChannel::from_flips(&FlipDistribution::<f64>::deterministic(b("00")), &c).unwrap();
        assert_eq!(rc.entries(), &[(1.0, b("00"))]);
        let f = FlipDistribution::new(2, vec![(r(9, 10), b("00")), (r(1, 10), b("10"))]).unwrap();
        let rc = RecoveryChannel::from_flips(&f, &c).unwrap();
        assert_eq!(rc.entries(), &[(r(9, 10), b("00")), (r(1, 10), b("10"))]);

        let t = StabilizerCode::toric3d_z(2).unwrap();
        let y = BitVec::from_indices(24, [5]);
        let f = FlipDistribution::new(24, vec![(r(9, 10), BitVec::zeros(24)), (r(1, 10), y)]).unwrap();
        let rc = RecoveryChannel::from_flips(&f, &t).unwrap();
        assert_eq!(rc.entries(), &[(r(1, 1), BitVec::zeros(24))]);
    }

    #[test]
    fn eff_examples() {
        let c = StabilizerCode::repetition(3).unwrap();
        let rc = RecoveryChannel::<BigRational>::noiseless(&c);
        assert_eq!(rc.eff(&c).unwrap(), StochasticChannel::identity(3));
        let rc = RecoveryChannel::new(&c, vec![(r(9, 10), b("00")), (r(1, 10), b("10"))]).unwrap();
        let e = rc.eff(&c).unwrap();
        assert_eq!(e.entries(), &[(r(9, 10), "III".parse::<PauliOp>().unwrap()), (r(1, 10), "XII".parse().unwrap())]);
        assert_eq!(e.total(), r(1, 1));
    }

    #[test]
    fn iid_flips_saturate_the_tail_bound() {
        let f = FlipDistribution::iid(3, r(1, 5));
        let sums = super::super::superset_sums(f.entries()).unwrap();
        for (x, s) in sums {
            assert_eq!(s, r(1, 5).pow_n(x.count_ones()));
        }
        assert!(f.member(&r(1, 5)).unwrap().is_member());
        assert!(!f.member(&r(1, 6)).unwrap().is_member());
    }
}
