use serde::{Deserialize, Serialize};

use super::{check_normalized, half_l1, merge_by};
use crate::code::StabilizerCode;
use crate::error::{check_dim, Result};
use crate::pauli_algebra::PauliOp;
use crate::prob::Probability;

/// A finite probability distribution over Pauli operations, `Σ p_i E_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticChannel<P = f64> {
    n: usize,
    entries: Vec<(P, PauliOp)>,
}

/// JSON form of one channel entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelEntry {
    pub p: f64,
    pub pauli: PauliOp,
}

impl<P: Probability> StochasticChannel<P> {
    /// Validates dimensions, nonnegativity and normalization.
    pub fn new(n: usize, entries: Vec<(P, PauliOp)>) -> Result<Self> {
        for (_, e) in &entries {
            check_dim(n, e.n())?;
        }
        check_normalized(entries.iter().map(|(p, _)| p.clone()))?;
        Ok(StochasticChannel { n, entries })
    }

    /// Skips the normalization check (for formal sums built inside proofs).
    pub fn from_parts(n: usize, entries: Vec<(P, PauliOp)>) -> Self {
        StochasticChannel { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        StochasticChannel { n, entries: vec![(P::one(), PauliOp::identity(n))] }
    }

    /// `{1 − p: I, p: e}`.
    pub fn two_point(e: PauliOp, p: P) -> Self {
        let n = e.n();
        StochasticChannel { n, entries: vec![(P::one() - p.clone(), PauliOp::identity(n)), (p, e)] }
    }

    /// Independent X flips with probability `lambda` on each of `n` qubits, enumerated exactly.
    pub fn iid_x(n: usize, lambda: P) -> Self {
        assert!(n <= super::SUBSET_CAP);
        let q = P::one() - lambda.clone();
        let entries = (0u64..(1 << n))
            .map(|mask| {
                let k = mask.count_ones() as usize;
                let e = PauliOp::x_on(n, (0..n).filter(|i| (mask >> i) & 1 == 1));
                (lambda.pow_n(k) * q.pow_n(n - k), e)
            })
            .collect();
        StochasticChannel { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(P, PauliOp)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> P {
        self.entries.iter().fold(P::zero(), |a, (p, _)| a + p.clone())
    }

    /// Probability assigned to exactly `op`.
    pub fn prob_of(&self, op: &PauliOp) -> P {
        self.entries.iter().filter(|(_, e)| e == op).fold(P::zero(), |a, (p, _)| a + p.clone())
    }

    fn sorted_entries(&self) -> Vec<(P, PauliOp)> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| a.1.canonical_cmp(&b.1));
        v
    }

    /// Merges identical operations; output sorted by (weight, masks).
    pub fn merge_identical(&self) -> Self {
        let merged = merge_by(self.sorted_entries(), |e| e.clone());
        StochasticChannel { n: self.n, entries: merged.into_iter().filter(|(p, _)| *p != P::zero()).collect() }
    }

    /// Merges gauge-equivalent operations. Each class keeps its smallest
    /// representative in (weight, masks) order; zero-probability classes drop.
    pub fn coalesce(&self, code: &StabilizerCode) -> Self {
        let merged = merge_by(self.sorted_entries(), |e| code.gauge_class(e));
        StochasticChannel { n: self.n, entries: merged.into_iter().filter(|(p, _)| *p != P::zero()).collect() }
    }

    /// Statistical distance keyed on the exact operations.
    pub fn distance(&self, other: &Self) -> P {
        let a: Vec<(P, PauliOp)> = self.entries.clone();
        let b: Vec<(P, PauliOp)> = other.entries.clone();
        half_l1(&a, &b)
    }

    /// Statistical distance after identifying gauge-equivalent operations.
    pub fn distance_mod_gauge(&self, other: &Self, code: &StabilizerCode) -> P {
        let key = |c: &Self| -> Vec<_> { c.entries.iter().map(|(p, e)| (p.clone(), code.gauge_class(e))).collect() };
        half_l1(&key(self), &key(other))
    }

    /// `Σ p_i · [E_i not correctable]`.
    pub fn fail_rate(&self, code: &StabilizerCode) -> Result<P> {
        let mut f = P::zero();
        for (p, e) in &self.entries {
            if !code.is_correctable(e)? {
                f = f + p.clone();
            }
        }
        Ok(f)
    }

    /// `Σ p_i synd(E_i)`, coalesced, together with the distance bound `fail(ch)`.
    pub fn synd_project(&self, code: &StabilizerCode) -> Result<(Self, P)> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (p, e) in &self.entries {
            entries.push((p.clone(), code.synd(e)?));
        }
        let projected = StochasticChannel { n: self.n, entries }.coalesce(code);
        Ok((projected, self.fail_rate(code)?))
    }

    /// Product distribution with ops multiplied, merged by exact operation.
    pub fn product(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for (p, a) in &self.entries {
            for (q, b) in &other.entries {
                entries.push((p.clone() * q.clone(), b * a));
            }
        }
        Ok(StochasticChannel { n: self.n, entries }.merge_identical())
    }

    /// Uncorrelated composition `a ∘ b`, coalesced against the code.
    pub fn uncorrelated_compose(&self, other: &Self, code: &StabilizerCode) -> Result<Self> {
        Ok(self.product(other)?.coalesce(code))
    }

    pub fn map_prob<Q: Probability>(&self, f: impl Fn(&P) -> Q) -> StochasticChannel<Q> {
        StochasticChannel { n: self.n, entries: self.entries.iter().map(|(p, e)| (f(p), e.clone())).collect() }
    }

    pub fn to_f64(&self) -> StochasticChannel<f64> {
        self.map_prob(|p| p.to_f64())
    }

    pub fn to_json_entries(&self) -> Vec<ChannelEntry> {
        self.entries.iter().map(|(p, e)| ChannelEntry { p: p.to_f64(), pauli: e.clone() }).collect()
    }
}

impl StochasticChannel<f64> {
    pub fn from_json_entries(entries: &[ChannelEntry]) -> Result<Self> {
        let n = entries.first().map(|e| e.pauli.n()).unwrap_or(0);
        Self::new(n, entries.iter().map(|e| (e.p, e.pauli.clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_rational::BigRational;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn rep3() -> StabilizerCode {
        StabilizerCode::repetition(3).unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::ratio(a, b)
    }

    #[test]
    fn coalesce_examples() {
        let c = rep3();
        let ch = StochasticChannel::new(3, vec![(0.5, p("III")), (0.5, p("III"))]).unwrap();
        assert_eq!(ch.coalesce(&c).entries(), &[(1.0, p("III"))]);
        let ch = StochasticChannel::new(3, vec![(0.5, p("ZZI")), (0.5, p("III"))]).unwrap();
        assert_eq!(ch.coalesce(&c).entries(), &[(1.0, p("III"))]);
        let ch = StochasticChannel::new(3, vec![(0.7, p("III")), (0.3, p("XII"))]).unwrap();
        assert_eq!(ch.coalesce(&c), ch);
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(matches!(StochasticChannel::new(1, vec![(0.5, p("I"))]), Err(Error::NotNormalized(_))));
        assert!(matches!(StochasticChannel::new(1, vec![(1.5, p("I")), (-0.5, p("X"))]), Err(Error::NotNormalized(_))));
        assert!(matches!(StochasticChannel::new(2, vec![(1.0, p("I"))]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn distance_examples() {
        let a = StochasticChannel::new(1, vec![(r(7, 10), p("I")), (r(3, 10), p("X"))]).unwrap();
        let b = StochasticChannel::new(1, vec![(r(1, 2), p("I")), (r(1, 2), p("X"))]).unwrap();
        assert_eq!(a.distance(&a), r(0, 1));
        assert_eq!(a.distance(&b), r(1, 5));
        let i = StochasticChannel::<BigRational>::identity(1);
        let x = StochasticChannel::new(1, vec![(r(1, 1), p("X"))]).unwrap();
        assert_eq!(i.distance(&x), r(1, 1));
    }

    #[test]
    fn fail_rate_examples() {
        let c = rep3();
        assert_eq!(StochasticChannel::<f64>::identity(3).fail_rate(&c).unwrap(), 0.0);
        let ch = StochasticChannel::two_point(p("XXX"), r(1, 7));
        assert_eq!(ch.fail_rate(&c).unwrap(), r(1, 7));
        let ch = StochasticChannel::two_point(p("XII"), r(1, 10));
        assert_eq!(ch.fail_rate(&c).unwrap(), r(0, 1));
    }

    #[test]
    fn uncorrelated_example() {
        let c = rep3();
        let a = StochasticChannel::two_point(p("XII"), r(1, 10));
        let out = a.uncorrelated_compose(&a, &c).unwrap();
        assert_eq!(out.entries(), &[(r(82, 100), p("III")), (r(18, 100), p("XII"))]);
        let id = StochasticChannel::identity(3);
        assert_eq!(a.uncorrelated_compose(&id, &c).unwrap(), a);
    }

    #[test]
    fn synd_project_examples() {
        let c = rep3();
        let (proj, d) = StochasticChannel::<BigRational>::identity(3).synd_project(&c).unwrap();
        assert_eq!(proj, StochasticChannel::identity(3));
        assert_eq!(d, r(0, 1));
        let ch = StochasticChannel::two_point(p("XII"), r(1, 10));
        let (proj, d) = ch.synd_project(&c).unwrap();
        assert_eq!(proj, ch);
        assert_eq!(d, r(0, 1));
        let ch = StochasticChannel::two_point(p("XXX"), r(1, 10));
        let (proj, d) = ch.synd_project(&c).unwrap();
        assert_eq!(proj, StochasticChannel::identity(3));
        assert_eq!(d, r(1, 10));
    }

    #[test]
    fn iid_is_normalized() {
        let ch = StochasticChannel::iid_x(3, r(1, 10));
        assert_eq!(ch.total(), r(1, 1));
        assert_eq!(ch.len(), 8);
    }

    #[test]
    fn json_round_trip() {
        let ch = StochasticChannel::new(2, vec![(0.25, p("XZ")), (0.75, p("II"))]).unwrap();
        let js = serde_json::to_string(&ch.to_json_entries()).unwrap();
        assert_eq!(js, r#"[{"p":0.25,"pauli":"XZ"},{"p":0.75,"pauli":"II"}]"#);
        let back: Vec<ChannelEntry> = serde_json::from_str(&js).unwrap();
        assert_eq!(StochasticChannel::from_json_entries(&back).unwrap(), ch);
    }
}
