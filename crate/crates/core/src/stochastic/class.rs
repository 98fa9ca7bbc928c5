use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{tail_check_power, FlipDistribution, Membership, StochasticChannel};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli_algebra::{BitVec, PauliOp, SpanBasis};
use crate::prob::Probability;

/// Largest gauge rank for which minimum-weight coset representatives are searched exhaustively.
pub const GAUGE_SEARCH_RANK_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    /// `Σ_{i : R ⊆ supp E_i} p_i ≤ λ^{|R|}` over qubit sets.
    Lambda,
    /// Pauli channels that satisfy the `Λ` condition for some choice of gauge representatives.
    LocalPauli,
    /// Channels of correction operations with `Σ_{σ' ⊇ σ} q_{σ'} ≤ τ^{|σ|}`.
    ExcLocal,
    /// Flip distributions with `Σ_{y ⊇ x} p_y ≤ η^{|x|}`.
    RecoveryLocal,
}

/// A parametric stochastic class, tested by predicate and sampled by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpec<P = f64> {
    pub kind: ClassKind,
    pub param: P,
}

impl<P: Probability> ClassSpec<P> {
    pub fn new(kind: ClassKind, param: P) -> Result<Self> {
        if param.is_negative() {
            return Err(Error::Domain(format!("class parameter {param:?} is negative")));
        }
        Ok(ClassSpec { kind, param })
    }

    pub fn lambda(param: P) -> Self {
        ClassSpec { kind: ClassKind::Lambda, param }
    }

    pub fn local_pauli(param: P) -> Self {
        ClassSpec { kind: ClassKind::LocalPauli, param }
    }

    pub fn exc_local(param: P) -> Self {
        ClassSpec { kind: ClassKind::ExcLocal, param }
    }

    pub fn recovery_local(param: P) -> Self {
        ClassSpec { kind: ClassKind::RecoveryLocal, param }
    }

    /// Tail-sum test of a Pauli channel. `LocalPauli` and `ExcLocal` need the code.
    pub fn member(&self, ch: &StochasticChannel<P>, code: Option<&StabilizerCode>) -> Result<Membership<P>> {
        let need_code = || Error::Precondition(format!("{:?} membership needs a code", self.kind));
        let items: Vec<(P, BitVec)> = match self.kind {
            ClassKind::Lambda => ch.entries().iter().map(|(p, e)| (p.clone(), e.support())).collect(),
            ClassKind::LocalPauli => {
                let code = code.ok_or_else(need_code)?;
                let reps = GaugeReps::new(code);
                ch.entries().iter().map(|(p, e)| (p.clone(), reps.min_weight(e).support())).collect()
            }
            ClassKind::ExcLocal => {
                let code = code.ok_or_else(need_code)?;
                let mut items = Vec::with_capacity(ch.len());
                for (p, e) in ch.entries() {
                    let omega = code.synd(e)?;
                    if !code.is_gauge(&(&omega * e)) {
                        return Err(Error::Precondition(format!("{e} is not a correction operation of the code")));
                    }
                    items.push((p.clone(), code.syndrome(e)?));
                }
                items
            }
            ClassKind::RecoveryLocal => {
                return Err(Error::Precondition("recovery-local membership applies to flip distributions".into()))
            }
        };
        tail_check_power(&items, &self.param)
    }

    /// Tail-sum test of a flip distribution (`RecoveryLocal` only).
    pub fn member_flips(&self, flips: &FlipDistribution<P>) -> Result<Membership<P>> {
        match self.kind {
            ClassKind::RecoveryLocal => flips.member(&self.param),
            k => Err(Error::Precondition(format!("{k:?} membership applies to Pauli channels"))),
        }
    }

    /// A random member over `atoms` random non-identity operations: probabilities
    /// are drawn from `{1..100}/(100·atoms)` and halved until the tail test
    /// passes; the identity takes the remaining mass.
    pub fn sample_channel<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        code: &StabilizerCode,
        atoms: usize,
        x_only: bool,
    ) -> Result<StochasticChannel<P>> {
        let n = code.n();
        if self.kind == ClassKind::RecoveryLocal {
            return Err(Error::Precondition("use sample_flips for recovery-local classes".into()));
        }
        if self.param == P::zero() || atoms == 0 {
            return Ok(StochasticChannel::identity(n));
        }
        let mut ops = Vec::with_capacity(atoms);
        while ops.len() < atoms {
            let e = random_pauli(rng, n, 3, x_only);
            let e = if self.kind == ClassKind::ExcLocal { code.synd(&e)? } else { e };
            if !e.is_identity() {
                ops.push(e);
            }
        }
        let den = 100 * atoms as i64;
        let mut probs: Vec<P> = (0..atoms).map(|_| P::ratio(rng.random_range(1..=100), den)).collect();
        for _ in 0..64 {
            let rest = probs.iter().fold(P::one(), |a, p| a - p.clone());
            let mut entries = vec![(rest, PauliOp::identity(n))];
            entries.extend(probs.iter().cloned().zip(ops.iter().cloned()));
            let ch = StochasticChannel::from_parts(n, entries);
            if self.member(&ch, Some(code))?.is_member() {
                return Ok(ch);
            }
            probs = probs.iter().map(|p| p.half()).collect();
        }
        Ok(StochasticChannel::identity(n))
    }

    /// A random member of a `RecoveryLocal` class over flip vectors of length `len`.
    pub fn sample_flips<R: Rng + ?Sized>(&self, rng: &mut R, len: usize, atoms: usize) -> Result<FlipDistribution<P>> {
        if self.kind != ClassKind::RecoveryLocal {
            return Err(Error::Precondition("sample_flips needs a recovery-local class".into()));
        }
        if self.param == P::zero() || atoms == 0 || len == 0 {
            return Ok(FlipDistribution::deterministic(BitVec::zeros(len)));
        }
        let ys: Vec<BitVec> = (0..atoms)
            .map(|_| {
                let w = rng.random_range(1..=len.min(3));
                BitVec::from_indices(len, sample(rng, len, w))
            })
            .collect();
        let den = 100 * atoms as i64;
        let mut probs: Vec<P> = (0..atoms).map(|_| P::ratio(rng.random_range(1..=100), den)).collect();
        for _ in 0..64 {
            let rest = probs.iter().fold(P::one(), |a, p| a - p.clone());
            let mut entries = vec![(rest, BitVec::zeros(len))];
            entries.extend(probs.iter().cloned().zip(ys.iter().cloned()));
            let f = FlipDistribution::new(len, entries)?;
            if f.member(&self.param)?.is_member() {
                return Ok(f);
            }
            probs = probs.iter().map(|p| p.half()).collect();
        }
        Ok(FlipDistribution::deterministic(BitVec::zeros(len)))
    }
}

/// A uniformly random Pauli of weight `1..=max_weight` (X only if requested).
pub fn random_pauli<R: Rng + ?Sized>(rng: &mut R, n: usize, max_weight: usize, x_only: bool) -> PauliOp {
    let w = rng.random_range(1..=max_weight.min(n).max(1));
    let mut x = BitVec::zeros(n);
    let mut z = BitVec::zeros(n);
    for q in sample(rng, n, w.min(n)) {
        let kind = if x_only { 0 } else { rng.random_range(0..3) };
        match kind {
            0 => x.set(q, true),
            1 => z.set(q, true),
            _ => {
                x.set(q, true);
                z.set(q, true);
            }
        }
    }
    PauliOp::from_masks(x, z).expect("equal lengths")
}

/// Minimum-weight gauge-coset representatives, by exhaustive search when the gauge group is small.
pub(crate) struct GaugeReps {
    n: usize,
    elements: Option<Vec<PauliOp>>,
}

impl GaugeReps {
    pub(crate) fn new(code: &StabilizerCode) -> Self {
        let rows: Vec<BitVec> = code.gauge_gens().iter().map(|g| g.to_symplectic()).collect();
        let basis = SpanBasis::new(2 * code.n(), &rows).basis().to_vec();
        let elements = (basis.len() <= GAUGE_SEARCH_RANK_CAP).then(|| {
            (0u64..(1 << basis.len()))
                .map(|mask| {
                    let mut v = BitVec::zeros(2 * code.n());
                    for (k, b) in basis.iter().enumerate() {
                        if (mask >> k) & 1 == 1 {
                            v.xor_assign(b);
                        }
                    }
                    PauliOp::from_symplectic(&v).expect("even length")
                })
                .collect()
        });
        GaugeReps { n: code.n(), elements }
    }

    pub(crate) fn min_weight(&self, e: &PauliOp) -> PauliOp {
        match &self.elements {
            None => e.clone(),
            Some(gs) => {
                debug_assert_eq!(e.n(), self.n);
                let mut best = e.clone();
                for g in gs {
                    let c = e * g;
                    if c.canonical_cmp(&best).is_lt() {
                        best = c;
                    }
                }
                best
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::ratio(a, b)
    }

    #[test]
    fn lambda_examples() {
        let ch = StochasticChannel::new(3, vec![(r(9, 10), p("III")), (r(1, 10), p("XII"))]).unwrap();
        assert!(ClassSpec::lambda(r(1, 10)).member(&ch, None).unwrap().is_member());
        let ch = StochasticChannel::new(3, vec![(r(8, 10), p("III")), (r(2, 10), p("XXI"))]).unwrap();
        match ClassSpec::lambda(r(1, 10)).member(&ch, None).unwrap() {
            Membership::Violation { subset, lhs, rhs } => {
                assert_eq!(subset, vec![0, 1]);
                assert_eq!(lhs, r(1, 5));
                assert_eq!(rhs, r(1, 100));
            }
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn iid_saturates_lambda() {
        let ch = StochasticChannel::iid_x(3, r(1, 10));
        assert!(ClassSpec::lambda(r(1, 10)).member(&ch, None).unwrap().is_member());
        assert!(!ClassSpec::lambda(r(1, 11)).member(&ch, None).unwrap().is_member());
        let sums = super::super::superset_sums(
            &ch.entries().iter().map(|(q, e)| (q.clone(), e.support())).collect::<Vec<_>>(),
        )
        .unwrap();
        for (set, s) in sums {
            assert_eq!(s, r(1, 10).pow_n(set.count_ones()));
        }
    }

    #[test]
    fn local_pauli_uses_gauge_freedom() {
        let c = StabilizerCode::repetition(3).unwrap();
        // Z1Z2 is gauge, so {0.9 I, 0.1 Z1Z2} is equivalent to the identity channel
        let ch = StochasticChannel::new(3, vec![(r(9, 10), p("III")), (r(1, 10), p("ZZI"))]).unwrap();
        assert!(!ClassSpec::lambda(r(1, 100)).member(&ch, None).unwrap().is_member());
        assert!(ClassSpec::local_pauli(r(1, 100)).member(&ch, Some(&c)).unwrap().is_member());
        assert!(ClassSpec::local_pauli(r(1, 100)).member(&ch, None).is_err());
    }

    #[test]
    fn exc_local_requires_corrections() {
        let c = StabilizerCode::repetition(3).unwrap();
        let ch = StochasticChannel::new(3, vec![(r(9, 10), p("III")), (r(1, 10), p("IXI"))]).unwrap();
        // IXI has syndrome 11: needs q ≤ τ² on {c1,c2} and ≤ τ on each singleton
        assert!(ClassSpec::exc_local(r(1, 3)).member(&ch, Some(&c)).unwrap().is_member());
        assert!(!ClassSpec::exc_local(r(1, 4)).member(&ch, Some(&c)).unwrap().is_member());
        let bad = StochasticChannel::two_point(p("XXI"), r(1, 10));
        assert!(matches!(ClassSpec::exc_local(r(1, 2)).member(&bad, Some(&c)), Err(Error::Precondition(_))));
    }

    #[test]
    fn samplers_produce_members() {
        let c = StabilizerCode::repetition(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [ClassKind::Lambda, ClassKind::LocalPauli, ClassKind::ExcLocal] {
            let spec = ClassSpec::new(kind, r(1, 20)).unwrap();
            for _ in 0..20 {
                let ch = spec.sample_channel(&mut rng, &c, 4, true).unwrap();
                assert_eq!(ch.total(), r(1, 1));
                assert!(spec.member(&ch, Some(&c)).unwrap().is_member());
            }
        }
        let spec = ClassSpec::recovery_local(r(1, 10));
        for _ in 0..20 {
            let f = spec.sample_flips(&mut rng, 4, 3).unwrap();
            assert!(spec.member_flips(&f).unwrap().is_member());
        }
        assert!(ClassSpec::new(ClassKind::Lambda, -0.1).is_err());
    }
}
