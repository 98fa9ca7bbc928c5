//! Oracle-side primitives. They read a code only through its defining data
//! (checks, gauge generators, correction table) and recompute everything else
//! from Pauli primitives, so the oracles do not lean on the machinery they test.

use std::collections::{BTreeMap, HashMap};

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli_algebra::{BitVec, PauliOp, SpanBasis};
use crate::prob::Probability;

pub(crate) struct OracleCode<'a> {
    pub code: &'a StabilizerCode,
    checks: Vec<PauliOp>,
    gauge: SpanBasis,
    reachable: SpanBasis,
}

impl<'a> OracleCode<'a> {
    pub fn new(code: &'a StabilizerCode) -> Self {
        let rows: Vec<BitVec> = code.gauge_gens().iter().map(|g| g.to_symplectic()).collect();
        let mut oc = OracleCode {
            code,
            checks: code.checks().to_vec(),
            gauge: SpanBasis::new(2 * code.n(), &rows),
            reachable: SpanBasis::new(0, &[]),
        };
        oc.reachable = SpanBasis::new(oc.num_checks(), &oc.single_qubit_syndromes());
        oc
    }

    fn single_qubit_syndromes(&self) -> Vec<BitVec> {
        (0..self.n())
            .flat_map(|q| [PauliOp::x_on(self.n(), [q]), PauliOp::z_on(self.n(), [q])])
            .map(|e| self.syndrome(&e))
            .collect()
    }

    pub fn syndrome_space_contains(&self, sigma: &BitVec) -> bool {
        self.reachable.contains(sigma)
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn syndrome(&self, e: &PauliOp) -> BitVec {
        let mut s = BitVec::zeros(self.checks.len());
        for (i, c) in self.checks.iter().enumerate() {
            if c.anticommutes(e) {
                s.set(i, true);
            }
        }
        s
    }

    /// `ω_σ`, read from the code's correction table.
    pub fn omega(&self, sigma: &BitVec) -> Result<PauliOp> {
        self.code.correction(sigma)
    }

    pub fn synd(&self, e: &PauliOp) -> Result<PauliOp> {
        self.omega(&self.syndrome(e))
    }

    pub fn in_gauge(&self, e: &PauliOp) -> bool {
        self.gauge.contains(&e.to_symplectic())
    }

    pub fn fails(&self, e: &PauliOp) -> Result<bool> {
        Ok(!self.in_gauge(&(&self.synd(e)? * e)))
    }

    pub fn gauge_key(&self, e: &PauliOp) -> BitVec {
        self.gauge.reduce(&e.to_symplectic())
    }

    /// Valid syndromes, by closing the check-syndromes of single-qubit Paulis under XOR.
    pub fn valid_syndromes(&self, cap: usize) -> Result<Vec<BitVec>> {
        let basis = &self.reachable;
        let rank = basis.rank();
        if rank > cap {
            return Err(Error::Capacity { what: "syndrome-space rank".into(), got: rank, cap });
        }
        let b = basis.basis().to_vec();
        let mut out: Vec<BitVec> = (0u64..(1 << rank))
            .map(|mask| {
                let mut v = BitVec::zeros(self.num_checks());
                for (k, row) in b.iter().enumerate() {
                    if (mask >> k) & 1 == 1 {
                        v.xor_assign(row);
                    }
                }
                v
            })
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Probability mass keyed by an arbitrary ordered key.
pub(crate) fn tally<P: Probability, K: Ord>(items: impl IntoIterator<Item = (P, K)>) -> BTreeMap<K, P> {
    let mut m: BTreeMap<K, P> = BTreeMap::new();
    for (p, k) in items {
        match m.get_mut(&k) {
            Some(v) => *v = v.clone() + p,
            None => {
                m.insert(k, p);
            }
        }
    }
    m
}

/// Half the L1 distance between two tallies.
pub(crate) fn tv<P: Probability, K: Ord + Clone>(a: &BTreeMap<K, P>, b: &BTreeMap<K, P>) -> P {
    let mut total = P::zero();
    for (k, p) in a {
        let q = b.get(k).cloned().unwrap_or_else(P::zero);
        total = total + (p.clone() - q).magnitude();
    }
    for (k, q) in b {
        if !a.contains_key(k) {
            total = total + q.clone();
        }
    }
    total.half()
}

/// Key of a Pauli that orders by the two masks.
pub(crate) fn op_key(e: &PauliOp) -> (BitVec, BitVec) {
    (e.x_mask().clone(), e.z_mask().clone())
}

/// Tail sums `T(R) = Σ_{i : R ⊆ S_i} p_i` over every nonempty `R` inside some `S_i`.
pub(crate) fn tails<P: Probability>(items: &[(P, BitVec)]) -> HashMap<BitVec, P> {
    let mut out: HashMap<BitVec, P> = HashMap::new();
    for (p, s) in items {
        if *p == P::zero() {
            continue;
        }
        let idx: Vec<usize> = s.iter_ones().collect();
        assert!(idx.len() <= 24, "oracle subset enumeration beyond 2^24");
        for mask in 1u32..(1u32 << idx.len()) {
            let mut r = BitVec::zeros(s.len());
            for (k, &q) in idx.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    r.set(q, true);
                }
            }
            let e = out.entry(r).or_insert_with(P::zero);
            *e = e.clone() + p.clone();
        }
    }
    out
}

/// Worst subset of a tail test: `(subset, lhs, ratio lhs/bound as f64)`.
pub(crate) struct TailWorst<P> {
    pub subset: BitVec,
    pub lhs: P,
    pub ratio: f64,
}

/// Checks `T(R) ≤ eps^{|R|}` for all `R`; the comparison is made on squares when
/// `sqrt_form` is set, i.e. against `(c·a^{1/2})^{|R|}` via `T² ≤ c^{2|R|} a^{|R|}`.
pub(crate) fn tail_test<P: Probability>(items: &[(P, BitVec)], bound: &BoundForm<P>) -> (bool, Option<TailWorst<P>>) {
    let mut ok = true;
    let mut worst: Option<TailWorst<P>> = None;
    let mut keys: Vec<(BitVec, P)> = tails(items).into_iter().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    for (r, t) in keys {
        let k = r.count_ones();
        if !bound.holds(&t, k) {
            ok = false;
        }
        let ratio = bound.ratio(&t, k);
        if worst.as_ref().is_none_or(|w| ratio > w.ratio) {
            worst = Some(TailWorst { subset: r, lhs: t, ratio });
        }
    }
    (ok, worst)
}

/// `eps^k`, or `(c·a^{1/2})^k` compared through squares.
pub(crate) enum BoundForm<P> {
    Power(P),
    ScaledRoot { c: P, a: P },
}

impl<P: Probability> BoundForm<P> {
    pub fn holds(&self, t: &P, k: usize) -> bool {
        match self {
            BoundForm::Power(eps) => *t <= eps.pow_n(k),
            BoundForm::ScaledRoot { c, a } => t.clone() * t.clone() <= (c.clone() * c.clone() * a.clone()).pow_n(k),
        }
    }

    pub fn value_f64(&self, k: usize) -> f64 {
        match self {
            BoundForm::Power(eps) => eps.to_f64().powi(k as i32),
            BoundForm::ScaledRoot { c, a } => (c.to_f64() * a.to_f64().sqrt()).powi(k as i32),
        }
    }

    pub fn ratio(&self, t: &P, k: usize) -> f64 {
        let b = self.value_f64(k);
        if b == 0.0 {
            if t.to_f64() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            t.to_f64() / b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn oracle_code_basics() {
        let c = StabilizerCode::repetition(3).unwrap();
        let o = OracleCode::new(&c);
        let e: PauliOp = "XXX".parse().unwrap();
        assert!(o.syndrome(&e).is_zero());
        assert!(o.fails(&e).unwrap());
        assert!(!o.fails(&"IXI".parse().unwrap()).unwrap());
        assert_eq!(o.valid_syndromes(8).unwrap().len(), 4);
        let t = c.clone();
        let o3 = OracleCode::new(&t);
        assert_eq!(o3.gauge_key(&"ZZI".parse().unwrap()), BitVec::zeros(6));
    }

    #[test]
    fn tail_test_square_form() {
        let r = |a, b| BigRational::ratio(a, b);
        // pair mass 1/100 against (2·(1/100)^{1/2})² = 4/100
        let items = vec![(r(1, 100), BitVec::parse("11").unwrap()), (r(99, 100), BitVec::zeros(2))];
        let (ok, worst) = tail_test(&items, &BoundForm::ScaledRoot { c: r(2, 1), a: r(1, 100) });
        assert!(ok);
        let w = worst.unwrap();
        assert_eq!(w.subset, BitVec::parse("11").unwrap());
        assert!((w.ratio - 0.25).abs() < 1e-12);
        let (ok, _) = tail_test(&items, &BoundForm::Power(r(1, 20)));
        assert!(!ok);
    }
}
