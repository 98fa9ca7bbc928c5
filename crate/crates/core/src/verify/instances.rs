//! Random exact-rational instances for the oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::pauli_algebra::{BitVec, PauliOp};

pub(crate) fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `k` positive rationals summing to 1 with small denominators.
pub(crate) fn random_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<BigRational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.random_range(1..=20)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|v| q(v, total)).collect()
}

/// Uniform Pauli on `n` qubits of weight at most `max_weight`.
pub(crate) fn random_op<R: Rng + ?Sized>(rng: &mut R, n: usize, max_weight: usize, x_only: bool) -> PauliOp {
    let w = rng.random_range(0..=max_weight.min(n));
    let mut qubits: Vec<usize> = (0..n).collect();
    for i in 0..w {
        let j = rng.random_range(i..n);
        qubits.swap(i, j);
    }
    let mut x = BitVec::zeros(n);
    let mut z = BitVec::zeros(n);
    for &qb in &qubits[..w] {
        match if x_only { 0 } else { rng.random_range(0..3) } {
            0 => x.set(qb, true),
            1 => {
                x.set(qb, true);
                z.set(qb, true)
            }
            _ => z.set(qb, true),
        }
    }
    PauliOp::from_masks(x, z).expect("equal lengths")
}

pub(crate) fn random_bits<R: Rng + ?Sized>(rng: &mut R, len: usize) -> BitVec {
    BitVec::from_bools(&(0..len).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>())
}

/// A channel in `Λ_λ` by construction: each non-identity atom of weight `w`
/// carries at most `λ^w / k`, the identity takes the rest.
pub(crate) fn local_channel<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    lambda: &BigRational,
    atoms: usize,
    max_weight: usize,
) -> Vec<(BigRational, PauliOp)> {
    let mut out: Vec<(BigRational, PauliOp)> = Vec::new();
    let mut used = q(0, 1);
    for _ in 0..atoms {
        let mut e = random_op(rng, n, max_weight, true);
        if e.is_identity() {
            e = PauliOp::x_on(n, [rng.random_range(0..n)]);
        }
        let mut cap = q(1, atoms as i64);
        for _ in 0..e.weight() {
            cap *= lambda.clone();
        }
        let p = cap * q(rng.random_range(1..=100), 100);
        used += p.clone();
        out.push((p, e));
    }
    out.push((q(1, 1) - used, PauliOp::identity(n)));
    out
}

/// A coupling of two distributions: the northwest-corner rule applied after
/// shuffling both sides, so the joint has exactly the given marginals.
pub(crate) fn random_coupling<R: Rng + ?Sized, A: Clone, B: Clone>(
    rng: &mut R,
    a: &[(BigRational, A)],
    b: &[(BigRational, B)],
) -> Vec<(BigRational, A, B)> {
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    for i in (1..ia.len()).rev() {
        ia.swap(i, rng.random_range(0..=i));
    }
    for i in (1..ib.len()).rev() {
        ib.swap(i, rng.random_range(0..=i));
    }
    let mut ra: Vec<BigRational> = ia.iter().map(|&i| a[i].0.clone()).collect();
    let mut rb: Vec<BigRational> = ib.iter().map(|&j| b[j].0.clone()).collect();
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    let zero = q(0, 1);
    while i < ra.len() && j < rb.len() {
        let m = if ra[i] <= rb[j] { ra[i].clone() } else { rb[j].clone() };
        if m > zero {
            out.push((m.clone(), a[ia[i]].1.clone(), b[ib[j]].1.clone()));
        }
        ra[i] -= m.clone();
        rb[j] -= m;
        if ra[i] == zero {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn coupling_has_given_marginals() {
        let mut rng = substream(9, &[]);
        for _ in 0..50 {
            let wa = random_weights(&mut rng, 3);
            let wb = random_weights(&mut rng, 4);
            let a: Vec<_> = wa.into_iter().zip(0..).collect();
            let b: Vec<_> = wb.into_iter().zip(10..).collect();
            let j = random_coupling(&mut rng, &a, &b);
            for (p, k) in &a {
                let s: BigRational = j.iter().filter(|t| t.1 == *k).map(|t| t.0.clone()).sum();
                assert_eq!(&s, p);
            }
            for (p, k) in &b {
                let s: BigRational = j.iter().filter(|t| t.2 == *k).map(|t| t.0.clone()).sum();
                assert_eq!(&s, p);
            }
        }
    }

    #[test]
    fn weights_normalized() {
        let mut rng = substream(10, &[]);
        let w = random_weights(&mut rng, 5);
        assert_eq!(w.iter().cloned().sum::<BigRational>(), q(1, 1));
    }
}
