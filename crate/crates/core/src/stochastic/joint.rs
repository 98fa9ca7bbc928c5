use serde::{Deserialize, Serialize};

use super::{check_normalized, merge_by, FlipDistribution, StochasticChannel};
use crate::code::StabilizerCode;
use crate::error::{check_dim, Error, Result};
use crate::pauli_algebra::{BitVec, PauliOp};
use crate::prob::Probability;

/// One round of a fault path: a data Pauli and a measurement-flip vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaultStep {
    pub pauli: PauliOp,
    pub flips: BitVec,
}

/// JSON form of one joint atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointAtom {
    pub p: f64,
    pub path: Vec<FaultStep>,
}

/// An explicit joint distribution over multi-round fault paths.
#[derive(Clone, Debug, PartialEq)]
pub struct JointFaultDistribution<P = f64> {
    n: usize,
    flip_len: usize,
    rounds: usize,
    atoms: Vec<(P, Vec<FaultStep>)>,
}

impl<P: Probability> JointFaultDistribution<P> {
    pub fn new(n: usize, flip_len: usize, atoms: Vec<(P, Vec<FaultStep>)>) -> Result<Self> {
        let rounds = atoms.first().map(|(_, path)| path.len()).unwrap_or(0);
        for (_, path) in &atoms {
            if path.len() != rounds {
                return Err(Error::Precondition(format!("paths of length {} and {} in one joint", rounds, path.len())));
            }
            for s in path {
                check_dim(n, s.pauli.n())?;
                check_dim(flip_len, s.flips.len())?;
            }
        }
        check_normalized(atoms.iter().map(|(p, _)| p.clone()))?;
        Ok(JointFaultDistribution { n, flip_len, rounds, atoms })
    }

    /// A joint over data Paulis only (empty flip vectors).
    pub fn from_paulis(n: usize, atoms: Vec<(P, Vec<PauliOp>)>) -> Result<Self> {
        let atoms = atoms
            .into_iter()
            .map(|(p, ops)| (p, ops.into_iter().map(|pauli| FaultStep { pauli, flips: BitVec::zeros(0) }).collect()))
            .collect();
        Self::new(n, 0, atoms)
    }

    /// Independent rounds: the product joint of the given channels.
    pub fn product(channels: &[StochasticChannel<P>]) -> Result<Self> {
        let n = channels.first().map(|c| c.n()).unwrap_or(0);
        let mut atoms: Vec<(P, Vec<PauliOp>)> = vec![(P::one(), Vec::new())];
        for ch in channels {
            check_dim(n, ch.n())?;
            let mut next = Vec::with_capacity(atoms.len() * ch.len());
            for (p, path) in &atoms {
                for (q, e) in ch.entries() {
                    let mut path = path.clone();
                    path.push(e.clone());
                    next.push((p.clone() * q.clone(), path));
                }
            }
            atoms = next;
        }
        Self::from_paulis(n, atoms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flip_len(&self) -> usize {
        self.flip_len
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn atoms(&self) -> &[(P, Vec<FaultStep>)] {
        &self.atoms
    }

    /// Round-`t` data marginal (other rounds traced out), merged by operation.
    pub fn marginal(&self, t: usize) -> Result<StochasticChannel<P>> {
        self.check_round(t)?;
        let entries = self.atoms.iter().map(|(p, path)| (p.clone(), path[t].pauli.clone())).collect();
        Ok(StochasticChannel::from_parts(self.n, entries).merge_identical())
    }

    /// Round-`t` flip marginal.
    pub fn marginal_flips(&self, t: usize) -> Result<FlipDistribution<P>> {
        self.check_round(t)?;
        let mut v: Vec<(P, BitVec)> = self.atoms.iter().map(|(p, path)| (p.clone(), path[t].flips.clone())).collect();
        v.sort_by(|a, b| a.1.count_ones().cmp(&b.1.count_ones()).then_with(|| a.1.cmp(&b.1)));
        FlipDistribution::new(self.flip_len, merge_by(v, |y| y.clone()))
    }

    fn check_round(&self, t: usize) -> Result<()> {
        if t < self.rounds {
            Ok(())
        } else {
            Err(Error::Precondition(format!("round {t} out of range (rounds = {})", self.rounds)))
        }
    }

    /// Composed channel with ops `E_n ⋯ E_1`, merged by exact operation only.
    pub fn composed(&self) -> StochasticChannel<P> {
        let entries = self
            .atoms
            .iter()
            .map(|(p, path)| {
                let mut e = PauliOp::identity(self.n);
                for s in path {
                    e.mul_assign(&s.pauli);
                }
                (p.clone(), e)
            })
            .collect();
        StochasticChannel::from_parts(self.n, entries).merge_identical()
    }

    /// Correlated composition: the coalesced composed channel and every round marginal.
    pub fn correlated_compose(
        &self,
        code: &StabilizerCode,
    ) -> Result<(StochasticChannel<P>, Vec<StochasticChannel<P>>)> {
        check_dim(code.n(), self.n)?;
        let composed = self.composed().coalesce(code);
        let marginals = (0..self.rounds).map(|t| self.marginal(t)).collect::<Result<Vec<_>>>()?;
        Ok((composed, marginals))
    }

    /// Replaces rounds `start..end` by a single round (ops multiplied, flips added).
    pub fn merge_rounds(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.rounds {
            return Err(Error::Precondition(format!("bad round range {start}..{end}")));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|(p, path)| {
                let mut merged = FaultStep { pauli: PauliOp::identity(self.n), flips: BitVec::zeros(self.flip_len) };
                for s in &path[start..end] {
                    merged.pauli.mul_assign(&s.pauli);
                    merged.flips.xor_assign(&s.flips);
                }
                let mut out: Vec<FaultStep> = path[..start].to_vec();
                out.push(merged);
                out.extend_from_slice(&path[end..]);
                (p.clone(), out)
            })
            .collect();
        Ok(JointFaultDistribution {
            n: self.n,
            flip_len: self.flip_len,
            rounds: self.rounds - (end - start) + 1,
            atoms,
        })
    }

    pub fn map_prob<Q: Probability>(&self, f: impl Fn(&P) -> Q) -> JointFaultDistribution<Q> {
        JointFaultDistribution {
            n: self.n,
            flip_len: self.flip_len,
            rounds: self.rounds,
            atoms: self.atoms.iter().map(|(p, path)| (f(p), path.clone())).collect(),
        }
    }

    pub fn to_json_atoms(&self) -> Vec<JointAtom> {
        self.atoms.iter().map(|(p, path)| JointAtom { p: p.to_f64(), path: path.clone() }).collect()
    }
}

impl JointFaultDistribution<f64> {
    pub fn from_json_atoms(atoms: &[JointAtom]) -> Result<Self> {
        let (n, k) = atoms.first().and_then(|a| a.path.first()).map(|s| (s.pauli.n(), s.flips.len())).unwrap_or((0, 0));
        Self::new(n, k, atoms.iter().map(|a| (a.p, a.path.clone())).collect())
    }
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
    fn product_of_singletons() {
        let code = StabilizerCode::repetition(3).unwrap();
        let a = StochasticChannel::new(3, vec![(r(1, 1), p("XII"))]).unwrap();
        let b = StochasticChannel::new(3, vec![(r(1, 1), p("IXX"))]).unwrap();
        let j = JointFaultDistribution::product(&[a, b]).unwrap();
        let (c, _) = j.correlated_compose(&code).unwrap();
        assert_eq!(c.entries(), &[(r(1, 1), p("XXX"))]);
    }

    #[test]
    fn correlated_example() {
        let code = StabilizerCode::repetition(3).unwrap();
        let j = JointFaultDistribution::from_paulis(
            3,
            vec![(r(1, 10), vec![p("XII"), p("XII")]), (r(9, 10), vec![p("III"), p("III")])],
        )
        .unwrap();
        let (c, m) = j.correlated_compose(&code).unwrap();
        assert_eq!(c, StochasticChannel::identity(3));
        let expect = StochasticChannel::two_point(p("XII"), r(1, 10));
        assert_eq!(m, vec![expect.clone(), expect]);
    }

    #[test]
    fn product_joint_matches_uncorrelated() {
        let code = StabilizerCode::repetition(3).unwrap();
        let a = StochasticChannel::two_point(p("XII"), r(1, 10));
        let b = StochasticChannel::two_point(p("IXI"), r(1, 5));
        let j = JointFaultDistribution::product(&[a.clone(), b.clone()]).unwrap();
        let (c, _) = j.correlated_compose(&code).unwrap();
        assert_eq!(c, a.uncorrelated_compose(&b, &code).unwrap());
    }

    #[test]
    fn shape_mismatch_rejected() {
        let res = JointFaultDistribution::from_paulis(1, vec![(0.5, vec![p("I")]), (0.5, vec![p("I"), p("X")])]);
        assert!(matches!(res, Err(Error::Precondition(_))));
    }

    #[test]
    fn merge_rounds_and_flips() {
        let step = |s: &str, f: &str| FaultStep { pauli: p(s), flips: BitVec::parse(f).unwrap() };
        let j = JointFaultDistribution::new(
            1,
            2,
            vec![
                (r(1, 2), vec![step("X", "10"), step("X", "11"), step("I", "00")]),
                (r(1, 2), vec![step("I", "00"); 3]),
            ],
        )
        .unwrap();
        let m = j.merge_rounds(0, 2).unwrap();
        assert_eq!(m.rounds(), 2);
        assert_eq!(m.atoms()[0].1[0], step("I", "01"));
        let fl = j.marginal_flips(1).unwrap();
        assert_eq!(fl.entries().len(), 2);
        let js = serde_json::to_string(&j.to_json_atoms()).unwrap();
        assert!(js.starts_with(r#"[{"p":0.5,"path":[{"pauli":"X","flips":"10"}"#));
    }
}
