//! Noisy recovery followed by noise equals `eff` of the recovery, up to the
//! failure rate of `eff(R) ⋄ E`.

use num_rational::BigRational;
use rand::Rng;

use super::exact::{tally, tv, OracleCode};
use super::instances::{random_bits, random_op, random_weights};
use super::repair::describe;
use super::{cross_check, OracleReport, Relation};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli_algebra::{BitVec, PauliOp};
use crate::prob::Probability;
use crate::stochastic::{FlipDistribution, RecoveryChannel, StochasticChannel};

/// Largest `|recovery| × |noise|` enumerated.
pub const LEMMA1_SUPPORT_CAP: usize = 1 << 16;

/// A joint `Σ p_{σi} R_σ ∘ E_i`.
pub type JointAtoms<P> = Vec<(P, BitVec, PauliOp)>;

pub(crate) struct Lemma1Eval<P> {
    pub lhs: P,
    pub rhs: P,
    /// `synd(F_T) = eff(R)` held atom by atom.
    pub synd_identity: bool,
}

pub(crate) fn evaluate<P: Probability>(oc: &OracleCode, atoms: &[(P, BitVec, PauliOp)]) -> Result<Lemma1Eval<P>> {
    let mut actual = Vec::with_capacity(atoms.len());
    let mut eff = Vec::with_capacity(atoms.len());
    let mut rhs = P::zero();
    let mut synd_identity = true;
    for (p, sigma, e) in atoms {
        let w = oc.omega(sigma)?;
        // R_σ on E P_0: the correction read from the shifted syndrome σ + σ(E)
        let f = &oc.omega(&sigma.xor(&oc.syndrome(e)))? * e;
        if oc.synd(&f)? != w {
            synd_identity = false;
        }
        let we = &w * e;
        if oc.fails(&we)? {
            rhs = rhs + p.clone();
        }
        actual.push((p.clone(), oc.gauge_key(&f)));
        eff.push((p.clone(), oc.gauge_key(&w)));
    }
    Ok(Lemma1Eval { lhs: tv(&tally(actual), &tally(eff)), rhs, synd_identity })
}

fn to_f64_atoms(atoms: &[(BigRational, BitVec, PauliOp)]) -> Vec<(f64, BitVec, PauliOp)> {
    atoms.iter().map(|(p, s, e)| (p.to_f64(), s.clone(), e.clone())).collect()
}

/// The library's `eff` agrees with the oracle's on the recovery marginal.
fn eff_agrees(oc: &OracleCode, code: &StabilizerCode, atoms: &[(BigRational, BitVec, PauliOp)]) -> Result<bool> {
    let marginal: Vec<(BigRational, BitVec)> =
        tally(atoms.iter().map(|(p, s, _)| (p.clone(), s.clone()))).into_iter().map(|(s, p)| (p, s)).collect();
    let lib = RecoveryChannel::new(code, marginal.clone())?.eff(code)?;
    let ours =
        tally(marginal.iter().map(|(p, s)| Ok((p.clone(), oc.gauge_key(&oc.omega(s)?)))).collect::<Result<Vec<_>>>()?);
    let theirs = tally(lib.entries().iter().map(|(p, e)| (p.clone(), oc.gauge_key(e))));
    Ok(ours == theirs)
}

struct Tracker {
    count: usize,
    violations: usize,
    worst: Option<(f64, f64, String)>,
    notes: Vec<String>,
}

impl Tracker {
    fn new() -> Self {
        Tracker { count: 0, violations: 0, worst: None, notes: Vec::new() }
    }

    fn record(
        &mut self,
        oc: &OracleCode,
        code: &StabilizerCode,
        label: &str,
        atoms: &[(BigRational, BitVec, PauliOp)],
    ) -> Result<()> {
        let exact = evaluate(oc, atoms)?;
        let float = evaluate(oc, &to_f64_atoms(atoms))?;
        self.count += 1;
        let mut ok = exact.lhs <= exact.rhs && exact.synd_identity;
        if !cross_check(&exact.lhs, float.lhs) || !cross_check(&exact.rhs, float.rhs) {
            ok = false;
            self.notes.push(format!("{label}: float and rational evaluations disagree"));
        }
        if !eff_agrees(oc, code, atoms)? {
            ok = false;
            self.notes.push(format!("{label}: library eff differs from the oracle's"));
        }
        if !ok {
            self.violations += 1;
        }
        let (l, r) = (exact.lhs.to_f64(), exact.rhs.to_f64());
        if self.worst.as_ref().is_none_or(|(wl, wr, _)| l - r > wl - wr) {
            self.worst = Some((l, r, label.to_string()));
        }
        Ok(())
    }

    fn report(self, instance: String) -> OracleReport {
        let (lhs, rhs, witness) = self.worst.unwrap_or((0.0, 0.0, String::new()));
        OracleReport {
            proposition: "lemma1".into(),
            instance,
            relation: Relation::Le,
            lhs,
            rhs,
            pass: self.violations == 0,
            instances: self.count,
            violations: self.violations,
            worst_ratio: None,
            witness: Some(witness),
            notes: self.notes,
        }
    }
}

fn product_atoms<P: Clone>(rec: &[(P, BitVec)], noise: &[(P, PauliOp)], mul: impl Fn(&P, &P) -> P) -> JointAtoms<P> {
    let mut out = Vec::with_capacity(rec.len() * noise.len());
    for (q, s) in rec {
        for (p, e) in noise {
            out.push((mul(q, p), s.clone(), e.clone()));
        }
    }
    out
}

fn check_cap(n: usize) -> Result<()> {
    if n > LEMMA1_SUPPORT_CAP {
        return Err(Error::Capacity { what: "joint support for the effective-noise oracle".into(), got: n, cap: LEMMA1_SUPPORT_CAP });
    }
    Ok(())
}

/// Checks one recovery/noise pair in its uncorrelated form.
pub fn check_lemma1(
    code: &StabilizerCode,
    recovery: &RecoveryChannel<BigRational>,
    noise: &StochasticChannel<BigRational>,
) -> Result<OracleReport> {
    check_cap(recovery.entries().len() * noise.len())?;
    let oc = OracleCode::new(code);
    let atoms = product_atoms(recovery.entries(), noise.entries(), |a, b| a * b);
    let mut t = Tracker::new();
    t.record(&oc, code, "product", &atoms)?;
    Ok(t.report(format!("{} recovery labels × {} noise ops", recovery.entries().len(), noise.len())))
}

/// Checks one correlated joint.
pub fn check_lemma1_joint(code: &StabilizerCode, atoms: &[(BigRational, BitVec, PauliOp)]) -> Result<OracleReport> {
    check_cap(atoms.len())?;
    let oc = OracleCode::new(code);
    let mut t = Tracker::new();
    t.record(&oc, code, "joint", atoms)?;
    Ok(t.report(format!("{} joint atoms", atoms.len())))
}

/// Randomized suite: `instances` correlated joints and as many product pairs,
/// with recoveries drawn from flip distributions and from arbitrary syndrome labels.
pub fn lemma1_suite<R: Rng + ?Sized>(code: &StabilizerCode, rng: &mut R, instances: usize) -> Result<OracleReport> {
    let oc = OracleCode::new(code);
    let syndromes = oc.valid_syndromes(16)?;
    let n = code.n();
    let mut t = Tracker::new();
    for k in 0..instances {
        // ⋄: arbitrary correlated joint of (σ, E)
        let m = rng.random_range(1..=8);
        let w = random_weights(rng, m);
        let atoms: JointAtoms<BigRational> = w
            .into_iter()
            .map(|p| (p, syndromes[rng.random_range(0..syndromes.len())].clone(), random_op(rng, n, n, k % 2 == 0)))
            .collect();
        t.record(&oc, code, &format!("joint #{k}"), &atoms)?;
        // ∘: recovery from a random flip distribution, independent noise
        let fk = rng.random_range(1..=4);
        let flips = FlipDistribution::new(
            code.num_outcomes(),
            random_weights(rng, fk).into_iter().map(|p| (p, random_bits(rng, code.num_outcomes()))).collect(),
        )?;
        let rec = RecoveryChannel::from_flips(&flips, code)?;
        let ek = rng.random_range(1..=6);
        let noise: Vec<(BigRational, PauliOp)> =
            random_weights(rng, ek).into_iter().map(|p| (p, random_op(rng, n, n, k % 3 != 0))).collect();
        let atoms = product_atoms(rec.entries(), &noise, |a, b| a * b);
        t.record(&oc, code, &format!("product #{k}"), &atoms)?;
    }
    Ok(t.report(format!(
        "{}: {} randomized (recovery, noise) instances in both compositions",
        describe(code),
        2 * instances
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::verify::instances::q;

    #[test]
    fn noiseless_is_trivial() {
        let c = StabilizerCode::repetition(3).unwrap();
        let r = check_lemma1(&c, &RecoveryChannel::noiseless(&c), &StochasticChannel::identity(3)).unwrap();
        assert!(r.pass);
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn iid_flips_and_noise_on_rep3() {
        let c = StabilizerCode::repetition(3).unwrap();
        let rec = RecoveryChannel::from_flips(&FlipDistribution::iid(2, q(1, 10)), &c).unwrap();
        let noise = StochasticChannel::iid_x(3, q(1, 10));
        let r = check_lemma1(&c, &rec, &noise).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.lhs <= r.rhs);
    }

    #[test]
    fn random_rep5_joints() {
        let c = StabilizerCode::repetition(5).unwrap();
        let mut rng = substream(21, &[]);
        let r = lemma1_suite(&c, &mut rng, 30).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.instances, 60);
    }
}
