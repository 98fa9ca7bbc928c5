//! Analytic parameter wiring: the `f`/`g` functions, the `τ`/`δ` assignment and
//! the memory-lifetime and pair-failure bounds.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    /// Residual noise modelled as local Pauli noise; `f1 = f2 = 0`, `g1(λ) = λ`.
    #[default]
    LocalNoise,
    /// Residual noise modelled through local syndromes.
    LocalSyndromes,
}

/// Family constants. The defaults are placeholders (all 1) and carry no
/// authority for any particular code family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyConstants {
    pub lambda0: f64,
    pub b: f64,
    pub i: f64,
    pub c: f64,
    pub j: f64,
    pub k: f64,
    pub tau0: f64,
    pub eta0: f64,
    /// Confinement exponent `K`.
    #[serde(rename = "K")]
    pub big_k: f64,
    pub v1: f64,
    pub v2: f64,
}

impl Default for FamilyConstants {
    fn default() -> Self {
        FamilyConstants {
            lambda0: 1.0,
            b: 1.0,
            i: 1.0,
            c: 1.0,
            j: 1.0,
            k: 1.0,
            tau0: 1.0,
            eta0: 1.0,
            big_k: 1.0,
            v1: 1.0,
            v2: 1.0,
        }
    }
}

impl FamilyConstants {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("lambda0", self.lambda0),
            ("b", self.b),
            ("i", self.i),
            ("c", self.c),
            ("j", self.j),
            ("k", self.k),
            ("tau0", self.tau0),
            ("eta0", self.eta0),
            ("K", self.big_k),
            ("v1", self.v1),
            ("v2", self.v2),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("constant {name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// A user-supplied `(argument, n_qubits) ↦ value` function.
pub type RateFn = Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    F1,
    G1,
    F2,
    G2,
    F3,
    F4,
    G4,
}

impl Which {
    fn arity(&self) -> usize {
        match self {
            Which::F2 | Which::G2 => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Default)]
pub struct ParameterFunctions {
    pub mode: BoundsMode,
    pub constants: FamilyConstants,
    /// Overrides `f3` (default 0; supply the residual failure rate of your code).
    pub f3: Option<RateFn>,
    /// Overrides `f4` (default 0, exact `eff` inclusion).
    pub f4: Option<RateFn>,
    /// Overrides the closed form of `g4`.
    pub g4: Option<RateFn>,
}

impl fmt::Debug for ParameterFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParameterFunctions")
            .field("mode", &self.mode)
            .field("constants", &self.constants)
            .field("f3", &self.f3.is_some())
            .field("f4", &self.f4.is_some())
            .field("g4", &self.g4.is_some())
            .finish()
    }
}

impl ParameterFunctions {
    pub fn new(mode: BoundsMode, constants: FamilyConstants) -> Self {
        ParameterFunctions { mode, constants, ..Default::default() }
    }

    pub fn with_f3(mut self, f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static) -> Self {
        self.f3 = Some(Arc::new(f));
        self
    }

    pub fn with_f4(mut self, f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static) -> Self {
        self.f4 = Some(Arc::new(f));
        self
    }

    pub fn with_g4(mut self, f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static) -> Self {
        self.g4 = Some(Arc::new(f));
        self
    }

    /// `f3(τ) = min(1, n·τ)`: any channel in `Λ_τ` is nontrivial with probability at most `n·τ`.
    pub fn with_union_f3(self) -> Self {
        self.with_f3(|tau, n| (n as f64 * tau).min(1.0))
    }
}

fn two_sqrt_max(a: f64, b: f64) -> f64 {
    2.0 * a.max(b).sqrt()
}

/// Evaluates one of the parameter functions.
pub fn eval_fg(pf: &ParameterFunctions, which: Which, args: &[f64], n_qubits: usize) -> Result<f64> {
    if args.len() != which.arity() {
        return Err(Error::Dimension { expected: which.arity(), got: args.len() });
    }
    if let Some(&a) = args.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        return Err(Error::Domain(format!("{which:?} argument {a} must be finite and nonnegative")));
    }
    pf.constants.validate()?;
    let k = &pf.constants;
    let n = n_qubits as f64;
    let local_noise = pf.mode == BoundsMode::LocalNoise;
    let v = match which {
        Which::F1 if local_noise => 0.0,
        Which::F1 => n * (args[0] / k.lambda0).powf(k.b * n.powf(k.i)),
        Which::G1 if local_noise => args[0],
        Which::G1 => k.v1 * args[0].powf(1.0 / k.v2),
        Which::F2 if local_noise => 0.0,
        Which::F2 => k.k * n * (two_sqrt_max(args[0], args[1]) / k.tau0).powf(k.c * n.powf(k.j)),
        Which::G2 => two_sqrt_max(args[0], args[1]),
        Which::F3 => pf.f3.as_ref().map_or(0.0, |f| f(args[0], n_qubits)),
        Which::F4 => pf.f4.as_ref().map_or(0.0, |f| f(args[0], n_qubits)),
        Which::G4 => match &pf.g4 {
            Some(f) => f(args[0], n_qubits),
            None => {
                let eta = args[0];
                if eta >= k.eta0 {
                    return Err(Error::Domain(format!("g4 needs eta < eta0, got {eta} >= {}", k.eta0)));
                }
                let expo = if local_noise { 1.0 / (2.0 * (1.0 + k.big_k)) } else { 0.5 };
                let s = (eta / k.eta0).powf(expo);
                s / (1.0 - s)
            }
        },
    };
    Ok(v)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Wiring {
    pub tau1: f64,
    pub tau2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

/// `τ1 = g4(η)`, `τ2 = g2(g1(λ), τ1)`, `δ1 = 2f4(η) + f2(τ1, τ2) + f3(g2(τ1, τ2))`,
/// `δ2 = f1(λ) + f2(g1(λ), τ1)`, `δ3 = f3(τ1)`.
pub fn wire_parameters(pf: &ParameterFunctions, lambda: f64, eta: f64, n_qubits: usize) -> Result<Wiring> {
    let e = |w: Which, a: &[f64]| eval_fg(pf, w, a, n_qubits);
    let tau1 = e(Which::G4, &[eta])?;
    let g1 = e(Which::G1, &[lambda])?;
    let tau2 = e(Which::G2, &[g1, tau1])?;
    let delta1 =
        2.0 * e(Which::F4, &[eta])? + e(Which::F2, &[tau1, tau2])? + e(Which::F3, &[e(Which::G2, &[tau1, tau2])?])?;
    let delta2 = e(Which::F1, &[lambda])? + e(Which::F2, &[g1, tau1])?;
    let delta3 = e(Which::F3, &[tau1])?;
    Ok(Wiring { tau1, tau2, delta1, delta2, delta3 })
}

/// `n(δ1 + δ2) + δ3`, clamped to `[0, 1]`.
pub fn lifetime_bound(n_rounds: usize, delta1: f64, delta2: f64, delta3: f64) -> f64 {
    (n_rounds as f64 * (delta1 + delta2) + delta3).clamp(0.0, 1.0)
}

/// `|B| · (2 max(τ, τ')^{1/2})^m`.
pub fn prop_b_bound(b_size: usize, m: usize, tau: f64, tau_prime: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    if tau < 0.0 || tau_prime < 0.0 {
        return Err(Error::Domain("rates must be nonnegative".into()));
    }
    Ok(b_size as f64 * two_sqrt_max(tau, tau_prime).powi(m as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn closed_form_examples() {
        let ln = ParameterFunctions::default();
        assert!(close(eval_fg(&ln, Which::G2, &[0.04, 0.01], 3).unwrap(), 0.4));
        let consts = FamilyConstants { lambda0: 1.0, b: 1.0, i: 1.0, ..Default::default() };
        let ls = ParameterFunctions::new(BoundsMode::LocalSyndromes, consts);
        assert!(close(eval_fg(&ls, Which::F1, &[0.5], 2).unwrap(), 0.5));
        for pf in [&ln, &ls] {
            assert_eq!(eval_fg(pf, Which::G1, &[0.0], 5).unwrap(), 0.0);
            assert_eq!(eval_fg(pf, Which::G2, &[0.0, 0.0], 5).unwrap(), 0.0);
            assert_eq!(eval_fg(pf, Which::G4, &[0.0], 5).unwrap(), 0.0);
        }
    }

    #[test]
    fn g4_forms_and_domain() {
        let consts = FamilyConstants { eta0: 0.1, big_k: 1.0, ..Default::default() };
        let ls = ParameterFunctions::new(BoundsMode::LocalSyndromes, consts);
        let s: f64 = (0.01f64 / 0.1).sqrt();
        assert!(close(eval_fg(&ls, Which::G4, &[0.01], 1).unwrap(), s / (1.0 - s)));
        let ln = ParameterFunctions::new(BoundsMode::LocalNoise, consts);
        let s: f64 = (0.01f64 / 0.1).powf(0.25);
        assert!(close(eval_fg(&ln, Which::G4, &[0.01], 1).unwrap(), s / (1.0 - s)));
        assert!(matches!(eval_fg(&ln, Which::G4, &[0.1], 1), Err(Error::Domain(_))));
        assert!(matches!(eval_fg(&ln, Which::G1, &[-0.1], 1), Err(Error::Domain(_))));
        assert!(eval_fg(&ln, Which::G2, &[0.1], 1).is_err());
    }

    #[test]
    fn wiring_examples() {
        let w = wire_parameters(&ParameterFunctions::default(), 0.0, 0.0, 9).unwrap();
        assert_eq!(w, Wiring::default());
        let ls = ParameterFunctions::new(BoundsMode::LocalSyndromes, FamilyConstants::default());
        assert_eq!(wire_parameters(&ls, 0.0, 0.0, 9).unwrap(), Wiring::default());
        let pf = ParameterFunctions::default().with_g4(|_, _| 0.04);
        let w = wire_parameters(&pf, 0.01, 0.003, 3).unwrap();
        assert!(close(w.tau1, 0.04));
        assert!(close(w.tau2, 0.4));
        assert_eq!((w.delta1, w.delta2, w.delta3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn lifetime_and_prop_b() {
        assert!(close(lifetime_bound(100, 1e-4, 1e-4, 1e-3), 0.021));
        assert_eq!(lifetime_bound(50, 0.0, 0.0, 0.0), 0.0);
        assert!(close(lifetime_bound(10, 0.001, 0.001, 0.002), 0.022));
        assert_eq!(lifetime_bound(10, 0.5, 0.5, 0.0), 1.0);
        assert!(close(prop_b_bound(1, 2, 0.01, 0.01).unwrap(), 0.04));
        assert_eq!(prop_b_bound(3, 2, 0.0, 0.0).unwrap(), 0.0);
        assert!(prop_b_bound(1, 0, 0.1, 0.1).is_err());
    }

    #[test]
    fn outputs_monotone_in_eta_and_lambda() {
        let consts = FamilyConstants { eta0: 0.5, tau0: 2.0, lambda0: 0.5, ..Default::default() };
        for mode in [BoundsMode::LocalNoise, BoundsMode::LocalSyndromes] {
            let pf = ParameterFunctions::new(mode, consts).with_union_f3();
            let mut prev: Option<Wiring> = None;
            for k in 0..40 {
                let eta = k as f64 * 0.01;
                let w = wire_parameters(&pf, 0.01, eta, 4).unwrap();
                if let Some(p) = prev {
                    assert!(w.tau1 >= p.tau1 && w.tau2 >= p.tau2);
                    assert!(w.delta1 >= p.delta1 && w.delta2 >= p.delta2 && w.delta3 >= p.delta3);
                }
                prev = Some(w);
            }
        }
    }

    #[test]
    fn local_syndrome_terms_shrink_with_n() {
        let consts = FamilyConstants { lambda0: 0.1, tau0: 1.0, ..Default::default() };
        let pf = ParameterFunctions::new(BoundsMode::LocalSyndromes, consts);
        let mut last = (f64::INFINITY, f64::INFINITY);
        for n in [2usize, 5, 10, 50, 100, 1000] {
            let f1 = eval_fg(&pf, Which::F1, &[0.01], n).unwrap();
            let f2 = eval_fg(&pf, Which::F2, &[0.001, 0.001], n).unwrap();
            assert!(f1 <= last.0 && f2 <= last.1, "n = {n}");
            last = (f1, f2);
        }
    }
}
