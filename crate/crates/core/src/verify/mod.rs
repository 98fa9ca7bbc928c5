//! Brute-force oracles over tiny instances, in exact rational arithmetic.
//!
//! Each oracle returns an [`OracleReport`]. The oracles recompute syndromes,
//! gauge classes and composed channels themselves from Pauli primitives and the
//! code's defining data, then compare with the library where the library offers
//! the same quantity.

use serde::Serialize;

use crate::code::StabilizerCode;
use crate::error::Result;
use crate::prob::Probability;
use crate::rng::{substream, STREAM_ORACLE};

pub mod assoc;
pub mod composition;
pub mod deltas;
pub(crate) mod exact;
pub(crate) mod instances;
pub mod lemma1;
pub mod pauli_props;
pub mod prop_b;
pub mod repair;

pub use assoc::check_associativity;
pub use composition::check_composition_bounds;
pub use deltas::{exact_parameter_functions, exact_rep3_deltas, ExactDeltas};
pub use lemma1::{check_lemma1, check_lemma1_joint, lemma1_suite};
pub use pauli_props::{check_appr_fail, check_pauli_syndrome_props};
pub use prop_b::{find_prop_b_structure, PropB};
pub use repair::check_repair_linearity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub proposition: String,
    pub instance: String,
    pub relation: Relation,
    /// Worst-case checked quantity, as f64 for reporting.
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub instances: usize,
    pub violations: usize,
    pub worst_ratio: Option<f64>,
    pub witness: Option<String>,
    pub notes: Vec<String>,
}

/// Float and exact evaluations of the same quantity agree to 1e-9.
pub(crate) fn cross_check<P: Probability>(exact: &P, float: f64) -> bool {
    (exact.to_f64() - float).abs() <= 1e-9
}

/// The full oracle suite at the sizes used by `verify all`.
pub fn run_all(seed: u64) -> Result<Vec<OracleReport>> {
    let rep3 = StabilizerCode::repetition(3)?;
    let rep5 = StabilizerCode::repetition(5)?;
    let t2 = StabilizerCode::toric2d(2)?;
    let t3 = StabilizerCode::toric2d(3)?;
    let t3d = StabilizerCode::toric3d_z(2)?;
    let rng = |tag: u64| substream(seed, &[STREAM_ORACLE, tag]);
    let l = instances::q(1, 100);
    let mut out = vec![
        lemma1_suite(&rep3, &mut rng(1), 60)?,
        lemma1_suite(&rep5, &mut rng(2), 60)?,
        check_composition_bounds(6, &l, &l, 10_000, &mut rng(3))?,
        check_associativity(&mut rng(4), 200)?,
        check_repair_linearity(&t3d, &mut rng(5), 1000)?,
        check_pauli_syndrome_props(&rep3, &mut rng(6), 0)?,
        check_pauli_syndrome_props(&rep5, &mut rng(7), 0)?,
        check_pauli_syndrome_props(&t2, &mut rng(8), 10_000)?,
        check_pauli_syndrome_props(&t3, &mut rng(9), 10_000)?,
        check_appr_fail(&rep3, &mut rng(10), 200)?,
        check_appr_fail(&rep5, &mut rng(11), 200)?,
    ];
    for code in [&rep3, &t2] {
        out.push(find_prop_b_structure(code, &l, &l)?.report);
    }
    Ok(out)
}
