use std::collections::BTreeMap;

use super::{CodeFamily, CodeId, CodeParts, Decoder, Repair, StabilizerCode, Toric3dDecoder, Torus2, Torus3};
use super::{EXHAUSTIVE_QUBIT_CAP, REPAIR_RANK_CAP};
use crate::error::{Error, Result};
use crate::pauli_algebra::{F2Matrix, PauliOp};

/// Z-pair checks `Z_i Z_{i+1}`, checks measured directly.
pub(super) fn repetition(n: usize) -> Result<StabilizerCode> {
    if n > EXHAUSTIVE_QUBIT_CAP {
        return Err(Error::Capacity { what: "repetition code length".into(), got: n, cap: EXHAUSTIVE_QUBIT_CAP });
    }
    let checks: Vec<PauliOp> = (0..n - 1).map(|i| PauliOp::z_on(n, [i, i + 1])).collect();
    let parts = CodeParts {
        n,
        gauge_gens: checks.clone(),
        logical_reps: vec![(PauliOp::x_on(n, 0..n), PauliOp::z_on(n, [0]))],
        checks,
        ..Default::default()
    };
    let id = CodeId::new(CodeFamily::Repetition, n);
    let mut code = StabilizerCode::assemble(Some(id), parts, Decoder::Table(BTreeMap::new()), Repair::Zero)?;
    code.decoder = Decoder::Table(code.exhaustive_table());
    Ok(code)
}

/// Vertex and plaquette checks on an L×L torus, measured directly, with the
/// two global parities of the outcome vector as metachecks.
pub(super) fn toric2d(l: usize) -> StabilizerCode {
    let t = Torus2 { l };
    let n = t.n_qubits();
    let checks = t.checks();
    let k = checks.len();
    let l2 = l * l;
    let m = F2Matrix::from_rows_of_indices(k, &[(0..l2).collect(), (l2..2 * l2).collect()]);
    let parts = CodeParts {
        n,
        gauge_gens: checks.clone(),
        logical_reps: t.logical_reps(),
        checks,
        metachecks: Some(m),
        ..Default::default()
    };
    let id = CodeId::new(CodeFamily::Toric2d, l);
    let mut code = StabilizerCode::assemble(Some(id), parts, Decoder::Toric2d(t), Repair::Zero)
        .expect("toric2d dimensions are consistent");
    code.repair = code.exhaustive_repair().expect("rank-2 metachecks");
    code
}

/// Plaquette Z-checks on the edges of an L×L×L torus (X-error sector), with
/// cube metachecks and three winding-parity metachecks.
pub(super) fn toric3d_z(l: usize) -> StabilizerCode {
    let t = Torus3 { l };
    let n = t.n_edges();
    let checks = t.checks();
    let mut gauge = checks.clone();
    gauge.extend(t.stars());
    let parts = CodeParts {
        n,
        gauge_gens: gauge,
        logical_reps: t.logical_reps(),
        checks,
        metachecks: Some(t.metachecks()),
        ..Default::default()
    };
    let id = CodeId::new(CodeFamily::Toric3dZ, l);
    let decoder = Decoder::Toric3dZ(Box::new(Toric3dDecoder::new(t.clone())));
    let mut code = StabilizerCode::assemble(Some(id), parts, decoder, Repair::Toric3dZ(t))
        .expect("toric3d dimensions are consistent");
    if code.metachecks.rank() <= REPAIR_RANK_CAP {
        code.repair = code.exhaustive_repair().expect("rank under cap");
    }
    code
}
