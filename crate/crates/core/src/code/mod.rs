//! Stabilizer codes: syndromes, correction tables, measured outcomes,
//! metachecks and the linear syndrome repair `r`.
//!
//! Repair is built from the metasyndrome alone: `r(x) = S·(x + ρ(M·x))`.
//! Because `ρ` never sees `x` directly, `r(x + y) = S·x + r(y)` holds for every
//! noiseless outcome vector `x`.

mod families;
pub mod lattice;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::pauli_algebra::{BitVec, F2Matrix, F2Solver, PauliOp, SpanBasis};

pub use lattice::{Toric3dDecoder, Torus2, Torus3};

/// Largest qubit count for exhaustive min-weight correction tables.
pub const EXHAUSTIVE_QUBIT_CAP: usize = 10;
/// Largest metacheck rank for exhaustive repair tables.
pub const REPAIR_RANK_CAP: usize = 12;
/// Largest syndrome space that [`StabilizerCode::correction_table`] will enumerate.
pub const SYNDROME_SPACE_CAP: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeFamily {
    Repetition,
    Toric2d,
    Toric3dZ,
}

impl CodeFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            CodeFamily::Repetition => "repetition",
            CodeFamily::Toric2d => "toric2d",
            CodeFamily::Toric3dZ => "toric3d_z",
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repetition" | "rep" => Ok(CodeFamily::Repetition),
            "toric2d" => Ok(CodeFamily::Toric2d),
            "toric3d_z" => Ok(CodeFamily::Toric3dZ),
            other => Err(Error::Config(format!("unknown code family {other:?}"))),
        }
    }
}

/// A family plus its size parameter (`n` for repetition, `L` for lattices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeId {
    pub family: CodeFamily,
    pub size: usize,
}

impl CodeId {
    pub fn new(family: CodeFamily, size: usize) -> Self {
        CodeId { family, size }
    }

    pub fn build(&self) -> Result<StabilizerCode> {
        StabilizerCode::build(*self)
    }
}

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.size)
    }
}

#[derive(Clone, Debug)]
enum Decoder {
    Table(BTreeMap<BitVec, PauliOp>),
    Toric2d(Torus2),
    Toric3dZ(Box<Toric3dDecoder>),
}

#[derive(Clone, Debug)]
enum Repair {
    Zero,
    Table(HashMap<BitVec, BitVec>),
    Toric3dZ(Torus3),
}

/// Raw ingredients of a code. `measured_ops` defaults to the checks, `S` to
/// the identity, `M` to no rows.
#[derive(Clone, Debug, Default)]
pub struct CodeParts {
    pub n: usize,
    pub checks: Vec<PauliOp>,
    pub gauge_gens: Vec<PauliOp>,
    pub logical_reps: Vec<(PauliOp, PauliOp)>,
    pub measured_ops: Option<Vec<PauliOp>>,
    pub outcome_to_syndrome: Option<F2Matrix>,
    pub metachecks: Option<F2Matrix>,
}

/// An immutable stabilizer (or subsystem) code with its decoding data.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    id: Option<CodeId>,
    n: usize,
    checks: Vec<PauliOp>,
    gauge_gens: Vec<PauliOp>,
    logical_reps: Vec<(PauliOp, PauliOp)>,
    measured_ops: Vec<PauliOp>,
    outcome_to_syndrome: F2Matrix,
    metachecks: F2Matrix,
    gauge: SpanBasis,
    reach: F2Solver,
    decoder: Decoder,
    repair: Repair,
}

impl StabilizerCode {
    pub fn build(id: CodeId) -> Result<Self> {
        let invalid = || Error::InvalidSize { family: id.family.to_string(), size: id.size };
        match id.family {
            CodeFamily::Repetition => {
                if id.size < 2 {
                    return Err(invalid());
                }
                families::repetition(id.size)
            }
            CodeFamily::Toric2d => {
                if id.size < 2 {
                    return Err(invalid());
                }
                Ok(families::toric2d(id.size))
            }
            CodeFamily::Toric3dZ => {
                if id.size < 2 {
                    return Err(invalid());
                }
                Ok(families::toric3d_z(id.size))
            }
        }
    }

    pub fn repetition(n: usize) -> Result<Self> {
        Self::build(CodeId::new(CodeFamily::Repetition, n))
    }

    pub fn toric2d(l: usize) -> Result<Self> {
        Self::build(CodeId::new(CodeFamily::Toric2d, l))
    }

    pub fn toric3d_z(l: usize) -> Result<Self> {
        Self::build(CodeId::new(CodeFamily::Toric3dZ, l))
    }

    /// A code from explicit generators, with exhaustive correction and repair tables.
    pub fn custom(parts: CodeParts) -> Result<Self> {
        let n = parts.n;
        if n > EXHAUSTIVE_QUBIT_CAP {
            return Err(Error::Capacity {
                what: "qubits for an exhaustive table".into(),
                got: n,
                cap: EXHAUSTIVE_QUBIT_CAP,
            });
        }
        let mut code = Self::assemble(None, parts, Decoder::Table(BTreeMap::new()), Repair::Zero)?;
        code.decoder = Decoder::Table(code.exhaustive_table());
        code.repair = code.exhaustive_repair()?;
        code.validate()?;
        Ok(code)
    }

    fn assemble(id: Option<CodeId>, parts: CodeParts, decoder: Decoder, repair: Repair) -> Result<Self> {
        let n = parts.n;
        let all = parts
            .checks
            .iter()
            .chain(&parts.gauge_gens)
            .chain(parts.logical_reps.iter().flat_map(|(a, b)| [a, b]))
            .chain(parts.measured_ops.iter().flatten());
        for p in all {
            check_dim(n, p.n())?;
        }
        let measured_ops = parts.measured_ops.unwrap_or_else(|| parts.checks.clone());
        let s = parts.outcome_to_syndrome.unwrap_or_else(|| F2Matrix::identity(measured_ops.len()));
        let m = parts.metachecks.unwrap_or_else(|| F2Matrix::empty(measured_ops.len()));
        check_dim(measured_ops.len(), s.cols())?;
        check_dim(parts.checks.len(), s.num_rows())?;
        check_dim(measured_ops.len(), m.cols())?;
        let gauge_rows: Vec<BitVec> = parts.gauge_gens.iter().map(|g| g.to_symplectic()).collect();
        let gauge = SpanBasis::new(2 * n, &gauge_rows);
        // rows (z|x) so that row·(e.x|e.z) is the commutation bit
        let hs_rows: Vec<BitVec> = parts.checks.iter().map(|c| c.z_mask().concat(c.x_mask())).collect();
        let reach = F2Solver::new(&F2Matrix::new(2 * n, hs_rows)?);
        Ok(StabilizerCode {
            id,
            n,
            checks: parts.checks,
            gauge_gens: parts.gauge_gens,
            logical_reps: parts.logical_reps,
            measured_ops,
            outcome_to_syndrome: s,
            metachecks: m,
            gauge,
            reach,
            decoder,
            repair,
        })
    }

    /// Checks the structural invariants: commuting checks, checks inside the
    /// gauge group, logicals commuting with checks and outside the gauge group,
    /// and `S`, `M` consistent with the measured operators.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.checks.iter().enumerate() {
            for b in &self.checks[i + 1..] {
                if a.anticommutes(b) {
                    return Err(Error::InvalidCode(format!("checks {a} and {b} anticommute")));
                }
            }
            if !self.is_gauge(a) {
                return Err(Error::InvalidCode(format!("check {a} is not in the gauge group")));
            }
        }
        for (lx, lz) in &self.logical_reps {
            for l in [lx, lz] {
                if self.checks.iter().any(|c| c.anticommutes(l)) {
                    return Err(Error::InvalidCode(format!("logical {l} does not commute with the checks")));
                }
                if self.is_gauge(l) {
                    return Err(Error::InvalidCode(format!("logical {l} lies in the gauge group")));
                }
            }
        }
        for q in 0..self.n {
            for e in [PauliOp::x_on(self.n, [q]), PauliOp::z_on(self.n, [q])] {
                let x = self.valid_outcome_unchecked(&e);
                if !self.metachecks.apply(&x).is_zero() {
                    return Err(Error::InvalidCode(format!("metachecks reject the noiseless outcome of {e}")));
                }
                if self.outcome_to_syndrome.apply(&x) != self.syndrome_unchecked(&e) {
                    return Err(Error::InvalidCode(format!("S does not map the outcome of {e} to its syndrome")));
                }
            }
        }
        Ok(())
    }

    pub fn id(&self) -> Option<CodeId> {
        self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn checks(&self) -> &[PauliOp] {
        &self.checks
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn gauge_gens(&self) -> &[PauliOp] {
        &self.gauge_gens
    }

    pub fn logical_reps(&self) -> &[(PauliOp, PauliOp)] {
        &self.logical_reps
    }

    pub fn measured_ops(&self) -> &[PauliOp] {
        &self.measured_ops
    }

    pub fn num_outcomes(&self) -> usize {
        self.measured_ops.len()
    }

    pub fn outcome_to_syndrome(&self) -> &F2Matrix {
        &self.outcome_to_syndrome
    }

    pub fn metachecks(&self) -> &F2Matrix {
        &self.metachecks
    }

    /// Number of encoded qubits: `n − rank(gauge)/2 − (gauge qubits)` is not
    /// tracked directly, so this reports the logical pairs supplied.
    pub fn num_logical(&self) -> usize {
        self.logical_reps.len()
    }

    pub fn check_rank(&self) -> usize {
        let rows: Vec<BitVec> = self.checks.iter().map(|c| c.to_symplectic()).collect();
        SpanBasis::new(2 * self.n, &rows).rank()
    }

    pub fn syndrome(&self, e: &PauliOp) -> Result<BitVec> {
        check_dim(self.n, e.n())?;
        Ok(self.syndrome_unchecked(e))
    }

    pub(crate) fn syndrome_unchecked(&self, e: &PauliOp) -> BitVec {
        BitVec::from_indices(
            self.checks.len(),
            self.checks.iter().enumerate().filter(|(_, c)| c.anticommutes(e)).map(|(i, _)| i),
        )
    }

    /// Noiseless outcome vector: bit `j` is set iff `e` anticommutes with measured operator `j`.
    pub fn valid_outcome(&self, e: &PauliOp) -> Result<BitVec> {
        check_dim(self.n, e.n())?;
        Ok(self.valid_outcome_unchecked(e))
    }

    pub(crate) fn valid_outcome_unchecked(&self, e: &PauliOp) -> BitVec {
        BitVec::from_indices(
            self.measured_ops.len(),
            self.measured_ops.iter().enumerate().filter(|(_, c)| c.anticommutes(e)).map(|(i, _)| i),
        )
    }

    /// `M·x`.
    pub fn metasyndrome(&self, x: &BitVec) -> Result<BitVec> {
        self.metachecks.mul_vec(x)
    }

    /// Whether some Pauli operation has syndrome `sigma`.
    pub fn is_valid_syndrome(&self, sigma: &BitVec) -> bool {
        sigma.len() == self.checks.len() && self.reach.is_solvable(sigma)
    }

    /// `ω_σ`.
    pub fn correction(&self, sigma: &BitVec) -> Result<PauliOp> {
        check_dim(self.checks.len(), sigma.len())?;
        match &self.decoder {
            Decoder::Table(t) => t.get(sigma).cloned().ok_or_else(|| Error::MissingEntry(sigma.to_string())),
            Decoder::Toric2d(t) => t.decode(sigma),
            Decoder::Toric3dZ(d) => d.decode(sigma),
        }
    }

    /// `synd(e) = ω_{σ(e)}`.
    pub fn synd(&self, e: &PauliOp) -> Result<PauliOp> {
        self.correction(&self.syndrome(e)?)
    }

    /// Whether `e` lies in the gauge group (X and Z masks jointly).
    pub fn is_gauge(&self, e: &PauliOp) -> bool {
        e.n() == self.n && self.gauge.contains(&e.to_symplectic())
    }

    /// Canonical representative of the gauge coset of `e`, as a symplectic vector.
    pub fn gauge_class(&self, e: &PauliOp) -> BitVec {
        self.gauge.reduce(&e.to_symplectic())
    }

    pub fn gauge_rank(&self) -> usize {
        self.gauge.rank()
    }

    /// `ω_{σ(e)}·e` is in the gauge group.
    pub fn is_correctable(&self, e: &PauliOp) -> Result<bool> {
        let c = self.synd(e)?;
        Ok(self.is_gauge(&(&c * e)))
    }

    /// `r(x) = S·(x + ρ(M·x))`.
    pub fn syndrome_repair(&self, x: &BitVec) -> Result<BitVec> {
        check_dim(self.measured_ops.len(), x.len())?;
        Ok(self.syndrome_repair_unchecked(x))
    }

    pub(crate) fn syndrome_repair_unchecked(&self, x: &BitVec) -> BitVec {
        match &self.repair {
            Repair::Zero => self.outcome_to_syndrome.apply(x),
            _ => {
                let rho = self.repair_vector(&self.metachecks.apply(x));
                self.outcome_to_syndrome.apply(&x.xor(&rho))
            }
        }
    }

    /// `ρ(m)`: the outcome-space repair chosen for metasyndrome `m`.
    pub fn repair_vector(&self, m: &BitVec) -> BitVec {
        match &self.repair {
            Repair::Zero => BitVec::zeros(self.measured_ops.len()),
            Repair::Table(t) => t.get(m).cloned().unwrap_or_else(|| BitVec::zeros(self.measured_ops.len())),
            Repair::Toric3dZ(t) => t.repair(m),
        }
    }

    /// Basis of the space of reachable syndromes.
    pub fn syndrome_basis(&self) -> Vec<BitVec> {
        let cols: Vec<BitVec> = (0..self.n)
            .flat_map(|q| [PauliOp::x_on(self.n, [q]), PauliOp::z_on(self.n, [q])])
            .map(|e| self.syndrome_unchecked(&e))
            .collect();
        SpanBasis::new(self.checks.len(), &cols).basis().to_vec()
    }

    /// Every reachable syndrome, in a fixed order.
    pub fn valid_syndromes(&self) -> Result<Vec<BitVec>> {
        let basis = self.syndrome_basis();
        if basis.len() > 16 {
            return Err(Error::Capacity {
                what: "syndrome space".into(),
                got: 1 << basis.len().min(62),
                cap: SYNDROME_SPACE_CAP,
            });
        }
        let mut out = Vec::with_capacity(1 << basis.len());
        for mask in 0u64..(1 << basis.len()) {
            let mut s = BitVec::zeros(self.checks.len());
            for (k, b) in basis.iter().enumerate() {
                if (mask >> k) & 1 == 1 {
                    s.xor_assign(b);
                }
            }
            out.push(s);
        }
        out.sort();
        Ok(out)
    }

    /// `σ ↦ ω_σ` for every reachable syndrome.
    pub fn correction_table(&self) -> Result<BTreeMap<BitVec, PauliOp>> {
        if let Decoder::Table(t) = &self.decoder {
            return Ok(t.clone());
        }
        self.valid_syndromes()?.into_iter().map(|s| self.correction(&s).map(|c| (s, c))).collect()
    }

    /// Minimum-weight table over all `4^n` Pauli operations; ties go to the
    /// smallest `(x, z)` masks.
    fn exhaustive_table(&self) -> BTreeMap<BitVec, PauliOp> {
        let mut table: BTreeMap<BitVec, PauliOp> = BTreeMap::new();
        for idx in 0..(1u64 << (2 * self.n)) {
            let e = PauliOp::from_index(self.n, idx);
            let s = self.syndrome_unchecked(&e);
            match table.get(&s) {
                Some(cur) if cur.canonical_cmp(&e).is_le() => {}
                _ => {
                    table.insert(s, e);
                }
            }
        }
        table
    }

    /// Minimum-weight `ρ(m)` for every metasyndrome, found by enumerating
    /// outcome flips by increasing weight.
    fn exhaustive_repair(&self) -> Result<Repair> {
        let rank = self.metachecks.rank();
        if rank == 0 {
            return Ok(Repair::Zero);
        }
        if rank > REPAIR_RANK_CAP {
            return Err(Error::Capacity {
                what: "metacheck rank for an exhaustive repair table".into(),
                got: rank,
                cap: REPAIR_RANK_CAP,
            });
        }
        let k = self.measured_ops.len();
        let target = 1usize << rank;
        let mut table: HashMap<BitVec, BitVec> = HashMap::new();
        table.insert(BitVec::zeros(self.metachecks.num_rows()), BitVec::zeros(k));
        for w in 1..=k {
            let mut found: HashMap<BitVec, BitVec> = HashMap::new();
            for_each_combination(k, w, |idx| {
                let y = BitVec::from_indices(k, idx.iter().copied());
                let m = self.metachecks.apply(&y);
                if table.contains_key(&m) {
                    return;
                }
                match found.get(&m) {
                    Some(cur) if *cur <= y => {}
                    _ => {
                        found.insert(m, y);
                    }
                }
            });
            table.extend(found);
            if table.len() == target {
                break;
            }
        }
        Ok(Repair::Table(table))
    }

    pub fn describe(&self) -> CodeDescription {
        let rows = |m: &F2Matrix| m.rows().iter().map(|r| r.to_bools().into_iter().map(u8::from).collect()).collect();
        CodeDescription {
            family: self.id.map(|i| i.family),
            size: self.id.map(|i| i.size),
            n: self.n,
            checks: self.checks.iter().map(|p| p.to_string()).collect(),
            gauge_gens: self.gauge_gens.iter().map(|p| p.to_string()).collect(),
            logical_reps: self.logical_reps.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
            measured_ops: self.measured_ops.iter().map(|p| p.to_string()).collect(),
            outcome_to_syndrome: rows(&self.outcome_to_syndrome),
            metachecks: rows(&self.metachecks),
        }
    }

    /// Rebuilds a code from its exported description. Family codes are rebuilt
    /// from their id; anything else goes through [`StabilizerCode::custom`].
    pub fn from_description(d: &CodeDescription) -> Result<Self> {
        if let (Some(family), Some(size)) = (d.family, d.size) {
            return Self::build(CodeId::new(family, size));
        }
        let parse = |v: &[String]| v.iter().map(|s| s.parse::<PauliOp>()).collect::<Result<Vec<_>>>();
        let checks = parse(&d.checks)?;
        let measured = parse(&d.measured_ops)?;
        let to_matrix = |rows: &[Vec<u8>]| {
            let bits: Vec<BitVec> =
                rows.iter().map(|r| BitVec::from_bools(&r.iter().map(|&b| b != 0).collect::<Vec<_>>())).collect();
            F2Matrix::new(measured.len(), bits)
        };
        let logical_reps = d
            .logical_reps
            .iter()
            .map(|[a, b]| Ok((a.parse::<PauliOp>()?, b.parse::<PauliOp>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::custom(CodeParts {
            n: d.n,
            gauge_gens: parse(&d.gauge_gens)?,
            logical_reps,
            outcome_to_syndrome: Some(to_matrix(&d.outcome_to_syndrome)?),
            metachecks: Some(to_matrix(&d.metachecks)?),
            measured_ops: Some(measured),
            checks,
        })
    }
}

/// Calls `f` on every `w`-subset of `0..k` in lexicographic order.
pub(crate) fn for_each_combination(k: usize, w: usize, mut f: impl FnMut(&[usize])) {
    if w > k {
        return;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        f(&idx);
        let mut i = w;
        while i > 0 && idx[i - 1] == k - w + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// JSON form of a code: generators in the Pauli text format, `S` and `M` as 0/1 rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeDescription {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<CodeFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    pub n: usize,
    pub checks: Vec<String>,
    pub gauge_gens: Vec<String>,
    pub logical_reps: Vec<[String; 2]>,
    pub measured_ops: Vec<String>,
    pub outcome_to_syndrome: Vec<Vec<u8>>,
    pub metachecks: Vec<Vec<u8>>,
}
