//! Binary-symplectic Pauli operations and the F2 linear algebra underneath
//! syndromes, gauge membership and decoding.

mod bitvec;
mod f2;
mod pauli;

pub use bitvec::BitVec;
pub use f2::{F2Matrix, F2Solver, SpanBasis};
pub use pauli::PauliOp;
