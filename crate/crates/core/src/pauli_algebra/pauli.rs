use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::BitVec;
use crate::error::{check_dim, Error, Result};

/// An n-qubit Pauli operation `ρ ↦ eρe†` in binary symplectic form.
///
/// Phases are dropped: as channels, `e` and `i·e` are the same operation, so
/// multiplication is plain XOR of the masks and every element is an involution.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    x: BitVec,
    z: BitVec,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        PauliOp { x: BitVec::zeros(n), z: BitVec::zeros(n) }
    }

    pub fn from_masks(x: BitVec, z: BitVec) -> Result<Self> {
        check_dim(x.len(), z.len())?;
        Ok(PauliOp { x, z })
    }

    /// X on each listed qubit.
    pub fn x_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        PauliOp { x: BitVec::from_indices(n, qubits), z: BitVec::zeros(n) }
    }

    /// Z on each listed qubit.
    pub fn z_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        PauliOp { x: BitVec::zeros(n), z: BitVec::from_indices(n, qubits) }
    }

    /// Unpacks a dense index in `[0, 4^n)`: low `n` bits are the X mask, next `n` the Z mask.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(2 * n <= 64);
        let low = if n == 0 { 0 } else { (1u64 << n) - 1 };
        PauliOp { x: BitVec::from_u64(n, index & low), z: BitVec::from_u64(n, (index >> n) & low) }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_mask(&self) -> &BitVec {
        &self.x
    }

    pub fn z_mask(&self) -> &BitVec {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn try_mul(&self, other: &PauliOp) -> Result<PauliOp> {
        check_dim(self.n(), other.n())?;
        Ok(self * other)
    }

    pub fn mul_assign(&mut self, other: &PauliOp) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// `true` when the two operators commute.
    pub fn commutes(&self, other: &PauliOp) -> Result<bool> {
        check_dim(self.n(), other.n())?;
        Ok(!self.anticommutes(other))
    }

    /// Symplectic form `⟨a.x, b.z⟩ + ⟨a.z, b.x⟩ (mod 2)`. Panics on size mismatch.
    #[inline]
    pub fn anticommutes(&self, other: &PauliOp) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    pub fn support(&self) -> BitVec {
        self.x.or(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    /// `x ‖ z` as one vector of length `2n`.
    pub fn to_symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic(v: &BitVec) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension { expected: v.len() + 1, got: v.len() });
        }
        let n = v.len() / 2;
        Ok(PauliOp { x: v.slice(0, n), z: v.slice(n, n) })
    }

    /// Total order used for deterministic tie-breaks: weight, then X mask, then Z mask.
    pub fn canonical_cmp(&self, other: &PauliOp) -> Ordering {
        self.weight().cmp(&other.weight()).then_with(|| self.x.cmp(&other.x)).then_with(|| self.z.cmp(&other.z))
    }
}

impl std::ops::Mul<&PauliOp> for &PauliOp {
    type Output = PauliOp;

    fn mul(self, rhs: &PauliOp) -> PauliOp {
        assert_eq!(self.n(), rhs.n(), "Pauli size mismatch");
        PauliOp { x: self.x.xor(&rhs.x), z: self.z.xor(&rhs.z) }
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            let c = match (self.x.get(i), self.z.get(i)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        let n = chars.len();
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (i, c) in chars.into_iter().enumerate() {
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x.set(i, true),
                'Z' => z.set(i, true),
                'Y' => {
                    x.set(i, true);
                    z.set(i, true);
                }
                other => return Err(Error::PauliParse(other)),
            }
        }
        Ok(PauliOp { x, z })
    }
}

impl serde::Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn multiplication_examples() {
        assert!((&p("XII") * &p("XII")).is_identity());
        let xz = &p("XII") * &p("ZII");
        assert_eq!(xz.x_mask().iter_ones().collect::<Vec<_>>(), vec![0]);
        assert_eq!(xz.z_mask().iter_ones().collect::<Vec<_>>(), vec![0]);
        assert_eq!(&p("XZI") * &p("IZX"), p("XIX"));
        assert!(matches!(p("XI").try_mul(&p("XII")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XI").commutes(&p("IZ")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
        assert!(p("X").commutes(&p("ZZ")).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(p("III").weight(), 0);
        assert_eq!(p("XIZ").support().iter_ones().collect::<Vec<_>>(), vec![0, 2]);
        let prod = &p("XII") * &p("XXI");
        assert_eq!(prod.support().iter_ones().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn text_format_round_trip() {
        for s in ["IXYZ", "YYY", ""] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliOp>().is_err());
        assert_eq!(PauliOp::from_symplectic(&p("XYZ").to_symplectic()).unwrap(), p("XYZ"));
    }

    #[test]
    fn group_laws_exhaustive_small() {
        for n in 1..=2 {
            let all: Vec<PauliOp> = (0..(1u64 << (2 * n))).map(|i| PauliOp::from_index(n, i)).collect();
            for a in &all {
                assert!((a * a).is_identity());
                for b in &all {
                    assert_eq!(a * b, b * a);
                    for c in &all {
                        assert_eq!(&(a * b) * c, a * &(b * c));
                        assert_eq!((a * b).anticommutes(c), a.anticommutes(c) ^ b.anticommutes(c));
                    }
                }
            }
        }
    }
}
