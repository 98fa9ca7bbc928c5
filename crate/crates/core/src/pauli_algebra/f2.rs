use super::BitVec;
use crate::error::{check_dim, Result};

/// Dense matrix over F2 stored as packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl F2Matrix {
    pub fn new(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            check_dim(cols, r.len())?;
        }
        Ok(F2Matrix { cols, rows })
    }

    pub fn empty(cols: usize) -> Self {
        F2Matrix { cols, rows: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix { cols: n, rows: (0..n).map(|i| BitVec::from_indices(n, [i])).collect() }
    }

    pub fn from_rows_of_indices(cols: usize, rows: &[Vec<usize>]) -> Self {
        F2Matrix { cols, rows: rows.iter().map(|r| BitVec::from_indices(cols, r.iter().copied())).collect() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// `M·v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        check_dim(self.cols, v.len())?;
        Ok(self.apply(v))
    }

    /// `M·v` without the dimension check. Panics on mismatch.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        BitVec::from_indices(self.rows.len(), self.rows.iter().enumerate().filter(|(_, r)| r.dot(v)).map(|(i, _)| i))
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut cols = vec![BitVec::zeros(self.rows.len()); self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                cols[j].set(i, true);
            }
        }
        F2Matrix { cols: self.rows.len(), rows: cols }
    }

    pub fn rank(&self) -> usize {
        SpanBasis::new(self.cols, &self.rows).rank()
    }

    /// Whether `v` is an F2 combination of the rows.
    pub fn in_span(&self, v: &BitVec) -> Result<bool> {
        check_dim(self.cols, v.len())?;
        Ok(SpanBasis::new(self.cols, &self.rows).contains(v))
    }

    /// Basis of the right kernel `{v : M·v = 0}`.
    pub fn kernel(&self) -> Vec<BitVec> {
        let t = SpanBasis::new(self.rows.len(), &self.transpose().rows);
        t.dependencies()
    }
}

/// Reduced row-echelon basis of a span, with the combination of input rows
/// that produced each basis vector.
///
/// Pivots are chosen as the lowest set column of each reduced row, processing
/// inputs in order, so every result is reproducible.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    cols: usize,
    inputs: usize,
    basis: Vec<BitVec>,
    combos: Vec<BitVec>,
    pivots: Vec<usize>,
    dependencies: Vec<BitVec>,
}

impl SpanBasis {
    pub fn new(cols: usize, rows: &[BitVec]) -> Self {
        let inputs = rows.len();
        let mut sb = SpanBasis {
            cols,
            inputs,
            basis: Vec::new(),
            combos: Vec::new(),
            pivots: Vec::new(),
            dependencies: Vec::new(),
        };
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            let mut v = r.clone();
            let mut c = BitVec::from_indices(inputs, [i]);
            for (k, &p) in sb.pivots.iter().enumerate() {
                if v.get(p) {
                    v.xor_assign(&sb.basis[k]);
                    c.xor_assign(&sb.combos[k]);
                }
            }
            match v.first_one() {
                None => sb.dependencies.push(c),
                Some(p) => {
                    // keep the basis fully reduced on pivot columns
                    for k in 0..sb.basis.len() {
                        if sb.basis[k].get(p) {
                            let (bv, bc) = (v.clone(), c.clone());
                            sb.basis[k].xor_assign(&bv);
                            sb.combos[k].xor_assign(&bc);
                        }
                    }
                    sb.basis.push(v);
                    sb.combos.push(c);
                    sb.pivots.push(p);
                }
            }
        }
        sb
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The reduced basis vectors, in pivot-discovery order.
    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    /// Canonical representative of `v` modulo the span: every pivot bit cleared.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        self.reduce_tracked(v).0
    }

    fn reduce_tracked(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut r = v.clone();
        let mut c = BitVec::zeros(self.inputs);
        for (k, &p) in self.pivots.iter().enumerate() {
            if r.get(p) {
                r.xor_assign(&self.basis[k]);
                c.xor_assign(&self.combos[k]);
            }
        }
        (r, c)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coefficients over the input rows whose sum is `v`, if `v` lies in the span.
    pub fn decompose(&self, v: &BitVec) -> Option<BitVec> {
        let (r, c) = self.reduce_tracked(v);
        r.is_zero().then_some(c)
    }

    /// Input-row combinations summing to zero (one per dependent row).
    pub fn dependencies(&self) -> Vec<BitVec> {
        self.dependencies.clone()
    }
}

/// Solver for `H·e = s` over F2.
#[derive(Clone, Debug)]
pub struct F2Solver {
    columns: SpanBasis,
}

impl F2Solver {
    pub fn new(h: &F2Matrix) -> Self {
        let t = h.transpose();
        F2Solver { columns: SpanBasis::new(h.num_rows(), t.rows()) }
    }

    /// Some `e` with `H·e = s`, or `None` when `s` is outside the column space.
    pub fn solve(&self, s: &BitVec) -> Option<BitVec> {
        self.columns.decompose(s)
    }

    pub fn is_solvable(&self, s: &BitVec) -> bool {
        self.columns.contains(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitVec {
        BitVec::parse(s).unwrap()
    }

    #[test]
    fn in_span_examples() {
        let m = F2Matrix::new(3, vec![b("110"), b("011")]).unwrap();
        assert!(m.in_span(&b("101")).unwrap());
        let m1 = F2Matrix::new(3, vec![b("110")]).unwrap();
        assert!(!m1.in_span(&b("001")).unwrap());
        assert!(F2Matrix::empty(3).in_span(&b("000")).unwrap());
        assert!(m.in_span(&b("10")).is_err());
    }

    #[test]
    fn rank_and_kernel() {
        let m = F2Matrix::new(3, vec![b("110"), b("011"), b("101")]).unwrap();
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_zero());
        assert_eq!(k[0], b("111"));
    }

    #[test]
    fn solver_finds_preimage() {
        let h = F2Matrix::new(3, vec![b("110"), b("011")]).unwrap();
        let solver = F2Solver::new(&h);
        for s in ["00", "10", "01", "11"] {
            let s = b(s);
            let e = solver.solve(&s).unwrap();
            assert_eq!(h.apply(&e), s);
        }
        let h2 = F2Matrix::new(2, vec![b("11"), b("11")]).unwrap();
        assert!(F2Solver::new(&h2).solve(&b("10")).is_none());
    }

    #[test]
    fn reduce_is_canonical_on_cosets() {
        let rows = vec![b("1100"), b("0110")];
        let sb = SpanBasis::new(4, &rows);
        let v = b("1001");
        assert_eq!(sb.reduce(&v), sb.reduce(&v.xor(&rows[0])));
        assert_eq!(sb.reduce(&v), sb.reduce(&v.xor(&rows[0]).xor(&rows[1])));
        assert_ne!(sb.reduce(&v), sb.reduce(&b("0001")));
    }
}
