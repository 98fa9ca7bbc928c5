//! Small dense linear programs: two-phase simplex with Bland's rule.
//!
//! Used to cross-check constructive witnesses (nearest class member) and to
//! evaluate worst-case quantities over tiny classes exactly.

use crate::error::{Error, Result};
use crate::pauli_algebra::BitVec;
use crate::stochastic::{superset_sums, StochasticChannel};

const EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `maximize c·x` subject to the rows and `x ≥ 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, rows: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        assert_eq!(coeffs.len(), self.n_vars());
        self.rows.push((coeffs, sense, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    m: usize,
    cols: usize,
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    artificial: Vec<bool>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.n_vars();
        let m = lp.rows.len();
        let mut rows: Vec<(Vec<f64>, Sense, f64)> = lp.rows.clone();
        for (c, s, b) in rows.iter_mut() {
            if *b < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
                *b = -*b;
                *s = match s {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
        }
        let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
        let cols = n + n_slack + n_art;
        let mut a = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0; m];
        let mut artificial = vec![false; cols];
        let (mut s, mut t) = (n, n + n_slack);
        for (i, (c, sense, b)) in rows.iter().enumerate() {
            a[i][..n].copy_from_slice(c);
            a[i][cols] = *b;
            match sense {
                Sense::Le => {
                    a[i][s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Sense::Ge => {
                    a[i][s] = -1.0;
                    s += 1;
                    a[i][t] = 1.0;
                    artificial[t] = true;
                    basis[i] = t;
                    t += 1;
                }
                Sense::Eq => {
                    a[i][t] = 1.0;
                    artificial[t] = true;
                    basis[i] = t;
                    t += 1;
                }
            }
        }
        Tableau { m, cols, a, basis, artificial }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= pv;
        }
        let prow = self.a[r].clone();
        for i in 0..self.m {
            if i != r {
                let f = self.a[i][c];
                if f.abs() > 0.0 {
                    for (v, p) in self.a[i].iter_mut().zip(&prow) {
                        *v -= f * p;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost·x` over the current feasible basis; `allowed` masks entering columns.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        loop {
            // reduced costs: c_j − c_B·A_j
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j];
                for i in 0..self.m {
                    rc -= cost[self.basis[i]] * self.a[i][j];
                }
                if rc > EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if self.a[i][c] > EPS {
                    let ratio = self.a[i][self.cols] / self.a[i][c];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => ratio < lr - EPS || (ratio <= lr + EPS && self.basis[i] < self.basis[li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let n = lp.n_vars();
        let all = vec![true; self.cols];
        if self.artificial.iter().any(|&x| x) {
            let cost: Vec<f64> = self.artificial.iter().map(|&x| if x { -1.0 } else { 0.0 }).collect();
            self.optimize(&cost, &all);
            let infeas: f64 =
                (0..self.m).filter(|&i| self.artificial[self.basis[i]]).map(|i| self.a[i][self.cols]).sum();
            if infeas > 1e-7 {
                return LpOutcome::Infeasible;
            }
            // drive remaining (zero-level) artificials out of the basis
            for i in 0..self.m {
                if self.artificial[self.basis[i]] {
                    if let Some(j) = (0..self.cols).find(|&j| !self.artificial[j] && self.a[i][j].abs() > EPS) {
                        self.pivot(i, j);
                    }
                }
            }
        }
        let allowed: Vec<bool> = self.artificial.iter().map(|&x| !x).collect();
        let mut cost = vec![0.0; self.cols];
        cost[..n].copy_from_slice(&lp.objective);
        if !self.optimize(&cost, &allowed) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; n];
        for i in 0..self.m {
            if self.basis[i] < n {
                x[self.basis[i]] = self.a[i][self.cols];
            }
        }
        let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { value, x }
    }
}

/// Largest channel support handled by [`min_distance_to_lambda`].
pub const MIN_DISTANCE_SUPPORT_CAP: usize = 32;

/// Exact `min_{C ∈ Λ_λ} d(ch, C)` over channels supported on the operations of `ch`
/// plus the identity (moving mass elsewhere never helps).
pub fn min_distance_to_lambda(ch: &StochasticChannel<f64>, lambda: f64) -> Result<f64> {
    let merged = ch.merge_identical();
    let mut ops: Vec<_> = merged.entries().to_vec();
    if !ops.iter().any(|(_, e)| e.is_identity()) {
        ops.push((0.0, crate::pauli_algebra::PauliOp::identity(ch.n())));
    }
    let m = ops.len();
    if m > MIN_DISTANCE_SUPPORT_CAP {
        return Err(Error::Capacity {
            what: "channel support for the distance LP".into(),
            got: m,
            cap: MIN_DISTANCE_SUPPORT_CAP,
        });
    }
    // variables: q_0..q_{m-1}, t_0..t_{m-1}; maximize −½Σt
    let mut obj = vec![0.0; 2 * m];
    obj[m..].iter_mut().for_each(|v| *v = -0.5);
    let mut lp = LinearProgram::new(obj);
    let mut norm = vec![0.0; 2 * m];
    norm[..m].iter_mut().for_each(|v| *v = 1.0);
    lp.add(norm, Sense::Eq, 1.0);
    for (i, (p, _)) in ops.iter().enumerate() {
        let mut a = vec![0.0; 2 * m];
        a[i] = 1.0;
        a[m + i] = -1.0;
        lp.add(a.clone(), Sense::Le, *p);
        a[i] = -1.0;
        lp.add(a, Sense::Le, -*p);
    }
    let supports: Vec<(f64, BitVec)> = ops.iter().map(|(_, e)| (1.0, e.support())).collect();
    for r in superset_sums(&supports)?.keys() {
        let mut a = vec![0.0; 2 * m];
        for (i, (_, e)) in ops.iter().enumerate() {
            if r.is_subset_of(&e.support()) {
                a[i] = 1.0;
            }
        }
        lp.add(a, Sense::Le, lambda.powi(r.count_ones() as i32));
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(-value),
        other => Err(Error::Domain(format!("distance LP ended {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli_algebra::PauliOp;

    fn opt(lp: &LinearProgram) -> (f64, Vec<f64>) {
        match lp.solve() {
            LpOutcome::Optimal { value, x } => (value, x),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.add(vec![1.0, 0.0], Sense::Le, 4.0);
        lp.add(vec![0.0, 2.0], Sense::Le, 12.0);
        lp.add(vec![3.0, 2.0], Sense::Le, 18.0);
        let (v, x) = opt(&lp);
        assert!((v - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max x − y, x + y = 1, y ≥ 0.25
        let mut lp = LinearProgram::new(vec![1.0, -1.0]);
        lp.add(vec![1.0, 1.0], Sense::Eq, 1.0);
        lp.add(vec![0.0, 1.0], Sense::Ge, 0.25);
        let (v, _) = opt(&lp);
        assert!((v - 0.5).abs() < 1e-9);
        let mut bad = LinearProgram::new(vec![1.0]);
        bad.add(vec![1.0], Sense::Ge, 2.0);
        bad.add(vec![1.0], Sense::Le, 1.0);
        assert_eq!(bad.solve(), LpOutcome::Infeasible);
        let unb = LinearProgram::new(vec![1.0]);
        assert_eq!(unb.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn distance_to_lambda() {
        let p = |s: &str| s.parse::<PauliOp>().unwrap();
        let member = StochasticChannel::new(2, vec![(0.9, p("II")), (0.1, p("XI"))]).unwrap();
        assert!(min_distance_to_lambda(&member, 0.1).unwrap().abs() < 1e-9);
        // pair mass 0.2 must drop to 0.01
        let far = StochasticChannel::new(2, vec![(0.8, p("II")), (0.2, p("XX"))]).unwrap();
        assert!((min_distance_to_lambda(&far, 0.1).unwrap() - 0.19).abs() < 1e-9);
    }
}
