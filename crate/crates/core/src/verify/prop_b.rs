//! Failing syndrome pairs, the cover `(B, m)`, and the bound
//! `fail(N^exc_τ ⋄ N^exc_τ') ≤ |B| (2 max(τ,τ')^{1/2})^m`.

use std::collections::{BTreeSet, VecDeque};

use num_rational::BigRational;

use super::exact::OracleCode;
use super::instances::q;
use super::repair::describe;
use super::{OracleReport, Relation};
use crate::bounds::prop_b_bound;
use crate::code::{for_each_combination, StabilizerCode};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Sense};
use crate::pauli_algebra::BitVec;
use crate::prob::Probability;

/// Largest syndrome space enumerated.
pub const PROP_B_SYNDROME_CAP: usize = 1 << 12;
/// Largest number of syndrome pairs handed to the LP supremum.
pub const PROP_B_LP_PAIR_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub struct PropB {
    pub failing_pairs: Vec<(BitVec, BitVec)>,
    /// Smallest `|σ ∪ σ'|` over failing pairs; 0 when there are none.
    pub m: usize,
    pub b: Vec<BitVec>,
    pub bound: f64,
    /// Maximum failure over couplings of the greedy extremal members.
    pub extremal: BigRational,
    /// Supremum over the whole class, by linear programming, when small enough.
    pub supremum: Option<f64>,
    pub report: OracleReport,
}

/// Greedy extremal member of `N^exc_τ`: syndromes from high weight down, each
/// given the largest mass the tail constraints on its subsets still allow.
pub fn extremal_member(syndromes: &[BitVec], tau: &BigRational) -> Vec<(BigRational, BitVec)> {
    let mut order: Vec<&BitVec> = syndromes.iter().filter(|s| !s.is_zero()).collect();
    order.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then_with(|| a.cmp(b)));
    let mut out: Vec<(BigRational, BitVec)> = Vec::new();
    let mut total = q(0, 1);
    for s in order {
        let idx: Vec<usize> = s.iter_ones().collect();
        let mut room = q(1, 1) - total.clone();
        for mask in 1u32..(1 << idx.len()) {
            let mut r = BitVec::zeros(s.len());
            for (k, &i) in idx.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    r.set(i, true);
                }
            }
            let used: BigRational = out.iter().filter(|(_, t)| r.is_subset_of(t)).map(|(p, _)| p.clone()).sum();
            let slack = tau.pow_n(r.count_ones()) - used;
            if slack < room {
                room = slack;
            }
        }
        if room > q(0, 1) {
            total += room.clone();
            out.push((room, s.clone()));
        }
    }
    let zero = syndromes.iter().find(|s| s.is_zero()).cloned().unwrap_or_else(|| BitVec::zeros(0));
    out.push((q(1, 1) - total, zero));
    out
}

/// Maximum flow from `left` to `right` along the allowed edges: the largest
/// mass a coupling of the two distributions can put on those edges.
pub(crate) fn max_coupled_mass(left: &[BigRational], right: &[BigRational], edges: &[(usize, usize)]) -> BigRational {
    let (a, b) = (left.len(), right.len());
    let nodes = a + b + 2;
    let (src, snk) = (a + b, a + b + 1);
    // residual capacities; None stands for an uncapacitated coupling edge
    let mut cap: Vec<Vec<Option<BigRational>>> = vec![vec![Some(q(0, 1)); nodes]; nodes];
    for (i, p) in left.iter().enumerate() {
        cap[src][i] = Some(p.clone());
    }
    for (j, p) in right.iter().enumerate() {
        cap[a + j][snk] = Some(p.clone());
    }
    for &(i, j) in edges {
        cap[i][a + j] = None;
    }
    let positive = |c: &Option<BigRational>| c.as_ref().is_none_or(|v| *v > q(0, 1));
    let mut flow = q(0, 1);
    loop {
        let mut prev = vec![usize::MAX; nodes];
        prev[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in 0..nodes {
                if prev[v] == usize::MAX && positive(&cap[u][v]) {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[snk] == usize::MAX {
            return flow;
        }
        let mut push: Option<BigRational> = None;
        let mut v = snk;
        while v != src {
            let u = prev[v];
            if let Some(c) = &cap[u][v] {
                if push.as_ref().is_none_or(|p| c < p) {
                    push = Some(c.clone());
                }
            }
            v = u;
        }
        let push = push.expect("source and sink edges are capacitated");
        let mut v = snk;
        while v != src {
            let u = prev[v];
            if let Some(c) = &mut cap[u][v] {
                *c -= push.clone();
            }
            if let Some(c) = &mut cap[v][u] {
                *c += push.clone();
            }
            v = u;
        }
        flow += push;
    }
}

/// `sup fail` over joints whose marginals lie in `N^exc_τ` and `N^exc_τ'`.
fn lp_supremum(syndromes: &[BitVec], failing: &[(usize, usize)], tau: f64, tau_p: f64) -> Option<f64> {
    let k = syndromes.len();
    let mut lp = LinearProgram::new((0..k * k).map(|_| 0.0).collect());
    for &(i, j) in failing {
        lp.objective[i * k + j] = 1.0;
    }
    lp.add(vec![1.0; k * k], Sense::Eq, 1.0);
    let subsets: BTreeSet<BitVec> = syndromes.iter().flat_map(nonempty_subsets).collect();
    for r in &subsets {
        for (side, t) in [(0, tau), (1, tau_p)] {
            let mut row = vec![0.0; k * k];
            for (s, syn) in syndromes.iter().enumerate() {
                if r.is_subset_of(syn) {
                    for o in 0..k {
                        row[if side == 0 { s * k + o } else { o * k + s }] = 1.0;
                    }
                }
            }
            lp.add(row, Sense::Le, t.powi(r.count_ones() as i32));
        }
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

fn nonempty_subsets(s: &BitVec) -> Vec<BitVec> {
    let idx: Vec<usize> = s.iter_ones().collect();
    (1u32..(1 << idx.len()))
        .map(|mask| {
            let mut r = BitVec::zeros(s.len());
            for (k, &i) in idx.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    r.set(i, true);
                }
            }
            r
        })
        .collect()
}

/// Smallest set of `m`-subsets hitting every failing union, chosen greedily
/// and then pruned to an inclusion-minimal cover.
fn greedy_cover(unions: &BTreeSet<BitVec>, m: usize, checks: usize) -> Vec<BitVec> {
    let mut candidates: BTreeSet<BitVec> = BTreeSet::new();
    for u in unions {
        let idx: Vec<usize> = u.iter_ones().collect();
        for_each_combination(idx.len(), m, |c| {
            candidates.insert(BitVec::from_indices(checks, c.iter().map(|&k| idx[k])));
        });
    }
    let mut uncovered: Vec<&BitVec> = unions.iter().collect();
    let mut chosen: Vec<BitVec> = Vec::new();
    while !uncovered.is_empty() {
        let best = candidates
            .iter()
            .max_by(|a, b| {
                let ca = uncovered.iter().filter(|u| a.is_subset_of(u)).count();
                let cb = uncovered.iter().filter(|u| b.is_subset_of(u)).count();
                ca.cmp(&cb).then_with(|| b.cmp(a))
            })
            .expect("every union has an m-subset")
            .clone();
        uncovered.retain(|u| !best.is_subset_of(u));
        chosen.push(best);
    }
    let mut k = 0;
    while k < chosen.len() {
        let rest: Vec<&BitVec> = chosen.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| c).collect();
        if unions.iter().all(|u| rest.iter().any(|c| c.is_subset_of(u))) {
            chosen.remove(k);
        } else {
            k += 1;
        }
    }
    chosen.sort();
    chosen
}

pub fn find_prop_b_structure(code: &StabilizerCode, tau: &BigRational, tau_prime: &BigRational) -> Result<PropB> {
    let oc = OracleCode::new(code);
    let syndromes = oc.valid_syndromes(12)?;
    if syndromes.len() > PROP_B_SYNDROME_CAP {
        return Err(Error::Capacity { what: "syndrome space".into(), got: syndromes.len(), cap: PROP_B_SYNDROME_CAP });
    }
    let omegas = syndromes.iter().map(|s| oc.omega(s)).collect::<Result<Vec<_>>>()?;
    let mut failing = Vec::new();
    let mut edges = Vec::new();
    for (i, a) in omegas.iter().enumerate() {
        for (j, b) in omegas.iter().enumerate() {
            if oc.fails(&(a * b))? {
                failing.push((syndromes[i].clone(), syndromes[j].clone()));
                edges.push((i, j));
            }
        }
    }
    let unions: BTreeSet<BitVec> = failing.iter().map(|(a, b)| a.or(b)).collect();
    let m = unions.iter().map(|u| u.count_ones()).min().unwrap_or(0);
    let b = if unions.is_empty() { Vec::new() } else { greedy_cover(&unions, m, oc.num_checks()) };
    let (tf, tpf) = (tau.to_f64(), tau_prime.to_f64());
    let bound = if b.is_empty() { 0.0 } else { prop_b_bound(b.len(), m, tf, tpf)? };

    let member = |t: &BigRational| {
        let ex = extremal_member(&syndromes, t);
        let mut mass = vec![q(0, 1); syndromes.len()];
        for (p, s) in ex {
            let i = syndromes.binary_search(&s).expect("extremal member is supported on valid syndromes");
            mass[i] += p;
        }
        mass
    };
    let extremal = max_coupled_mass(&member(tau), &member(tau_prime), &edges);
    // exact comparison through squares: extremal² ≤ |B|² 4^m max(τ,τ')^m
    let eps_sq_base = q(4, 1) * if tau >= tau_prime { tau.clone() } else { tau_prime.clone() };
    let bsz = q(b.len() as i64, 1);
    let extremal_ok = extremal.clone() * extremal.clone() <= bsz.clone() * bsz * eps_sq_base.pow_n(m);
    let supremum = if syndromes.len() * syndromes.len() <= PROP_B_LP_PAIR_CAP {
        lp_supremum(&syndromes, &edges, tf, tpf)
    } else {
        None
    };
    let sup_ok = supremum.is_none_or(|s| s <= bound + 1e-9 && s + 1e-9 >= extremal.to_f64());
    let mut notes = vec![
        format!("{} failing pairs out of {}", failing.len(), syndromes.len() * syndromes.len()),
        format!("m = {m}, B = {{{}}}", b.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")),
        format!("greedy extremal couplings: fail = {extremal} ≈ {:.6}", extremal.to_f64()),
    ];
    match supremum {
        Some(s) => notes.push(format!("LP supremum over the class: {s:.6}")),
        None => notes.push("LP supremum skipped (syndrome-pair space above cap)".into()),
    }
    let worst = supremum.unwrap_or(0.0).max(extremal.to_f64());
    let pass = extremal_ok && sup_ok;
    let report = OracleReport {
        proposition: "prop_b".into(),
        instance: format!("{}, τ = {tau}, τ' = {tau_prime}", describe(code)),
        relation: Relation::Le,
        lhs: worst,
        rhs: bound,
        pass,
        instances: syndromes.len() * syndromes.len(),
        violations: usize::from(!pass),
        worst_ratio: if bound > 0.0 { Some(worst / bound) } else { None },
        witness: failing.first().map(|(a, b)| format!("σ = {a}, σ' = {b}")),
        notes,
    };
    Ok(PropB { failing_pairs: failing, m, b, bound, extremal, supremum, report })
}
