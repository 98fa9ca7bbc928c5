//! Periodic lattices for the toric families, plus the decoders that
//! implement their correction tables and syndrome repair.

use crate::error::{Error, Result};
use crate::pauli_algebra::{BitVec, F2Matrix, F2Solver, PauliOp};

/// Signed shortest displacement from `a` to `b` on a cycle of length `l`.
/// Exact half-way ties go in the positive direction.
fn wrap_delta(a: usize, b: usize, l: usize) -> isize {
    let fwd = (b + l - a) % l;
    let back = l - fwd;
    if fwd == 0 {
        0
    } else if fwd <= back {
        fwd as isize
    } else {
        -(back as isize)
    }
}

fn wrap_dist(a: usize, b: usize, l: usize) -> usize {
    wrap_delta(a, b, l).unsigned_abs()
}

/// Pairs up an even set of items greedily: repeatedly the globally closest
/// remaining pair, ties broken by item order.
pub(crate) fn greedy_pairs<T>(items: &[T], dist: impl Fn(&T, &T) -> usize) -> Vec<(usize, usize)> {
    let mut cand = Vec::with_capacity(items.len() * items.len() / 2);
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            cand.push((dist(&items[i], &items[j]), i, j));
        }
    }
    cand.sort_unstable();
    let mut used = vec![false; items.len()];
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// L×L torus. Qubits on edges: horizontal `h(x,y)` joins `(x,y)`–`(x+1,y)`,
/// vertical `v(x,y)` joins `(x,y)`–`(x,y+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Torus2 {
    pub l: usize,
}

impl Torus2 {
    pub fn n_qubits(&self) -> usize {
        2 * self.l * self.l
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        (y % self.l) * self.l + (x % self.l)
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.l, site / self.l)
    }

    pub fn h(&self, x: usize, y: usize) -> usize {
        self.site(x, y)
    }

    pub fn v(&self, x: usize, y: usize) -> usize {
        self.l * self.l + self.site(x, y)
    }

    fn m1(&self, a: usize) -> usize {
        (a + self.l - 1) % self.l
    }

    /// Edges incident to vertex `(x,y)`.
    pub fn star(&self, x: usize, y: usize) -> [usize; 4] {
        [self.h(x, y), self.h(self.m1(x), y), self.v(x, y), self.v(x, self.m1(y))]
    }

    /// Edges around plaquette `(x,y)` (lower-left corner at vertex `(x,y)`).
    pub fn plaquette(&self, x: usize, y: usize) -> [usize; 4] {
        [self.h(x, y), self.h(x, y + 1), self.v(x, y), self.v(x + 1, y)]
    }

    /// Edges of the shortest vertex path from `a` to `b` (x first, then y).
    pub fn primal_path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = self.coords(a);
        let (bx, by) = self.coords(b);
        let mut edges = Vec::new();
        let dx = wrap_delta(x, bx, self.l);
        for _ in 0..dx.unsigned_abs() {
            if dx > 0 {
                edges.push(self.h(x, y));
                x = (x + 1) % self.l;
            } else {
                x = self.m1(x);
                edges.push(self.h(x, y));
            }
        }
        let dy = wrap_delta(y, by, self.l);
        for _ in 0..dy.unsigned_abs() {
            if dy > 0 {
                edges.push(self.v(x, y));
                y = (y + 1) % self.l;
            } else {
                y = self.m1(y);
                edges.push(self.v(x, y));
            }
        }
        edges
    }

    /// Edges crossed by the shortest dual path between plaquettes `a` and `b`.
    pub fn dual_path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = self.coords(a);
        let (bx, by) = self.coords(b);
        let mut edges = Vec::new();
        let dx = wrap_delta(x, bx, self.l);
        for _ in 0..dx.unsigned_abs() {
            if dx > 0 {
                x = (x + 1) % self.l;
                edges.push(self.v(x, y));
            } else {
                edges.push(self.v(x, y));
                x = self.m1(x);
            }
        }
        let dy = wrap_delta(y, by, self.l);
        for _ in 0..dy.unsigned_abs() {
            if dy > 0 {
                y = (y + 1) % self.l;
                edges.push(self.h(x, y));
            } else {
                edges.push(self.h(x, y));
                y = self.m1(y);
            }
        }
        edges
    }

    pub fn dist(&self, a: usize, b: usize) -> usize {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        wrap_dist(ax, bx, self.l) + wrap_dist(ay, by, self.l)
    }

    /// Checks: `L²` vertex Z-stars, then `L²` plaquette X-checks.
    pub fn checks(&self) -> Vec<PauliOp> {
        let n = self.n_qubits();
        let mut out = Vec::new();
        for y in 0..self.l {
            for x in 0..self.l {
                out.push(PauliOp::z_on(n, self.star(x, y)));
            }
        }
        for y in 0..self.l {
            for x in 0..self.l {
                out.push(PauliOp::x_on(n, self.plaquette(x, y)));
            }
        }
        out
    }

    /// Pairs of `(X̄, Z̄)` representatives: row/column strings and their dual partners.
    pub fn logical_reps(&self) -> Vec<(PauliOp, PauliOp)> {
        let n = self.n_qubits();
        let l = self.l;
        vec![
            (PauliOp::x_on(n, (0..l).map(|x| self.h(x, 0))), PauliOp::z_on(n, (0..l).map(|y| self.h(0, y)))),
            (PauliOp::x_on(n, (0..l).map(|y| self.v(0, y))), PauliOp::z_on(n, (0..l).map(|x| self.v(x, 0)))),
        ]
    }

    /// Greedy pairing decoder: X corrections pair flagged vertices, Z corrections pair flagged plaquettes.
    pub fn decode(&self, sigma: &BitVec) -> Result<PauliOp> {
        let l2 = self.l * self.l;
        let n = self.n_qubits();
        let verts: Vec<usize> = sigma.iter_ones().filter(|&i| i < l2).collect();
        let plaqs: Vec<usize> = sigma.iter_ones().filter(|&i| i >= l2).map(|i| i - l2).collect();
        if verts.len() % 2 == 1 || plaqs.len() % 2 == 1 {
            return Err(Error::MissingEntry(sigma.to_string()));
        }
        let mut x = BitVec::zeros(n);
        for (i, j) in greedy_pairs(&verts, |a, b| self.dist(*a, *b)) {
            for e in self.primal_path(verts[i], verts[j]) {
                x.flip(e);
            }
        }
        let mut z = BitVec::zeros(n);
        for (i, j) in greedy_pairs(&plaqs, |a, b| self.dist(*a, *b)) {
            for e in self.dual_path(plaqs[i], plaqs[j]) {
                z.flip(e);
            }
        }
        PauliOp::from_masks(x, z)
    }
}

/// L×L×L torus. Edges `e_d(c)` for direction `d ∈ {x,y,z}`, plaquettes
/// `P_o(c)` for orientation `o ∈ {xy, yz, xz}`, cubes at each site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Torus3 {
    pub l: usize,
}

/// Directions spanning each plaquette orientation.
const ORIENT: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

impl Torus3 {
    pub fn volume(&self) -> usize {
        self.l * self.l * self.l
    }

    pub fn n_edges(&self) -> usize {
        3 * self.volume()
    }

    pub fn n_plaquettes(&self) -> usize {
        3 * self.volume()
    }

    pub fn site(&self, c: [usize; 3]) -> usize {
        let l = self.l;
        ((c[2] % l) * l + (c[1] % l)) * l + (c[0] % l)
    }

    pub fn coords(&self, site: usize) -> [usize; 3] {
        let l = self.l;
        [site % l, (site / l) % l, site / (l * l)]
    }

    fn shift(&self, c: [usize; 3], d: usize, forward: bool) -> [usize; 3] {
        let mut c = c;
        c[d] = if forward { (c[d] + 1) % self.l } else { (c[d] + self.l - 1) % self.l };
        c
    }

    pub fn edge(&self, d: usize, c: [usize; 3]) -> usize {
        d * self.volume() + self.site(c)
    }

    pub fn plaq(&self, o: usize, c: [usize; 3]) -> usize {
        o * self.volume() + self.site(c)
    }

    fn orientation_of(a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        ORIENT.iter().position(|&p| p == (a, b)).expect("two distinct directions")
    }

    /// Edges on the boundary of plaquette `(o, c)`.
    pub fn plaq_edges(&self, o: usize, c: [usize; 3]) -> [usize; 4] {
        let (a, b) = ORIENT[o];
        [self.edge(a, c), self.edge(b, c), self.edge(a, self.shift(c, b, true)), self.edge(b, self.shift(c, a, true))]
    }

    /// The four plaquettes containing edge index `e`.
    pub fn edge_plaqs(&self, e: usize) -> [usize; 4] {
        let d = e / self.volume();
        let c = self.coords(e % self.volume());
        let others: Vec<usize> = (0..3).filter(|&k| k != d).collect();
        let mut out = [0; 4];
        for (k, &d2) in others.iter().enumerate() {
            let o = Self::orientation_of(d, d2);
            out[2 * k] = self.plaq(o, c);
            out[2 * k + 1] = self.plaq(o, self.shift(c, d2, false));
        }
        out
    }

    /// The six faces of the cube at `c`.
    pub fn cube_faces(&self, c: [usize; 3]) -> [usize; 6] {
        [
            self.plaq(0, c),
            self.plaq(0, self.shift(c, 2, true)),
            self.plaq(1, c),
            self.plaq(1, self.shift(c, 0, true)),
            self.plaq(2, c),
            self.plaq(2, self.shift(c, 1, true)),
        ]
    }

    /// Edges incident to vertex `c`.
    pub fn vertex_star(&self, c: [usize; 3]) -> [usize; 6] {
        let mut out = [0; 6];
        for d in 0..3 {
            out[2 * d] = self.edge(d, c);
            out[2 * d + 1] = self.edge(d, self.shift(c, d, false));
        }
        out
    }

    /// Face crossed when moving from cube `c` one step along `d`.
    fn crossing(&self, c: [usize; 3], d: usize, forward: bool) -> usize {
        // cube faces normal to d: o = xy for z, yz for x, xz for y
        let o = match d {
            0 => 1,
            1 => 2,
            _ => 0,
        };
        if forward {
            self.plaq(o, self.shift(c, d, true))
        } else {
            self.plaq(o, c)
        }
    }

    /// Faces crossed by the shortest dual path between cubes `a` and `b` (x, then y, then z).
    pub fn dual_path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut c = self.coords(a);
        let t = self.coords(b);
        let mut faces = Vec::new();
        for d in 0..3 {
            let delta = wrap_delta(c[d], t[d], self.l);
            for _ in 0..delta.unsigned_abs() {
                let fwd = delta > 0;
                faces.push(self.crossing(c, d, fwd));
                c = self.shift(c, d, fwd);
            }
        }
        faces
    }

    pub fn cube_dist(&self, a: usize, b: usize) -> usize {
        let ca = self.coords(a);
        let cb = self.coords(b);
        (0..3).map(|d| wrap_dist(ca[d], cb[d], self.l)).sum()
    }

    /// Plaquettes in layer 0 normal to direction `d`: a dual loop winding along `d` meets them an odd number of times.
    pub fn winding_layer(&self, d: usize) -> Vec<usize> {
        let o = match d {
            0 => 1,
            1 => 2,
            _ => 0,
        };
        let mut out = Vec::new();
        for s in 0..self.volume() {
            let c = self.coords(s);
            if c[d] == 0 {
                out.push(self.plaq(o, c));
            }
        }
        out
    }

    /// A straight dual loop winding once along `d`.
    pub fn winding_loop(&self, d: usize) -> Vec<usize> {
        let o = match d {
            0 => 1,
            1 => 2,
            _ => 0,
        };
        (0..self.l)
            .map(|k| {
                let mut c = [0, 0, 0];
                c[d] = k;
                self.plaq(o, c)
            })
            .collect()
    }

    /// Plaquette Z-checks.
    pub fn checks(&self) -> Vec<PauliOp> {
        let n = self.n_edges();
        (0..self.n_plaquettes())
            .map(|p| PauliOp::z_on(n, self.plaq_edges(p / self.volume(), self.coords(p % self.volume()))))
            .collect()
    }

    /// Vertex X-stars: trivial X errors, part of the gauge group but not measured.
    pub fn stars(&self) -> Vec<PauliOp> {
        let n = self.n_edges();
        (0..self.volume()).map(|s| PauliOp::x_on(n, self.vertex_star(self.coords(s)))).collect()
    }

    /// Metacheck rows: one per cube, then three global winding parities.
    pub fn metachecks(&self) -> F2Matrix {
        let np = self.n_plaquettes();
        let mut rows: Vec<Vec<usize>> = (0..self.volume()).map(|s| self.cube_faces(self.coords(s)).to_vec()).collect();
        for d in 0..3 {
            rows.push(self.winding_layer(d));
        }
        F2Matrix::from_rows_of_indices(np, &rows)
    }

    /// Membrane X̄ on the `d`-edges of layer 0, string Z̄ along `d`.
    pub fn logical_reps(&self) -> Vec<(PauliOp, PauliOp)> {
        let n = self.n_edges();
        (0..3)
            .map(|d| {
                let xs: Vec<usize> =
                    (0..self.volume()).map(|s| self.coords(s)).filter(|c| c[d] == 0).map(|c| self.edge(d, c)).collect();
                let zs: Vec<usize> = (0..self.l)
                    .map(|k| {
                        let mut c = [0, 0, 0];
                        c[d] = k;
                        self.edge(d, c)
                    })
                    .collect();
                (PauliOp::x_on(n, xs), PauliOp::z_on(n, zs))
            })
            .collect()
    }

    /// Plaquette-by-edge incidence of the Z-checks.
    pub fn incidence(&self) -> F2Matrix {
        let rows: Vec<Vec<usize>> = (0..self.n_plaquettes())
            .map(|p| self.plaq_edges(p / self.volume(), self.coords(p % self.volume())).to_vec())
            .collect();
        F2Matrix::from_rows_of_indices(self.n_edges(), &rows)
    }

    /// Ways to move from `a` to `b` along axis `d`: (steps, forward, crosses layer 0).
    fn axis_moves(&self, a: usize, b: usize) -> [(usize, bool, bool); 2] {
        let l = self.l;
        let fwd = (b + l - a) % l;
        let back = (a + l - b) % l;
        if a == b {
            [(0, true, false), (l, true, true)]
        } else {
            [(fwd, true, b < a), (back, false, b > a)]
        }
    }

    /// Cheapest dual path from cube `a` to `b` for each winding-parity pattern:
    /// `(cost, direction bits)` indexed by the parity bits.
    fn pair_options(&self, a: usize, b: usize) -> [(usize, u8); 8] {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let moves: Vec<[(usize, bool, bool); 2]> = (0..3).map(|d| self.axis_moves(ca[d], cb[d])).collect();
        let mut best = [(usize::MAX, 0u8); 8];
        for choice in 0..8u8 {
            let mut cost = 0;
            let mut par = 0usize;
            for (d, mv) in moves.iter().enumerate() {
                let m = mv[(choice >> d & 1) as usize];
                cost += m.0;
                if m.2 {
                    par |= 1 << d;
                }
            }
            if cost < best[par].0 {
                best[par] = (cost, choice);
            }
        }
        best
    }

    fn walk(&self, a: usize, b: usize, choice: u8, rho: &mut BitVec) {
        let mut c = self.coords(a);
        let cb = self.coords(b);
        for d in 0..3 {
            let (steps, fwd, _) = self.axis_moves(c[d], cb[d])[(choice >> d & 1) as usize];
            for _ in 0..steps {
                rho.flip(self.crossing(c, d, fwd));
                c = self.shift(c, d, fwd);
            }
        }
    }

    /// Syndrome repair vector for metasyndrome `m` (cube bits then winding bits):
    /// a minimum-weight set of dual paths pairing the flagged cubes with the
    /// requested winding parities. Above [`EXACT_REPAIR_CAP`] flagged cubes the
    /// pairing is greedy and the parities are fixed with straight loops.
    pub fn repair(&self, m: &BitVec) -> BitVec {
        let vol = self.volume();
        let cubes: Vec<usize> = m.iter_ones().filter(|&i| i < vol).collect();
        let target = (0..3).fold(0usize, |acc, d| acc | (m.get(vol + d) as usize) << d);
        let mut rho = BitVec::zeros(self.n_plaquettes());
        let mut parity = 0usize;
        if cubes.len() <= EXACT_REPAIR_CAP {
            let (pairs, par) = self.exact_pairing(&cubes, target);
            for (i, j, choice) in pairs {
                self.walk(cubes[i], cubes[j], choice, &mut rho);
            }
            parity = par;
        } else {
            for (i, j) in greedy_pairs(&cubes, |a, b| self.cube_dist(*a, *b)) {
                for f in self.dual_path(cubes[i], cubes[j]) {
                    rho.flip(f);
                }
            }
            for d in 0..3 {
                if self.winding_layer(d).iter().filter(|&&p| rho.get(p)).count() % 2 == 1 {
                    parity |= 1 << d;
                }
            }
        }
        for d in 0..3 {
            if (parity ^ target) >> d & 1 == 1 {
                for p in self.winding_loop(d) {
                    rho.flip(p);
                }
            }
        }
        rho
    }

    /// Subset dynamic program over the flagged cubes; returns the pairs with
    /// their direction choices and the winding parity they realize. Straight
    /// loops (cost `l` each) make up any remaining parity.
    fn exact_pairing(&self, cubes: &[usize], target: usize) -> (Vec<(usize, usize, u8)>, usize) {
        let k = cubes.len();
        let full = (1usize << k) - 1;
        let mut opts = vec![[(usize::MAX, 0u8); 8]; k * k];
        for i in 0..k {
            for j in i + 1..k {
                opts[i * k + j] = self.pair_options(cubes[i], cubes[j]);
            }
        }
        const INF: usize = usize::MAX / 4;
        // cost[mask * 8 + par]: cheapest pairing of the cubes in `mask`
        let mut cost = vec![INF; (full + 1) * 8];
        let mut back: Vec<(usize, usize, u8, usize)> = vec![(0, 0, 0, 0); (full + 1) * 8];
        cost[0] = 0;
        for mask in 1..=full {
            if mask.count_ones() % 2 == 1 {
                continue;
            }
            let i = mask.trailing_zeros() as usize;
            for j in i + 1..k {
                if mask >> j & 1 == 0 {
                    continue;
                }
                let rest = mask & !(1 << i) & !(1 << j);
                for rp in 0..8 {
                    let base = cost[rest * 8 + rp];
                    if base >= INF {
                        continue;
                    }
                    for (pp, &(c, choice)) in opts[i * k + j].iter().enumerate() {
                        if c == usize::MAX {
                            continue;
                        }
                        let idx = mask * 8 + (rp ^ pp);
                        if base + c < cost[idx] {
                            cost[idx] = base + c;
                            back[idx] = (i, j, choice, rp);
                        }
                    }
                }
            }
        }
        let mut best = (INF, 0usize);
        for par in 0..8 {
            let total = cost[full * 8 + par].saturating_add(self.l * (par ^ target).count_ones() as usize);
            if total < best.0 {
                best = (total, par);
            }
        }
        let mut pairs = Vec::with_capacity(k / 2);
        let (mut mask, mut par) = (full, best.1);
        while mask != 0 {
            let (i, j, choice, rp) = back[mask * 8 + par];
            pairs.push((i, j, choice));
            mask &= !(1 << i) & !(1 << j);
            par = rp;
        }
        (pairs, best.1)
    }
}

/// Most flagged cubes handled by the exact pairing in [`Torus3::repair`].
pub const EXACT_REPAIR_CAP: usize = 14;

/// Greedy decoder for X errors on the 3D torus: flip the edge touching the
/// most flagged plaquettes while that removes weight, otherwise slide the
/// loop at its lowest flagged plaquette; finish with a linear solve if the
/// greedy phase stalls.
#[derive(Clone, Debug)]
pub struct Toric3dDecoder {
    pub torus: Torus3,
    solver: F2Solver,
}

impl Toric3dDecoder {
    pub fn new(torus: Torus3) -> Self {
        let solver = F2Solver::new(&torus.incidence());
        Toric3dDecoder { torus, solver }
    }

    pub fn decode(&self, sigma: &BitVec) -> Result<PauliOp> {
        let t = &self.torus;
        let n = t.n_edges();
        if !self.solver.is_solvable(sigma) {
            return Err(Error::MissingEntry(sigma.to_string()));
        }
        let mut s = sigma.clone();
        let mut corr = BitVec::zeros(n);
        let mut counts = vec![0u8; n];
        let cap = 4 * t.n_plaquettes();
        for _ in 0..cap {
            if s.is_zero() {
                break;
            }
            let flagged: Vec<usize> = s.iter_ones().collect();
            let mut touched = Vec::new();
            for &p in &flagged {
                for e in t.plaq_edges(p / t.volume(), t.coords(p % t.volume())) {
                    if counts[e] == 0 {
                        touched.push(e);
                    }
                    counts[e] += 1;
                }
            }
            touched.sort_unstable();
            let mut best = (0u8, usize::MAX);
            for &e in &touched {
                if counts[e] > best.0 {
                    best = (counts[e], e);
                }
            }
            let choice = if best.0 >= 3 {
                Some(best.1)
            } else {
                let p = flagged[0];
                t.plaq_edges(p / t.volume(), t.coords(p % t.volume())).into_iter().filter(|&e| counts[e] == 2).min()
            };
            for &e in &touched {
                counts[e] = 0;
            }
            match choice {
                Some(e) => {
                    corr.flip(e);
                    for p in t.edge_plaqs(e) {
                        s.flip(p);
                    }
                }
                None => break,
            }
        }
        if !s.is_zero() {
            let rest = self.solver.solve(&s).ok_or_else(|| Error::MissingEntry(sigma.to_string()))?;
            corr.xor_assign(&rest);
        }
        PauliOp::from_masks(corr, BitVec::zeros(n))
    }
}
