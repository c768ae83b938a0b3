//! Bonds are images of potentials under the network map `p -> N^T p`.
//! Pinning one coordinate per kernel-basis support makes that map a
//! bijection, which transports join and meet from potentials to bonds;
//! for unit gains and integer two-sided capacities the whole finite bond
//! lattice can be enumerated together with its cover edges.

use std::collections::HashMap;

use crate::dspace::{self, AffineSubspace, NndOutcome};
use crate::exact::{kernel_basis, solve, Rat, RatMatrix, RatVector};
use crate::graph::{Arc, ArcParamDigraph, Walk, WalkStep};
use crate::par;
use crate::poly::DPolyhedron;
use crate::{Error, Result};

/// Capacity window around the image of the network map: one-sided systems
/// keep only upper bounds, two-sided systems also bound below.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BondSystem {
    graph: ArcParamDigraph,
    upper: RatVector,
    lower: Option<RatVector>,
}

impl BondSystem {
    pub fn one_sided(graph: ArcParamDigraph, upper: RatVector) -> Self {
        assert_eq!(upper.len(), graph.m(), "capacity length mismatch");
        BondSystem { graph, upper, lower: None }
    }

    pub fn two_sided(graph: ArcParamDigraph, lower: RatVector, upper: RatVector) -> Result<Self> {
        assert_eq!(upper.len(), graph.m(), "capacity length mismatch");
        assert_eq!(lower.len(), graph.m(), "capacity length mismatch");
        for a in 0..graph.m() {
            if lower[a] > upper[a] {
                return Err(Error::InfeasibleBond {
                    reason: format!("lower capacity exceeds upper capacity on arc {a}"),
                });
            }
        }
        Ok(BondSystem { graph, upper, lower: Some(lower) })
    }

    pub fn graph(&self) -> &ArcParamDigraph {
        &self.graph
    }

    pub fn upper(&self) -> &RatVector {
        &self.upper
    }

    pub fn lower(&self) -> Option<&RatVector> {
        self.lower.as_ref()
    }

    pub fn within_capacities(&self, x: &RatVector) -> bool {
        assert_eq!(x.len(), self.graph.m(), "bond length mismatch");
        (0..self.graph.m()).all(|a| {
            x[a] <= self.upper[a]
                && self.lower.as_ref().map_or(true, |lo| lo[a] <= x[a])
        })
    }

    /// One-sided potential description: each lower bound becomes the
    /// reversed twin row `p_i - lambda^{-1} p_j <= -lambda^{-1} c_l` (for a
    /// `lambda = 0` loop, a `lambda = 2` loop with capacity `-c_l`).
    pub fn to_polyhedron(&self) -> DPolyhedron {
        let mut arcs = self.graph.arcs().to_vec();
        let mut c: Vec<Rat> = self.upper.iter().cloned().collect();
        if let Some(lower) = &self.lower {
            for (idx, a) in self.graph.arcs().iter().enumerate() {
                if a.lambda.is_zero() {
                    arcs.push(Arc::new(a.tail, a.head, Rat::from_int(2)));
                    c.push(-&lower[idx]);
                } else {
                    let inv = a.lambda.recip().expect("nonzero lambda");
                    arcs.push(Arc::new(a.head, a.tail, inv.clone()));
                    c.push(-&(&inv * &lower[idx]));
                }
            }
        }
        let graph = ArcParamDigraph::new(self.graph.n(), arcs).expect("twin arcs valid");
        DPolyhedron::inequalities(graph, RatVector::new(c))
    }
}

/// The image of `p` under the network map: `x_a = p_head - lambda_a p_tail`.
pub fn bond_of_potential(d: &ArcParamDigraph, p: &RatVector) -> RatVector {
    assert_eq!(p.len(), d.n(), "potential length mismatch");
    d.arcs()
        .iter()
        .map(|a| &p[a.head - 1] - &(&a.lambda * &p[a.tail - 1]))
        .collect()
}

/// A bond system together with the pinned vertices that make the network map
/// injective, and the graph augmented by one zero-capacity equality loop per
/// pin.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReducedSystem {
    system: BondSystem,
    augmented: ArcParamDigraph,
    pins: Vec<usize>,
}

impl ReducedSystem {
    pub fn system(&self) -> &BondSystem {
        &self.system
    }

    pub fn augmented(&self) -> &ArcParamDigraph {
        &self.augmented
    }

    /// Pinned vertices (1-indexed), ascending.
    pub fn pins(&self) -> &[usize] {
        &self.pins
    }
}

/// Pins the least support index of each kernel-basis vector of `p -> N^T p`.
/// The kernel always has a nonnegative disjoint basis, so the pins hit every
/// basis support exactly once and the restricted map is a bijection onto the
/// bond set.
pub fn reduce(s: &BondSystem) -> Result<ReducedSystem> {
    let d = s.graph();
    let nt = d.network_matrix().transpose();
    let kernel = kernel_basis(&nt);
    let space = AffineSubspace::linear(d.n(), kernel);
    let basis = match dspace::nnd_basis(&space)? {
        NndOutcome::Basis(b) => b,
        NndOutcome::NotDistributive { .. } => {
            unreachable!("kernel of a network map is max/min closed")
        }
    };
    let pins: Vec<usize> = basis
        .vectors()
        .iter()
        .map(|v| v.support()[0] + 1)
        .collect();
    let mut arcs = d.arcs().to_vec();
    for &v in &pins {
        arcs.push(Arc::new(v, v, Rat::zero()));
    }
    let augmented = ArcParamDigraph::new(d.n(), arcs).expect("pin loops valid");
    Ok(ReducedSystem { system: s.clone(), augmented, pins })
}

/// The unique potential with zero pinned coordinates mapping to `x`, or
/// `NotABond` when `x` is outside the image of the network map.
pub fn potential_of_bond(r: &ReducedSystem, x: &RatVector) -> Result<RatVector> {
    let d = r.system.graph();
    assert_eq!(x.len(), d.m(), "bond length mismatch");
    let nt = d.network_matrix().transpose();
    let mut rows: Vec<RatVector> = (0..nt.rows()).map(|i| nt.row(i).clone()).collect();
    let mut rhs: Vec<Rat> = x.iter().cloned().collect();
    for &v in &r.pins {
        let mut e = RatVector::zeros(d.n());
        e[v - 1] = Rat::one();
        rows.push(e);
        rhs.push(Rat::zero());
    }
    let a = RatMatrix::from_rows(rows);
    debug_assert_eq!(a.rank(), d.n(), "pinned system must be injective");
    match solve(&a, &RatVector::new(rhs)) {
        Some(p) => Ok(p),
        None => Err(Error::NotABond {
            reason: "x is not in the image of the network map".into(),
        }),
    }
}

/// Join of two feasible bonds: pull back to pinned potentials, take the
/// componentwise max, push forward.
pub fn bond_join(s: &BondSystem, x: &RatVector, y: &RatVector) -> Result<RatVector> {
    bond_lattice_op(s, x, y, true)
}

/// Meet of two feasible bonds (componentwise min of pinned potentials).
pub fn bond_meet(s: &BondSystem, x: &RatVector, y: &RatVector) -> Result<RatVector> {
    bond_lattice_op(s, x, y, false)
}

fn bond_lattice_op(s: &BondSystem, x: &RatVector, y: &RatVector, max: bool) -> Result<RatVector> {
    for (name, v) in [("first", x), ("second", y)] {
        if !s.within_capacities(v) {
            return Err(Error::InfeasibleBond {
                reason: format!("{name} argument violates the capacity window"),
            });
        }
    }
    let r = reduce(s)?;
    let px = potential_of_bond(&r, x)?;
    let py = potential_of_bond(&r, y)?;
    let p = if max { px.join(&py) } else { px.meet(&py) };
    let z = bond_of_potential(s.graph(), &p);
    debug_assert!(s.within_capacities(&z), "lattice op left the capacity window");
    Ok(z)
}

/// Checks that `tree` (arc indices) is a spanning tree of `d`: `n - 1`
/// distinct non-loop arcs connecting every vertex.
pub fn validate_spanning_tree(d: &ArcParamDigraph, tree: &[usize]) -> Result<()> {
    let n = d.n();
    if tree.len() + 1 != n {
        return Err(Error::NotASpanningTree {
            reason: format!("{} arcs cannot span {} vertices", tree.len(), n),
        });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let root = find(parent, parent[v]);
            parent[v] = root;
        }
        parent[v]
    }
    let mut seen = vec![false; d.m()];
    for &t in tree {
        if t >= d.m() {
            return Err(Error::NotASpanningTree { reason: format!("arc index {t} out of range") });
        }
        if seen[t] {
            return Err(Error::NotASpanningTree { reason: format!("arc {t} repeated") });
        }
        seen[t] = true;
        let a = d.arc(t);
        if a.is_loop() {
            return Err(Error::NotASpanningTree { reason: format!("arc {t} is a loop") });
        }
        let (ri, rj) = (find(&mut parent, a.tail - 1), find(&mut parent, a.head - 1));
        if ri == rj {
            return Err(Error::NotASpanningTree { reason: format!("arc {t} closes a cycle") });
        }
        parent[ri] = rj;
    }
    Ok(())
}

/// Fundamental cycle of the non-tree arc `arc`: the arc traversed forward,
/// closed up by the unique tree path from its head back to its tail.
pub fn fundamental_cycle(d: &ArcParamDigraph, tree: &[usize], arc: usize) -> Result<Walk> {
    validate_spanning_tree(d, tree)?;
    if arc >= d.m() {
        return Err(Error::WalkArcOutOfRange { index: arc, m: d.m() });
    }
    if tree.contains(&arc) {
        return Err(Error::NotANonTreeArc { arc });
    }
    let a = d.arc(arc);
    let mut steps = vec![WalkStep::new(arc, 1)];
    if a.head != a.tail {
        // BFS through the tree from the arc's head to its tail.
        let n = d.n();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &t in tree {
            let ta = d.arc(t);
            adj[ta.tail - 1].push((ta.head - 1, t));
            adj[ta.head - 1].push((ta.tail - 1, t));
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut queue = std::collections::VecDeque::from([a.head - 1]);
        let mut visited = vec![false; n];
        visited[a.head - 1] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, t) in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    prev[w] = Some((v, t));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = a.tail - 1;
        while let Some((u, t)) = prev[v] {
            // Traverse t from u to v: forward when its tail is u.
            let dir = if d.arc(t).tail - 1 == u { 1 } else { -1 };
            path.push(WalkStep::new(t, dir));
            v = u;
        }
        path.reverse();
        steps.extend(path);
    }
    Walk::new(d, steps)
}

/// Sum of `x` over forward arcs of the closed walk minus the sum over
/// backward arcs.
pub fn circular_balance(d: &ArcParamDigraph, c: &Walk, x: &RatVector) -> Result<Rat> {
    assert_eq!(x.len(), d.m(), "arc vector length mismatch");
    if !c.is_closed() {
        return Err(Error::WalkNotClosed { start: c.start(), end: c.end() });
    }
    Ok(c.steps()
        .iter()
        .map(|s| if s.dir > 0 { x[s.arc].clone() } else { -&x[s.arc] })
        .sum())
}

/// Arc-indexed shift `z -> z - shift` that moves prescribed circular
/// balances to zero; tree arcs are never shifted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeltaTranslation {
    shift: RatVector,
}

impl DeltaTranslation {
    pub fn shift(&self) -> &RatVector {
        &self.shift
    }

    pub fn apply(&self, z: &RatVector) -> RatVector {
        z.sub(&self.shift)
    }

    pub fn invert(&self, z: &RatVector) -> RatVector {
        z.add(&self.shift)
    }
}

/// Translates prescribed balances away on a connected unit-gain digraph:
/// each non-tree arc `a` is shifted by its prescribed balance, so bonds with
/// balance `delta` over each fundamental cycle correspond to zero-balance
/// bonds of the shifted capacities. Tree arcs keyed in `deltas` are
/// rejected.
pub fn delta_translate(
    d: &ArcParamDigraph,
    c_lower: &RatVector,
    c_upper: &RatVector,
    deltas: &[(usize, Rat)],
    tree: &[usize],
) -> Result<(RatVector, RatVector, DeltaTranslation)> {
    assert!(
        d.arcs().iter().all(|a| a.lambda == Rat::one()),
        "translation requires unit gains"
    );
    assert_eq!(c_lower.len(), d.m(), "capacity length mismatch");
    assert_eq!(c_upper.len(), d.m(), "capacity length mismatch");
    if !d.is_connected() {
        return Err(Error::Disconnected);
    }
    validate_spanning_tree(d, tree)?;
    let mut shift = RatVector::zeros(d.m());
    for (arc, delta) in deltas {
        if *arc >= d.m() {
            return Err(Error::WalkArcOutOfRange { index: *arc, m: d.m() });
        }
        if tree.contains(arc) {
            return Err(Error::NotANonTreeArc { arc: *arc });
        }
        shift[*arc] = delta.clone();
    }
    let t = DeltaTranslation { shift };
    Ok((t.apply(c_lower), t.apply(c_upper), t))
}

/// Default ceiling on enumerated lattice elements.
pub const DEFAULT_LATTICE_CAP: usize = 1_000_000;

/// A finite integral bond lattice: bonds, their pinned potentials (vertex 1
/// fixed to zero), and Hasse cover edges `(lower, upper)` joining bonds whose
/// potentials differ by one in exactly one coordinate. Elements are sorted
/// lexicographically by potential.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegralBondLattice {
    pub bonds: Vec<RatVector>,
    pub potentials: Vec<RatVector>,
    pub covers: Vec<(usize, usize)>,
}

impl IntegralBondLattice {
    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }
}

pub fn enumerate_integral_bonds(
    d: &ArcParamDigraph,
    c_lower: &[i64],
    c_upper: &[i64],
    deltas: &[(usize, i64)],
) -> Result<IntegralBondLattice> {
    enumerate_integral_bonds_with_cap(d, c_lower, c_upper, deltas, DEFAULT_LATTICE_CAP)
}

/// Enumerates every integral bond of a connected unit-gain digraph with
/// two-sided integer capacities and prescribed fundamental-cycle balances.
///
/// After translating the balances away, bonds correspond to integral
/// potentials with `p_1 = 0` subject to the difference constraints
/// `c_l <= p_j - p_i <= c_u` per arc. All-pairs shortest-path bounds on the
/// constraint digraph close the system, after which a lexicographic interval
/// walk emits each solution exactly once; a negative-weight cycle certifies
/// emptiness.
pub fn enumerate_integral_bonds_with_cap(
    d: &ArcParamDigraph,
    c_lower: &[i64],
    c_upper: &[i64],
    deltas: &[(usize, i64)],
    cap: usize,
) -> Result<IntegralBondLattice> {
    assert_eq!(c_lower.len(), d.m(), "capacity length mismatch");
    assert_eq!(c_upper.len(), d.m(), "capacity length mismatch");
    let tree = d.bfs_spanning_tree()?;
    let rat_deltas: Vec<(usize, Rat)> =
        deltas.iter().map(|&(a, v)| (a, Rat::from_int(v))).collect();
    let (cl, cu, trans) = delta_translate(
        d,
        &c_lower.iter().map(|&v| Rat::from_int(v)).collect(),
        &c_upper.iter().map(|&v| Rat::from_int(v)).collect(),
        &rat_deltas,
        &tree,
    )?;
    let to_i64 = |v: &RatVector, what: &str| -> Result<Vec<i64>> {
        v.iter()
            .map(|r| r.to_i64().ok_or(Error::Overflow { what: what.into() }))
            .collect()
    };
    let cl = to_i64(&cl, "translated lower capacities")?;
    let cu = to_i64(&cu, "translated upper capacities")?;

    let n = d.n();
    const INF: i64 = i64::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (idx, a) in d.arcs().iter().enumerate() {
        let (i, j) = (a.tail - 1, a.head - 1);
        // p_j - p_i <= cu and p_i - p_j <= -cl.
        dist[i][j] = dist[i][j].min(cu[idx]);
        dist[j][i] = dist[j][i].min(-cl[idx]);
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if dist[k][j] == INF {
                    continue;
                }
                let cand = dist[i][k].saturating_add(dist[k][j]);
                if cand < dist[i][j] {
                    dist[i][j] = cand;
                }
            }
        }
    }
    let empty = IntegralBondLattice {
        bonds: Vec::new(),
        potentials: Vec::new(),
        covers: Vec::new(),
    };
    if (0..n).any(|i| dist[i][i] < 0) {
        return Ok(empty);
    }
    if (1..n).any(|v| dist[0][v] >= INF || dist[v][0] >= INF) {
        return Err(Error::CapacityExceeded {
            what: "integral bond lattice (unbounded potential interval)".into(),
            requested: usize::MAX,
            limit: cap,
        });
    }

    // Lexicographic depth-first walk over closed intervals. Shortest-path
    // closure makes every locally consistent prefix globally extendable, so
    // no emitted prefix is wasted.
    let mut potentials: Vec<Vec<i64>> = Vec::new();
    let mut p = vec![0i64; n];
    let mut stack: Vec<(usize, i64, i64)> = Vec::new();
    {
        // Iterative DFS: frame (vertex, current value, upper end).
        fn interval(dist: &[Vec<i64>], p: &[i64], v: usize) -> (i64, i64) {
            let mut lo = i64::MIN;
            let mut hi = i64::MAX;
            for u in 0..v {
                lo = lo.max(p[u] - dist[v][u]);
                hi = hi.min(p[u] + dist[u][v]);
            }
            (lo, hi)
        }
        if n == 1 {
            potentials.push(p.clone());
        } else {
            let (lo, hi) = interval(&dist, &p, 1);
            if lo <= hi {
                stack.push((1, lo, hi));
            }
            while let Some((v, val, hi)) = stack.pop() {
                if val < hi {
                    stack.push((v, val + 1, hi));
                }
                p[v] = val;
                if v + 1 == n {
                    if potentials.len() >= cap {
                        return Err(Error::CapacityExceeded {
                            what: "integral bond lattice".into(),
                            requested: potentials.len() + 1,
                            limit: cap,
                        });
                    }
                    potentials.push(p.clone());
                } else {
                    let (lo, hi) = interval(&dist, &p, v + 1);
                    if lo <= hi {
                        stack.push((v + 1, lo, hi));
                    }
                }
            }
        }
    }

    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    for (i, q) in potentials.iter().enumerate() {
        index.insert(q.clone(), i);
    }
    let mut covers = Vec::new();
    for (i, q) in potentials.iter().enumerate() {
        let mut up = q.clone();
        for v in 1..n {
            up[v] += 1;
            if let Some(&j) = index.get(&up) {
                covers.push((i, j));
            }
            up[v] -= 1;
        }
    }
    covers.sort_unstable();

    let bonds = potentials
        .iter()
        .map(|q| {
            let zero_bond: RatVector = d
                .arcs()
                .iter()
                .map(|a| Rat::from_int(q[a.head - 1] - q[a.tail - 1]))
                .collect();
            trans.invert(&zero_bond)
        })
        .collect();
    let potentials = potentials
        .into_iter()
        .map(|q| q.iter().map(|&v| Rat::from_int(v)).collect())
        .collect();
    Ok(IntegralBondLattice { bonds, potentials, covers })
}

/// Independent oracle for the integral bond set: every integer point of the
/// capacity box whose balance over each fundamental cycle matches the
/// prescription. Output sorted lexicographically by bond.
pub fn integral_bonds_box_filter(
    d: &ArcParamDigraph,
    c_lower: &[i64],
    c_upper: &[i64],
    deltas: &[(usize, i64)],
) -> Result<Vec<RatVector>> {
    assert_eq!(c_lower.len(), d.m(), "capacity length mismatch");
    assert_eq!(c_upper.len(), d.m(), "capacity length mismatch");
    let tree = d.bfs_spanning_tree()?;
    let delta_of: HashMap<usize, i64> = deltas.iter().cloned().collect();
    let mut cycles = Vec::new();
    for arc in 0..d.m() {
        if tree.contains(&arc) {
            continue;
        }
        let walk = fundamental_cycle(d, &tree, arc)?;
        let want = Rat::from_int(delta_of.get(&arc).copied().unwrap_or(0));
        cycles.push((walk, want));
    }
    for (arc, _) in deltas {
        if tree.contains(arc) {
            return Err(Error::NotANonTreeArc { arc: *arc });
        }
    }

    let mut box_size: usize = 1;
    for a in 0..d.m() {
        if c_upper[a] < c_lower[a] {
            return Ok(Vec::new());
        }
        let width = usize::try_from(c_upper[a] - c_lower[a] + 1)
            .map_err(|_| Error::Overflow { what: "capacity box width".into() })?;
        box_size = box_size.checked_mul(width).ok_or(Error::Overflow {
            what: "capacity box volume".into(),
        })?;
        if box_size > 10_000_000 {
            return Err(Error::CapacityExceeded {
                what: "capacity box volume".into(),
                requested: box_size,
                limit: 10_000_000,
            });
        }
    }

    let widths: Vec<usize> = (0..d.m())
        .map(|a| (c_upper[a] - c_lower[a] + 1) as usize)
        .collect();
    let mut out: Vec<RatVector> = par::map_indexed(box_size, |k| {
        // Mixed-radix decode: the last arc index is the fastest digit.
        let mut rem = k;
        let mut x = vec![0i64; d.m()];
        for a in (0..d.m()).rev() {
            x[a] = c_lower[a] + (rem % widths[a]) as i64;
            rem /= widths[a];
        }
        let xv: RatVector = x.iter().map(|&v| Rat::from_int(v)).collect();
        cycles
            .iter()
            .all(|(walk, want)| circular_balance(d, walk, &xv).expect("closed walk") == *want)
            .then_some(xv)
    })
    .into_iter()
    .flatten()
    .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(xs: &[i64]) -> RatVector {
        RatVector::from_ints(xs)
    }

    #[test]
    fn bond_of_potential_examples() {
        assert_eq!(bond_of_potential(&fixtures::g1(), &rv(&[0, 1, 1])), rv(&[1, -2, 1]));
        assert_eq!(bond_of_potential(&fixtures::g1(), &RatVector::zeros(3)), rv(&[0, 0, 0]));
        assert_eq!(bond_of_potential(&fixtures::g2(), &rv(&[2, 0])), rv(&[-4, 2, -1]));
    }

    #[test]
    fn reduce_pins_kernel_supports() {
        let s = BondSystem::one_sided(fixtures::g1(), rv(&[10, 10, 10]));
        let r = reduce(&s).unwrap();
        assert_eq!(r.pins(), &[1]);
        assert_eq!(r.augmented().m(), 4);
        let loop_arc = r.augmented().arc(3);
        assert!(loop_arc.is_loop() && loop_arc.tail == 1 && loop_arc.lambda.is_zero());

        let s = BondSystem::one_sided(fixtures::path3(), rv(&[1, 1]));
        assert_eq!(reduce(&s).unwrap().pins(), &[1]);

        // Two zero loops: the network map is injective, nothing to pin.
        let g = ArcParamDigraph::from_triples(2, &[(1, 1, Rat::zero()), (2, 2, Rat::zero())])
            .unwrap();
        let s = BondSystem::one_sided(g, rv(&[1, 1]));
        let r = reduce(&s).unwrap();
        assert!(r.pins().is_empty());
        assert_eq!(r.augmented().m(), 2);
    }

    #[test]
    fn potential_of_bond_inverts() {
        let s = BondSystem::one_sided(fixtures::g1(), rv(&[10, 10, 10]));
        let r = reduce(&s).unwrap();
        assert_eq!(potential_of_bond(&r, &rv(&[1, -2, 1])).unwrap(), rv(&[0, 1, 1]));
        assert_eq!(potential_of_bond(&r, &RatVector::zeros(3)).unwrap(), rv(&[0, 0, 0]));
        assert!(matches!(
            potential_of_bond(&r, &rv(&[1, 0, 0])),
            Err(Error::NotABond { .. })
        ));
    }

    #[test]
    fn bijection_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let d = fixtures::random_lambda_graph(&mut rng, 5, 8);
            let m = d.m();
            let s = BondSystem::one_sided(d.clone(), RatVector::from_ints(&vec![50; m]));
            let r = reduce(&s).unwrap();
            let p: RatVector = (0..d.n())
                .map(|_| Rat::from_int(rng.gen_range(-3..=3)))
                .collect();
            let x = bond_of_potential(&d, &p);
            // Forward then back lands on the pinned representative.
            let q = potential_of_bond(&r, &x).unwrap();
            assert_eq!(bond_of_potential(&d, &q), x);
            for &v in r.pins() {
                assert!(q[v - 1].is_zero());
            }
            // Back then forward is the identity on bonds.
            let x2 = bond_of_potential(&d, &potential_of_bond(&r, &x).unwrap());
            assert_eq!(x2, x);
        }
    }

    #[test]
    fn join_meet_follow_pinned_potentials() {
        let s = BondSystem::one_sided(fixtures::g1(), rv(&[10, 10, 10]));
        let x = rv(&[1, -2, 1]);
        let y = RatVector::zeros(3);
        // y pulls back to the zero potential, x to (0,1,1) >= 0, so x joins
        // to itself and meets to y.
        assert_eq!(bond_join(&s, &x, &y).unwrap(), x);
        assert_eq!(bond_meet(&s, &x, &y).unwrap(), y);
        assert_eq!(bond_join(&s, &x, &x).unwrap(), x);
        // Absorption.
        let j = bond_join(&s, &x, &y).unwrap();
        assert_eq!(bond_meet(&s, &x, &j).unwrap(), x);
        // Infeasible input rejected.
        let too_big = rv(&[11, 0, 0]);
        assert!(matches!(
            bond_join(&s, &too_big, &y),
            Err(Error::InfeasibleBond { .. })
        ));
    }

    #[test]
    fn two_sided_systems() {
        let g = fixtures::digon();
        assert!(matches!(
            BondSystem::two_sided(g.clone(), rv(&[2, 0]), rv(&[1, 1])),
            Err(Error::InfeasibleBond { .. })
        ));
        let s = BondSystem::two_sided(g, rv(&[-1, -1]), rv(&[1, 1])).unwrap();
        assert!(s.within_capacities(&rv(&[1, -1])));
        assert!(!s.within_capacities(&rv(&[-2, 0])));
        // Twin expansion doubles the rows and preserves the window.
        let p = s.to_polyhedron();
        assert_eq!(p.graph().m(), 4);
        let inside = potential_of_bond(&reduce(&s).unwrap(), &rv(&[1, -1])).unwrap();
        assert!(p.member(&inside));
    }

    #[test]
    fn fundamental_cycles_and_balance() {
        let d = fixtures::digon();
        let tree = d.bfs_spanning_tree().unwrap();
        assert_eq!(tree, vec![0]);
        let c = fundamental_cycle(&d, &tree, 1).unwrap();
        assert!(c.is_closed());
        assert_eq!(circular_balance(&d, &c, &rv(&[1, -1])).unwrap(), Rat::zero());
        assert_eq!(circular_balance(&d, &c, &rv(&[1, 1])).unwrap(), Rat::from_int(2));
        assert_eq!(
            circular_balance(&d, &c.reversed(), &rv(&[1, 1])).unwrap(),
            Rat::from_int(-2)
        );
        assert!(matches!(
            fundamental_cycle(&d, &tree, 0),
            Err(Error::NotANonTreeArc { arc: 0 })
        ));
        // A non-closed walk is rejected.
        let path = Walk::new(&d, vec![WalkStep::new(0, 1)]).unwrap();
        assert!(matches!(
            circular_balance(&d, &path, &rv(&[0, 0])),
            Err(Error::WalkNotClosed { .. })
        ));
    }

    #[test]
    fn delta_translation_examples() {
        let d = fixtures::digon();
        let tree = vec![0];
        let (cl, cu, t) = delta_translate(
            &d,
            &rv(&[-1, -1]),
            &rv(&[1, 1]),
            &[(1, Rat::from_int(2))],
            &tree,
        )
        .unwrap();
        assert_eq!(cl, rv(&[-1, -3]));
        assert_eq!(cu, rv(&[1, -1]));
        assert_eq!(t.invert(&cl), rv(&[-1, -1]));
        // Zero shift is the identity.
        let (cl, cu, _) = delta_translate(&d, &rv(&[-1, -1]), &rv(&[1, 1]), &[], &tree).unwrap();
        assert_eq!((cl, cu), (rv(&[-1, -1]), rv(&[1, 1])));
        // Tree arcs cannot carry a shift.
        assert!(matches!(
            delta_translate(&d, &rv(&[0, 0]), &rv(&[0, 0]), &[(0, Rat::one())], &tree),
            Err(Error::NotANonTreeArc { arc: 0 })
        ));
        // Trees have no non-tree arcs at all: empty prescription only.
        let p3 = fixtures::path3();
        let t3 = p3.bfs_spanning_tree().unwrap();
        let (cl, cu, _) =
            delta_translate(&p3, &rv(&[0, 0]), &rv(&[1, 1]), &[], &t3).unwrap();
        assert_eq!((cl, cu), (rv(&[0, 0]), rv(&[1, 1])));
        // Disconnected graphs are rejected.
        let disc = ArcParamDigraph::from_triples(3, &[(1, 2, Rat::one())]).unwrap();
        assert!(matches!(
            delta_translate(&disc, &rv(&[0]), &rv(&[0]), &[], &[0]),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn digon_lattice_is_a_three_chain() {
        let d = fixtures::digon();
        let lat = enumerate_integral_bonds(&d, &[-1, -1], &[1, 1], &[]).unwrap();
        assert_eq!(lat.bonds, vec![rv(&[-1, 1]), rv(&[0, 0]), rv(&[1, -1])]);
        assert_eq!(lat.covers, vec![(0, 1), (1, 2)]);
        let brute = integral_bonds_box_filter(&d, &[-1, -1], &[1, 1], &[]).unwrap();
        let mut sorted = lat.bonds.clone();
        sorted.sort();
        assert_eq!(sorted, brute);
    }

    #[test]
    fn path_lattice_is_a_four_chain() {
        let d = fixtures::path3();
        let lat = enumerate_integral_bonds(&d, &[0, 0], &[1, 1], &[]).unwrap();
        assert_eq!(lat.len(), 4);
        let mut sorted = lat.bonds.clone();
        sorted.sort();
        assert_eq!(sorted, vec![rv(&[0, 0]), rv(&[0, 1]), rv(&[1, 0]), rv(&[1, 1])]);
        // Potentials are totally ordered: a chain with three covers.
        assert_eq!(lat.covers.len(), 3);
        assert_eq!(
            sorted,
            integral_bonds_box_filter(&d, &[0, 0], &[1, 1], &[]).unwrap()
        );
    }

    #[test]
    fn fork_lattice_is_the_two_by_two_grid() {
        let d = fixtures::fork3();
        let lat = enumerate_integral_bonds(&d, &[0, 0], &[1, 1], &[]).unwrap();
        assert_eq!(lat.len(), 4);
        assert_eq!(lat.covers.len(), 4, "grid has four cover edges");
        let mut sorted = lat.bonds.clone();
        sorted.sort();
        assert_eq!(sorted, vec![rv(&[0, 0]), rv(&[0, 1]), rv(&[1, 0]), rv(&[1, 1])]);
    }

    #[test]
    fn infeasible_capacities_give_empty_lattice() {
        let d = fixtures::digon();
        assert!(enumerate_integral_bonds(&d, &[1, 1], &[0, 0], &[]).unwrap().is_empty());
        assert!(integral_bonds_box_filter(&d, &[2, 0], &[1, 1], &[]).unwrap().is_empty());
    }

    #[test]
    fn nonzero_balance_prescription() {
        let d = fixtures::digon();
        let lat = enumerate_integral_bonds(&d, &[-2, -2], &[2, 2], &[(1, 2)]).unwrap();
        assert!(!lat.is_empty());
        let tree = d.bfs_spanning_tree().unwrap();
        let cyc = fundamental_cycle(&d, &tree, 1).unwrap();
        for x in &lat.bonds {
            assert_eq!(circular_balance(&d, &cyc, x).unwrap(), Rat::from_int(2));
        }
        let mut sorted = lat.bonds.clone();
        sorted.sort();
        assert_eq!(
            sorted,
            integral_bonds_box_filter(&d, &[-2, -2], &[2, 2], &[(1, 2)]).unwrap()
        );
    }

    #[test]
    fn random_unit_instances_match_box_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let d = fixtures::random_unit_connected(&mut rng, 4, 3);
            let m = d.m();
            let cl: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=0)).collect();
            let cu: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=2)).collect();
            let lat = enumerate_integral_bonds(&d, &cl, &cu, &[]).unwrap();
            let mut sorted = lat.bonds.clone();
            sorted.sort();
            assert_eq!(sorted, integral_bonds_box_filter(&d, &cl, &cu, &[]).unwrap());
            // Covers really are +1 steps in exactly one potential coordinate.
            for &(i, j) in &lat.covers {
                let diff = lat.potentials[j].sub(&lat.potentials[i]);
                assert_eq!(diff.support().len(), 1);
                assert_eq!(diff[diff.support()[0]], Rat::one());
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let d = fixtures::digon();
        let err = enumerate_integral_bonds_with_cap(&d, &[-5, -5], &[5, 5], &[], 3);
        assert!(matches!(err, Err(Error::CapacityExceeded { .. })));
    }
}
